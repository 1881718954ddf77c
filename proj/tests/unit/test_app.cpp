#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "gauss_extrema/app.hpp"
#include "gauss_extrema/errors.hpp"

using namespace gx;
using ::testing::HasSubstr;

namespace {

double num(const Report& r, std::size_t row, const std::string& col) {
    const auto& c = r.rows.at(row).at(r.column(col));
    if (std::holds_alternative<double>(c)) return std::get<double>(c);
    if (std::holds_alternative<std::int64_t>(c)) return static_cast<double>(std::get<std::int64_t>(c));
    throw std::runtime_error("cell is not numeric");
}

bool empty(const Report& r, std::size_t row, const std::string& col) {
    return std::holds_alternative<std::monostate>(r.rows.at(row).at(r.column(col)));
}

std::string str(const Report& r, std::size_t row, const std::string& col) {
    return format_cell(r.rows.at(row).at(r.column(col)));
}

std::string config_error(const std::string& text, const RunOverrides& ov = {}) {
    try {
        run_experiment(text, ov);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "no error";
}

const char* kCorollary = R"({
  "kind": "asym",
  "u_grid": [2, 4, 6],
  "model": {"type": "corollary", "H": 0.5, "c": 1, "psi": "asymptotic", "pickands": {"mode": "brownian"}}
})";

const char* kRegenModel = R"("p": [1, 1], "q": [1, 1], "lambda": 2, "x0": 1, "exp_rate": 0.3333333333333333,
                             "a": [1, 1], "norm": "L1")";

std::string compare_config(unsigned workers) {
    return R"({
      "kind": "compare",
      "u_grid": [0.5, 1, 10],
      "mc": {"n_reps": 2000, "seed": 7, "workers": )" +
           std::to_string(workers) + R"(},
      "grid": {"step": 0.0625},
      "problem": {"type": "infinite", "H": 0.5, "c": 1, "psi": "exact", "pickands": {"mode": "brownian"}}
    })";
}

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove(path);
    }
    ~TempFile() { std::filesystem::remove(path); }
};

}  // namespace

TEST(Asym, CorollaryBrownian) {
    const auto res = run_experiment(kCorollary);
    const auto& r = res.report;
    EXPECT_EQ(r.kind, "asym");
    ASSERT_EQ(r.rows.size(), 3u);
    EXPECT_EQ(r.columns.front(), "u");
    EXPECT_EQ(r.columns.back(), "flags");
    EXPECT_NEAR(num(r, 2, "value") / std::exp(-12.0), 1.0, 0.02);
    EXPECT_EQ(res.output.format, ReportFormat::Csv);
    EXPECT_TRUE(res.output.path.empty());
}

TEST(Asym, Theorem42Columns) {
    const auto r = run_experiment(std::string(R"({"kind": "asym", "u_grid": [10, 20], "model": {"type": "theorem42", )") +
                                  kRegenModel + "}}")
                       .report;
    ASSERT_EQ(r.rows.size(), 2u);
    EXPECT_NEAR(num(r, 0, "value"), 0.1, 1e-12);
    EXPECT_NEAR(num(r, 0, "integral_mu"), 0.25, 1e-12);
    EXPECT_NEAR(num(r, 1, "value"), 0.05, 1e-12);
    EXPECT_NO_THROW(r.column("u_factor"));
}

TEST(Config, StabilityRuleIsNamed) {
    const std::string text = R"({"kind": "regen", "u_grid": [10], "regen": {"p": [1, 1], "q": [1, 1], "lambda": 0.5,
                                 "exp_rate": 0.3}})";
    EXPECT_THAT(config_error(text), HasSubstr("stability rule"));
    EXPECT_THAT(config_error(text), HasSubstr("regen"));
}

TEST(Config, UnknownKeysCarryTheirPath) {
    EXPECT_THAT(config_error(R"({"kind": "asym", "u_grid": [1], "modle": {}})"), HasSubstr("modle"));
    EXPECT_THAT(config_error(R"({"kind": "asym", "u_grid": [1],
                                 "model": {"type": "corollary", "H": 0.5, "c": 1, "psii": "exact"}})"),
                HasSubstr("model.psii: unknown key"));
    EXPECT_THAT(config_error(R"({"kind": "asym", "u_grid": [1], "mc": {"reps": 10},
                                 "model": {"type": "corollary", "H": 0.5, "c": 1}})"),
                HasSubstr("mc.reps"));
}

TEST(Config, MalformedValues) {
    EXPECT_THAT(config_error("{not json"), HasSubstr("json"));
    EXPECT_THAT(config_error(R"({"kind": "nope"})"), HasSubstr("kind"));
    EXPECT_THAT(config_error(R"({"kind": "asym", "u_grid": [2, 1], "model": {"type": "corollary", "H": 0.5, "c": 1}})"),
                HasSubstr("u_grid"));
    EXPECT_THAT(config_error(R"({"kind": "asym", "u_grid": [1], "model": {"type": "corollary", "H": 1.5, "c": 1,
                                 "pickands": {"mode": "brownian"}}})"),
                HasSubstr("model.H"));
    EXPECT_THAT(config_error(R"({"kind": "asym", "u_grid": [1], "output": {"format": "xml"},
                                 "model": {"type": "corollary", "H": 0.5, "c": 1, "pickands": {"mode": "brownian"}}})"),
                HasSubstr("output.format"));
    EXPECT_THAT(config_error(R"({"kind": "compare", "u_grid": [1], "mc": {"n_reps": 10},
                                 "problem": {"type": "infinite", "H": 0.5, "c": 1, "pickands": {"mode": "brownian"}}})"),
                HasSubstr("mc.n_reps"));
}

TEST(Config, KindOverrideMustMatch) {
    RunOverrides ov;
    ov.kind = "regen";
    EXPECT_THAT(config_error(kCorollary, ov), HasSubstr("not 'regen'"));
    ov.kind = "asym";
    EXPECT_NO_THROW(run_experiment(kCorollary, ov));
}

TEST(Compare, SchemaAndInfeasibleRow) {
    const auto r = run_experiment(compare_config(1)).report;
    EXPECT_EQ(r.columns, (std::vector<std::string>{"u", "mc_estimate", "mc_half_width", "formula_value", "ratio",
                                                   "ratio_lo", "ratio_hi", "flags"}));
    ASSERT_EQ(r.rows.size(), 3u);
    EXPECT_GT(num(r, 0, "mc_estimate"), 0.0);
    EXPECT_LE(num(r, 0, "ratio_lo"), num(r, 0, "ratio"));
    EXPECT_THAT(str(r, 2, "flags"), HasSubstr("infeasible"));
    EXPECT_TRUE(empty(r, 2, "mc_estimate"));
    EXPECT_TRUE(empty(r, 2, "ratio"));
    EXPECT_GT(num(r, 2, "formula_value"), 0.0);
}

TEST(Compare, ByteIdenticalAcrossWorkers) {
    const auto one = render_csv(run_experiment(compare_config(1)).report);
    EXPECT_EQ(one, render_csv(run_experiment(compare_config(1)).report));
    EXPECT_EQ(one, render_csv(run_experiment(compare_config(3)).report));
    RunOverrides ov;
    ov.workers = 2;
    EXPECT_EQ(one, render_csv(run_experiment(compare_config(1), ov).report));
    ov.seed = 8;
    EXPECT_NE(one, render_csv(run_experiment(compare_config(1), ov).report));
}

TEST(Pickands, CacheRoundTrip) {
    TempFile cache("gx_test_app_pickands.cache");
    const std::string text = R"({"kind": "pickands", "mc": {"n_reps": 4000, "seed": 3},
      "pickands": {"H": 0.5, "t_max": 32, "delta": 0.05, "cache": ")" +
                             cache.path.string() + R"("}})";
    const auto first = run_experiment(text).report;
    ASSERT_EQ(first.rows.size(), 1u);
    EXPECT_EQ(str(first, 0, "profile"), "H=0.5");
    EXPECT_NEAR(num(first, 0, "estimate"), 1.0, 0.15);
    ASSERT_EQ(first.notes.size(), 1u);
    EXPECT_THAT(first.notes[0], HasSubstr("cache miss"));

    const auto second = run_experiment(text).report;
    ASSERT_EQ(second.notes.size(), 1u);
    EXPECT_THAT(second.notes[0], HasSubstr("cache hit"));
    EXPECT_EQ(render_csv(first), render_csv(second));
}

TEST(Regen, ZeroLevelHasNoFormula) {
    const auto r = run_experiment(std::string(R"({"kind": "regen", "u_grid": [0, 10], "mc": {"n_reps": 1000, "seed": 2},
                                                  "grid": {"step": 0.015625}, "regen": {)") +
                                  kRegenModel + "}}")
                       .report;
    ASSERT_EQ(r.rows.size(), 2u);
    // The walk drifts away from the quadrant, so even level 0 is missed sometimes.
    EXPECT_GT(num(r, 0, "estimate"), 0.9);
    EXPECT_LE(num(r, 0, "estimate"), 1.0);
    EXPECT_TRUE(empty(r, 0, "formula_value"));
    EXPECT_NEAR(num(r, 1, "formula_value"), 0.1, 1e-12);
    EXPECT_EQ(num(r, 1, "n_paths"), 1000.0);
}

TEST(Simulate, ShapeAndSeed) {
    const std::string text = R"({"kind": "simulate", "mc": {"seed": 5},
      "simulate": {"H": 0.7, "horizon": 2, "n": 16, "n_paths": 3, "drift": 1}})";
    const auto r = run_experiment(text).report;
    ASSERT_EQ(r.rows.size(), 3u * 17u);
    EXPECT_DOUBLE_EQ(num(r, 0, "value"), 0.0);
    EXPECT_DOUBLE_EQ(num(r, 16, "t"), 2.0);
    EXPECT_EQ(num(r, 17, "path"), 1.0);
    EXPECT_EQ(render_csv(r), render_csv(run_experiment(text).report));
    RunOverrides ov;
    ov.seed = 6;
    EXPECT_NE(render_csv(r), render_csv(run_experiment(text, ov).report));
}

TEST(Render, CsvQuotingAndJson) {
    Report r;
    r.kind = "asym";
    r.columns = {"u", "flags", "n", "missing"};
    r.rows.push_back({1.5, std::string("a,b"), std::int64_t{3}, std::monostate{}});
    r.rows.push_back({INFINITY, std::string("say \"x\""), std::int64_t{-1}, 0.25});
    EXPECT_EQ(render_csv(r), "u,flags,n,missing\n1.5,\"a,b\",3,\n" + format_cell(INFINITY) + ",\"say \"\"x\"\"\",-1,0.25\n");

    const auto doc = nlohmann::json::parse(render_json(r));
    EXPECT_EQ(doc["kind"], "asym");
    EXPECT_EQ(doc["columns"].size(), 4u);
    EXPECT_EQ(doc["rows"][0]["u"], 1.5);
    EXPECT_EQ(doc["rows"][0]["n"], 3);
    EXPECT_TRUE(doc["rows"][0]["missing"].is_null());
    EXPECT_TRUE(doc["rows"][1]["u"].is_string());
    EXPECT_EQ(render(r, ReportFormat::Json), render_json(r));
    EXPECT_THROW(r.column("nope"), DomainError);
}

TEST(Output, OverridesApply) {
    RunOverrides ov;
    ov.format = "json";
    ov.out_path = "x.json";
    const auto res = run_experiment(kCorollary, ov);
    EXPECT_EQ(res.output.format, ReportFormat::Json);
    EXPECT_EQ(res.output.path, "x.json");
}
