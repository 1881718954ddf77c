#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <set>

#include "json.hpp"

#include "gauss_extrema/app.hpp"
#include "gauss_extrema/asymptotics.hpp"
#include "gauss_extrema/compare.hpp"
#include "gauss_extrema/errors.hpp"
#include "gauss_extrema/format.hpp"
#include "gauss_extrema/pickands.hpp"
#include "gauss_extrema/regenerative.hpp"

namespace gx {

namespace {

using json = nlohmann::json;

// A JSON object that remembers which keys were read, so that leftovers can be
// rejected with their full path.
class Section {
public:
    Section(const json& j, std::string path) : j_(&j), path_(std::move(path)) {
        if (!j.is_object()) fail("expected an object");
    }

    std::string path_of(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError((path_.empty() ? std::string("config") : path_) + ": " + msg);
    }
    [[noreturn]] void fail(const std::string& k, const std::string& msg) const {
        throw ConfigError(path_of(k) + ": " + msg);
    }

    bool has(const std::string& k) const { return j_->contains(k); }

    const json& get(const std::string& k) {
        if (!has(k)) fail(k, "missing required key");
        used_.insert(k);
        return j_->at(k);
    }

    double num(const std::string& k) {
        const json& v = get(k);
        if (!v.is_number()) fail(k, "expected a number");
        return v.get<double>();
    }
    double num(const std::string& k, double def) { return has(k) ? num(k) : def; }

    std::uint64_t count(const std::string& k) {
        const json& v = get(k);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            fail(k, "expected a nonnegative integer");
        return v.get<std::uint64_t>();
    }
    std::uint64_t count(const std::string& k, std::uint64_t def) { return has(k) ? count(k) : def; }

    std::string str(const std::string& k) {
        const json& v = get(k);
        if (!v.is_string()) fail(k, "expected a string");
        return v.get<std::string>();
    }
    std::string str(const std::string& k, const std::string& def) { return has(k) ? str(k) : def; }

    bool flag(const std::string& k, bool def) {
        if (!has(k)) return def;
        const json& v = get(k);
        if (!v.is_boolean()) fail(k, "expected true or false");
        return v.get<bool>();
    }

    std::vector<double> nums(const std::string& k) {
        const json& v = get(k);
        if (!v.is_array()) fail(k, "expected an array of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) fail(k, "expected an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    Vec2 pair(const std::string& k) {
        const auto v = nums(k);
        if (v.size() != 2) fail(k, "expected two numbers");
        return {v[0], v[1]};
    }

    Section obj(const std::string& k) { return Section(get(k), path_of(k)); }

    std::vector<Section> objs(const std::string& k) {
        const json& v = get(k);
        if (!v.is_array() || v.empty()) fail(k, "expected a nonempty array of objects");
        std::vector<Section> out;
        for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(v[i], path_of(k) + "[" + std::to_string(i) + "]");
        return out;
    }

    void finish() const {
        for (const auto& item : j_->items())
            if (!used_.count(item.key())) fail(item.key(), "unknown key");
    }

    const std::string& path() const { return path_; }

private:
    const json* j_;
    std::string path_;
    std::set<std::string> used_;
};

// Domain errors raised while building objects from config values become
// config errors at that key path.
template <class F>
auto at_path(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const DomainError& e) {
        throw ConfigError((path.empty() ? std::string("config") : path) + ": " + e.what());
    }
}

struct McSection {
    McOptions mc;
    std::uint64_t pilot_reps = 0;
    double min_expected = 10.0;
};

struct Context {
    McSection mc;
    GridPolicy grid;
    std::vector<double> u_grid;
    std::shared_ptr<std::vector<std::string>> notes = std::make_shared<std::vector<std::string>>();
};

McSection parse_mc(Section s, const RunOverrides& ov) {
    McSection m;
    m.mc.n_reps = s.count("n_reps", 10000);
    m.mc.seed = s.count("seed", 0);
    m.mc.workers = static_cast<unsigned>(s.count("workers", 1));
    m.mc.confidence = s.num("confidence", 0.95);
    m.pilot_reps = s.count("pilot_reps", 0);
    m.min_expected = s.num("min_expected_successes", 10.0);
    s.finish();
    if (ov.seed) m.mc.seed = *ov.seed;
    if (ov.workers) m.mc.workers = *ov.workers;
    if (m.mc.workers < 1) s.fail("workers", "must be at least 1");
    if (!(m.mc.confidence > 0.0 && m.mc.confidence < 1.0)) s.fail("confidence", "must lie in (0,1)");
    return m;
}

GridPolicy parse_grid(Section s) {
    GridPolicy g;
    g.step = s.num("step", g.step);
    g.min_points = s.count("min_points", g.min_points);
    g.max_points = s.count("max_points", g.max_points);
    s.finish();
    if (!(g.step > 0.0)) s.fail("step", "must be positive");
    if (g.min_points < 1 || g.max_points < g.min_points) s.fail("max_points", "need 1 <= min_points <= max_points");
    return g;
}

// Either "H" (with optional "weight") or "profile": [{"weight", "H"}, ...].
VarianceProfile parse_profile(Section& s) {
    if (s.has("H") == s.has("profile")) s.fail("give exactly one of H or profile");
    if (s.has("H")) {
        const double h = s.num("H");
        const double w = s.num("weight", 1.0);
        return at_path(s.path_of("H"), [&] { return VarianceProfile::fbm(h, w); });
    }
    std::vector<ProfileTerm> terms;
    for (auto& t : s.objs("profile")) {
        terms.push_back({t.num("weight", 1.0), t.num("H")});
        t.finish();
    }
    return at_path(s.path_of("profile"), [&] { return VarianceProfile(terms); });
}

PsiMode parse_psi(Section& s) {
    const auto v = s.str("psi", "exact");
    return at_path(s.path_of("psi"), [&] {
        try {
            return parse_psi_mode(v);
        } catch (const ConfigError& e) {
            throw DomainError(e.what());
        }
    });
}

DiekerOptions parse_dieker(Section& s) {
    DiekerOptions d;
    d.psi_mode = parse_psi(s);
    d.enable_case_iii = s.flag("enable_case_iii", true);
    return d;
}

PickandsMethod parse_method(Section& s) {
    const auto v = s.str("method", "tilted");
    if (v == "tilted") return PickandsMethod::Tilted;
    if (v == "direct") return PickandsMethod::Direct;
    s.fail("method", "expected tilted or direct");
}

// "pickands": {"mode": "estimate" | "fixed" | "brownian", ...}
PickandsProvider parse_pickands_provider(Section& parent, const Context& ctx) {
    if (!parent.has("pickands")) {
        PickandsOptions o;
        o.workers = ctx.mc.mc.workers;
        auto notes = ctx.notes;
        return estimated_pickands(o, PickandsCache::default_path(), [notes](const std::string& n) { notes->push_back(n); });
    }
    Section s = parent.obj("pickands");
    const auto mode = s.str("mode", "estimate");
    PickandsProvider p;
    if (mode == "brownian") {
        p = brownian_pickands();
    } else if (mode == "fixed") {
        std::vector<std::pair<double, double>> values;
        for (auto& v : s.objs("values")) {
            values.emplace_back(v.num("H"), v.num("value"));
            v.finish();
            if (!(values.back().second > 0.0)) v.fail("value", "must be positive");
        }
        p = fixed_pickands(values);
    } else if (mode == "estimate") {
        PickandsOptions o;
        o.t_max = s.num("t_max", o.t_max);
        o.delta = s.num("delta", o.delta);
        o.n_reps = s.count("n_reps", o.n_reps);
        o.seed = s.count("seed", 0);
        o.method = parse_method(s);
        o.workers = ctx.mc.mc.workers;
        const std::string cache = s.str("cache", PickandsCache::default_path().string());
        if (!(o.t_max >= 32.0)) s.fail("t_max", "must be at least 32");
        if (!(o.delta > 0.0 && o.delta <= 0.05)) s.fail("delta", "must lie in (0, 0.05]");
        if (o.n_reps < 1000) s.fail("n_reps", "must be at least 1000");
        auto notes = ctx.notes;
        p = estimated_pickands(o, cache.empty() ? std::nullopt : std::optional<std::filesystem::path>(cache),
                               [notes](const std::string& n) { notes->push_back(n); });
    } else {
        s.fail("mode", "expected estimate, fixed or brownian");
    }
    s.finish();
    return p;
}

RegVarSampler parse_horizon(Section s, std::size_t dim) {
    const double alpha = s.num("alpha");
    const double x0 = s.num("x0", 1.0);
    const auto norm_s = s.str("norm", "L1");
    const Norm norm = at_path(s.path_of("norm"), [&] {
        try {
            return parse_norm(norm_s);
        } catch (const ConfigError& e) {
            throw DomainError(e.what());
        }
    });
    const int kinds = s.has("atoms") + s.has("comonotone") + s.has("axes");
    if (kinds != 1) s.fail("give exactly one of atoms, comonotone or axes");
    RegVarSampler out{LimitingMeasure::axes(1, 1.0, Norm::L1), x0};
    if (s.has("atoms")) {
        std::vector<Atom> atoms;
        for (auto& a : s.objs("atoms")) {
            atoms.push_back({a.nums("direction"), a.num("weight", 1.0)});
            a.finish();
        }
        out.measure = at_path(s.path_of("atoms"), [&] { return LimitingMeasure(alpha, norm, atoms); });
    } else if (s.has("comonotone")) {
        const auto p = s.nums("comonotone");
        out.measure = at_path(s.path_of("comonotone"), [&] { return LimitingMeasure::comonotone(p, alpha, norm); });
    } else {
        const auto w = s.nums("axes");
        out.measure = at_path(s.path_of("axes"), [&] { return LimitingMeasure::axes(w.size(), alpha, norm, w); });
    }
    s.finish();
    if (out.measure.dim() != dim) s.fail("dimension does not match the number of coordinates");
    at_path(s.path(), [&] { out.validate(); });
    return out;
}

ProblemSpec parse_problem_spec(Section& s) {
    std::vector<DriftedProcessSpec> coords;
    for (auto& c : s.objs("coords")) {
        DriftedProcessSpec d{parse_profile(c), c.num("drift"), c.num("coefficient", 1.0)};
        c.finish();
        at_path(c.path(), [&] { d.validate(); });
        coords.push_back(std::move(d));
    }
    auto horizon = parse_horizon(s.obj("horizon"), coords.size());
    return at_path(s.path_of("coords"), [&] { return ProblemSpec(std::move(coords), std::move(horizon)); });
}

Theorem31Options parse_theorem31_options(Section& s, const Context& ctx) {
    Theorem31Options o;
    o.n_mc = s.count("n_mc", o.n_mc);
    o.xi_grid = s.count("xi_grid", o.xi_grid);
    o.seed = ctx.mc.mc.seed;
    o.workers = ctx.mc.mc.workers;
    o.dieker = parse_dieker(s);
    o.pickands = parse_pickands_provider(s, ctx);
    if (o.n_mc < 1000) s.fail("n_mc", "must be at least 1000");
    if (o.xi_grid < 16) s.fail("xi_grid", "must be at least 16");
    return o;
}

// The regen keys of the model: p, q, H, Htilde, lambda, x0, exp_rate, a, norm.
RegenSpec parse_regen_spec(Section& s) {
    RegenSpec r;
    r.p = s.pair("p");
    r.q = s.pair("q");
    if (s.has("H")) r.hurst = s.pair("H");
    if (s.has("Htilde")) r.hurst_tilde = s.pair("Htilde");
    r.lambda = s.num("lambda");
    r.x0 = s.num("x0", r.x0);
    r.exp_rate = s.num("exp_rate");
    r.a = s.has("a") ? s.pair("a") : Vec2{1.0, 1.0};
    const auto norm_s = s.str("norm", "L1");
    if (norm_s != "L1" && norm_s != "Lmax") s.fail("norm", "expected L1 or Lmax");
    r.norm = norm_s == "L1" ? Norm::L1 : Norm::Lmax;
    try {
        r.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(s.path() + ": " + e.what());
    }
    return r;
}

QOptions parse_walk(Section& s, const Context& ctx) {
    QOptions q;
    q.kappa = s.num("kappa", q.kappa);
    q.max_cycles = s.count("max_cycles", q.max_cycles);
    q.cycle.overflow_error = s.flag("overflow_error", false);
    q.cycle.grid = ctx.grid;
    q.workers = ctx.mc.mc.workers;
    q.confidence = ctx.mc.mc.confidence;
    if (!(q.kappa > 0.0)) s.fail("kappa", "must be positive");
    return q;
}

std::string join_flags(const std::vector<std::string>& flags) {
    std::string out;
    for (const auto& f : flags) out += (out.empty() ? "" : ";") + f;
    return out;
}

std::vector<double> parse_u_grid(Section& top, bool allow_zero) {
    const auto u = top.nums("u_grid");
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (!(allow_zero ? u[k] >= 0.0 : u[k] > 0.0)) top.fail("u_grid", "entries must be positive");
        if (k > 0 && !(u[k] > u[k - 1])) top.fail("u_grid", "must be strictly increasing");
    }
    return u;
}

// Rows of AsymptoticValue: u, value, std_error, regime, factors..., details..., flags.
Report asymptotic_report(const std::vector<AsymptoticValue>& values) {
    Report r;
    r.kind = "asym";
    std::vector<std::string> factors;
    std::vector<std::string> details;
    for (const auto& v : values) {
        for (const auto& f : v.factors)
            if (std::find(factors.begin(), factors.end(), f.name) == factors.end()) factors.push_back(f.name);
        for (const auto& d : v.details)
            if (std::find(details.begin(), details.end(), d.name) == details.end()) details.push_back(d.name);
    }
    r.columns = {"u", "value", "std_error", "regime"};
    r.columns.insert(r.columns.end(), factors.begin(), factors.end());
    r.columns.insert(r.columns.end(), details.begin(), details.end());
    r.columns.push_back("flags");
    for (const auto& v : values) {
        std::vector<Cell> row{v.u, v.value, v.std_error, v.regime};
        auto lookup = [](const std::vector<NamedValue>& xs, const std::string& name) -> Cell {
            for (const auto& x : xs)
                if (x.name == name) return x.value;
            return std::monostate{};
        };
        for (const auto& f : factors) row.push_back(lookup(v.factors, f));
        for (const auto& d : details) row.push_back(lookup(v.details, d));
        row.emplace_back(join_flags(v.flags));
        r.rows.push_back(std::move(row));
    }
    return r;
}

Report cmd_asym(Section& top, Context& ctx) {
    ctx.u_grid = parse_u_grid(top, false);
    Section m = top.obj("model");
    const auto type = m.str("type");
    std::vector<AsymptoticValue> values;
    if (type == "corollary") {
        const double h = m.num("H");
        const double c = m.num("c");
        const PsiMode psi = parse_psi(m);
        auto p = parse_pickands_provider(m, ctx);
        m.finish();
        if (!(h > 0.0 && h < 1.0)) m.fail("H", "must lie in (0,1)");
        if (!(c > 0.0)) m.fail("c", "must be positive");
        for (double u : ctx.u_grid) values.push_back(corollary_fbm_psi(h, c, u, p, psi));
    } else if (type == "dieker") {
        const auto profile = parse_profile(m);
        const double c = m.num("c");
        const auto d = parse_dieker(m);
        auto p = parse_pickands_provider(m, ctx);
        m.finish();
        if (!(c > 0.0)) m.fail("c", "must be positive");
        at_path(m.path(), [&] { return dieker_regime(profile); });
        for (double u : ctx.u_grid) values.push_back(dieker_psi(profile, c, u, p, d));
    } else if (type == "theorem31") {
        const auto spec = parse_problem_spec(m);
        const auto o = parse_theorem31_options(m, ctx);
        m.finish();
        if (spec.n_zero() > 0) {
            const auto nu = theorem31_nu_tilde(spec, o);
            for (double u : ctx.u_grid) values.push_back(theorem31_case_i(spec, u, nu, o));
        } else {
            for (double u : ctx.u_grid) values.push_back(theorem31_case_ii(spec, u, o));
        }
    } else if (type == "onedim") {
        OneDimParams p;
        const auto kind_s = m.str("drift_kind");
        const DriftKind kind = kind_s == "negative" ? DriftKind::Negative
                               : kind_s == "zero"   ? DriftKind::Zero
                               : kind_s == "positive"
                                   ? DriftKind::Positive
                                   : (m.fail("drift_kind", "expected negative, zero or positive"), DriftKind::Zero);
        p.profile = parse_profile(m);
        p.drift = m.num("drift", 0.0);
        p.alpha = m.num("alpha");
        p.x0 = m.num("x0", 1.0);
        p.n_mc = m.count("n_mc", p.n_mc);
        p.xi_grid = m.count("xi_grid", p.xi_grid);
        p.seed = ctx.mc.mc.seed;
        p.workers = ctx.mc.mc.workers;
        p.dieker = parse_dieker(m);
        p.pickands = parse_pickands_provider(m, ctx);
        m.finish();
        if (p.n_mc < 1000) m.fail("n_mc", "must be at least 1000");
        for (double u : ctx.u_grid) values.push_back(at_path(m.path(), [&] { return onedim_asymptotic(kind, p, u); }));
    } else if (type == "theorem42") {
        const auto spec = parse_regen_spec(m);
        m.finish();
        for (double u : ctx.u_grid) values.push_back(theorem42_Q(spec, u));
    } else if (type == "example33") {
        Example33Params p;
        const auto case_s = m.str("case");
        if (case_s != "positive" && case_s != "zero" && case_s != "negative")
            m.fail("case", "expected positive, zero or negative");
        const DriftKind kind = parse_drift_kind(case_s);
        p.alpha0 = m.num("alpha0");
        p.alphas = m.nums("alphas");
        p.c = m.nums("c");
        p.a = m.nums("a");
        p.horizon = m.num("horizon", 1.0);
        m.finish();
        Report r;
        r.kind = "asym";
        r.columns = {"u", "quantity", "value", "flags"};
        for (double u : ctx.u_grid) {
            const auto e = at_path(m.path(), [&] { return example33_asymptotic(kind, p, u); });
            r.rows.push_back({u, e.quantity, e.value, join_flags(e.flags)});
        }
        return r;
    } else {
        m.fail("type", "expected corollary, dieker, theorem31, onedim, theorem42 or example33");
    }
    return asymptotic_report(values);
}

Report cmd_compare(Section& top, Context& ctx) {
    ctx.u_grid = parse_u_grid(top, false);
    Section s = top.obj("problem");
    const auto type = s.str("type");
    std::unique_ptr<ComparisonProblem> problem;
    if (type == "horizon") {
        auto spec = parse_problem_spec(s);
        auto o = parse_theorem31_options(s, ctx);
        problem = std::make_unique<HorizonProblem>(std::move(spec), ctx.grid, std::move(o));
    } else if (type == "infinite") {
        auto profile = parse_profile(s);
        const double c = s.num("c");
        const auto f = s.str("formula", "dieker");
        if (f != "dieker" && f != "corollary") s.fail("formula", "expected dieker or corollary");
        const auto d = parse_dieker(s);
        auto p = parse_pickands_provider(s, ctx);
        if (!(c > 0.0)) s.fail("c", "must be positive");
        problem = at_path(s.path(), [&] {
            try {
                return std::make_unique<InfiniteHorizonProblem>(
                    profile, c, ctx.grid, p, d,
                    f == "dieker" ? InfiniteHorizonProblem::Formula::Dieker : InfiniteHorizonProblem::Formula::Corollary);
            } catch (const ConfigError& e) {
                throw DomainError(e.what());
            }
        });
    } else if (type == "regen") {
        const auto spec = parse_regen_spec(s);
        const auto q = parse_walk(s, ctx);
        problem = std::make_unique<RegenProblem>(spec, q);
    } else {
        s.fail("type", "expected horizon, infinite or regen");
    }
    s.finish();

    RatioOptions ro;
    ro.mc = ctx.mc.mc;
    ro.pilot_reps = ctx.mc.pilot_reps;
    ro.min_expected_successes = ctx.mc.min_expected;
    if (ro.mc.n_reps < 100) throw ConfigError("mc.n_reps: must be at least 100");
    const auto rows = ratio_table(*problem, ctx.u_grid, ro);

    Report r;
    r.kind = "compare";
    r.columns = {"u", "mc_estimate", "mc_half_width", "formula_value", "ratio", "ratio_lo", "ratio_hi", "flags"};
    const Cell none = std::monostate{};
    for (const auto& row : rows) {
        std::vector<Cell> cells{row.u};
        cells.push_back(row.mc ? Cell(row.mc->estimate) : none);
        cells.push_back(row.mc ? Cell(row.mc->half_width) : none);
        cells.push_back(row.formula ? Cell(row.formula->value) : none);
        if (row.has_ratio()) {
            cells.insert(cells.end(), {row.ratio, row.ratio_lo, row.ratio_hi});
        } else {
            cells.insert(cells.end(), {none, none, none});
        }
        cells.emplace_back(join_flags(row.flags));
        r.rows.push_back(std::move(cells));
    }
    return r;
}

Report cmd_pickands(Section& top, Context& ctx) {
    Section s = top.obj("pickands");
    const auto profile = parse_profile(s);
    PickandsOptions o;
    o.t_max = s.num("t_max", o.t_max);
    o.delta = s.num("delta", o.delta);
    o.method = parse_method(s);
    o.n_reps = ctx.mc.mc.n_reps;
    o.seed = ctx.mc.mc.seed;
    o.workers = ctx.mc.mc.workers;
    const std::string cache_path = s.str("cache", PickandsCache::default_path().string());
    s.finish();
    if (!(o.t_max >= 32.0)) s.fail("t_max", "must be at least 32");
    if (!(o.delta > 0.0 && o.delta <= 0.05)) s.fail("delta", "must lie in (0, 0.05]");
    if (o.n_reps < 1000) throw ConfigError("mc.n_reps: must be at least 1000");

    std::optional<PickandsCache> cache;
    if (!cache_path.empty()) cache.emplace(cache_path);
    const auto e = cached_pickands_estimate(profile, o, cache ? &*cache : nullptr);
    const std::string key = profile_key(profile);
    if (cache)
        ctx.notes->push_back("pickands " + key + ": " + (e.from_cache ? "cache hit" : "cache miss, stored") + " (" +
                             cache_path + ")");
    Report r;
    r.kind = "pickands";
    r.columns = {"profile", "t_max", "delta", "n_reps", "seed", "method", "estimate", "std_error"};
    r.rows.push_back({key, o.t_max, o.delta, static_cast<std::int64_t>(o.n_reps), std::to_string(o.seed),
                      to_string(o.method), e.estimate, e.std_error});
    return r;
}

Report cmd_regen(Section& top, Context& ctx) {
    ctx.u_grid = parse_u_grid(top, true);
    Section s = top.obj("regen");
    const auto spec = parse_regen_spec(s);
    const auto q = parse_walk(s, ctx);
    s.finish();
    if (ctx.mc.mc.n_reps < 1000) throw ConfigError("mc.n_reps: must be at least 1000");

    Report r;
    r.kind = "regen";
    r.columns = {"u",           "estimate",     "half_width",   "n_success", "n_paths",
                 "formula_value", "integral_mu", "abandon_bias", "truncated", "flags"};
    for (std::size_t k = 0; k < ctx.u_grid.size(); ++k) {
        const double u = ctx.u_grid[k];
        const auto est = estimate_Q(spec, u, ctx.mc.mc.n_reps, stream_seed(ctx.mc.mc.seed, k), q);
        std::vector<Cell> row{u, est.report.estimate, est.report.half_width,
                              static_cast<std::int64_t>(est.report.n_success),
                              static_cast<std::int64_t>(est.report.n_reps)};
        if (u > 0.0) {
            const auto f = theorem42_Q(spec, u);
            row.insert(row.end(), {f.value, f.factor("integral_mu"), est.abandon_bias});
        } else {
            row.insert(row.end(), {std::monostate{}, std::monostate{}, std::monostate{}});
        }
        row.emplace_back(static_cast<std::int64_t>(est.truncated));
        row.emplace_back(join_flags(est.report.flags));
        r.rows.push_back(std::move(row));
    }
    return r;
}

Report cmd_simulate(Section& top, Context& ctx) {
    Section s = top.obj("simulate");
    const auto profile = parse_profile(s);
    const double horizon = s.num("horizon");
    const auto n = s.count("n");
    const auto n_paths = s.count("n_paths", 1);
    const double drift = s.num("drift", 0.0);
    s.finish();
    if (!(horizon > 0.0)) s.fail("horizon", "must be positive");
    if (n < 1 || n > (std::uint64_t{1} << 22)) s.fail("n", "must lie in [1, 2^22]");
    if (n_paths < 1 || n_paths * (n + 1) > (std::uint64_t{1} << 24)) s.fail("n_paths", "output would exceed 2^24 rows");

    Report r;
    r.kind = "simulate";
    r.columns = {"path", "t", "value"};
    for (std::uint64_t i = 0; i < n_paths; ++i) {
        Rng rng = make_rng(ctx.mc.mc.seed, i);
        const auto path = sample_sum_path(profile, horizon, n, rng);
        for (std::size_t k = 0; k < path.size(); ++k) {
            const double t = path.step * static_cast<double>(k);
            r.rows.push_back({static_cast<std::int64_t>(i), t, path.values[k] + drift * t});
        }
    }
    return r;
}

}  // namespace

RunResult run_experiment(const std::string& config_text, const RunOverrides& overrides) {
    json doc;
    try {
        doc = json::parse(config_text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    Section top(doc, "");
    const auto kind = top.str("kind");
    const std::map<std::string, std::set<std::string>> sections{{"asym", {"u_grid", "model"}},
                                                                {"compare", {"u_grid", "problem"}},
                                                                {"pickands", {"pickands"}},
                                                                {"regen", {"u_grid", "regen"}},
                                                                {"simulate", {"simulate"}}};
    if (overrides.kind && *overrides.kind != kind)
        top.fail("kind", "config is for '" + kind + "', not '" + *overrides.kind + "'");
    const auto allowed = sections.find(kind);
    if (allowed == sections.end()) top.fail("kind", "expected asym, simulate, compare, pickands or regen");
    for (const auto& item : doc.items()) {
        const auto& k = item.key();
        if (k != "kind" && k != "mc" && k != "grid" && k != "output" && !allowed->second.count(k))
            top.fail(k, "unknown key for kind " + kind);
    }

    Context ctx;
    ctx.mc = top.has("mc") ? parse_mc(top.obj("mc"), overrides) : parse_mc(Section(json::object(), "mc"), overrides);
    if (top.has("grid")) ctx.grid = parse_grid(top.obj("grid"));

    RunResult result;
    if (top.has("output")) {
        Section o = top.obj("output");
        result.output.path = o.str("path", "");
        result.output.format = parse_report_format(o.str("format", "csv"));
        o.finish();
    }
    if (overrides.out_path) result.output.path = *overrides.out_path;
    if (overrides.format) result.output.format = parse_report_format(*overrides.format);

    Report report;
    if (kind == "asym") {
        report = cmd_asym(top, ctx);
    } else if (kind == "compare") {
        report = cmd_compare(top, ctx);
    } else if (kind == "pickands") {
        report = cmd_pickands(top, ctx);
    } else if (kind == "regen") {
        report = cmd_regen(top, ctx);
    } else {
        report = cmd_simulate(top, ctx);
    }
    report.notes = *ctx.notes;
    result.report = std::move(report);
    return result;
}

}  // namespace gx
