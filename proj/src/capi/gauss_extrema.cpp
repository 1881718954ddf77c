#include "gauss_extrema/gauss_extrema.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gauss_extrema/app.hpp"
#include "gauss_extrema/asymptotics.hpp"
#include "gauss_extrema/errors.hpp"
#include "gauss_extrema/format.hpp"
#include "gauss_extrema/pickands.hpp"
#include "gauss_extrema/regenerative.hpp"

struct gx_context {
    std::string last_error;
};

struct gx_report {
    gx::RunResult result;
    std::vector<std::vector<std::string>> text;
    std::string rendered;
    std::string format;
};

namespace {

template <class F>
gx_status guarded(gx_context* ctx, F&& f) {
    if (ctx == nullptr) return GX_ERR_ARGUMENT;
    ctx->last_error.clear();
    try {
        f();
        return GX_OK;
    } catch (const gx::ConfigError& e) {
        ctx->last_error = e.what();
        return GX_ERR_CONFIG;
    } catch (const gx::InfeasibleError& e) {
        ctx->last_error = e.what();
        return GX_ERR_INFEASIBLE;
    } catch (const gx::DomainError& e) {
        ctx->last_error = e.what();
        return GX_ERR_DOMAIN;
    } catch (const std::ios_base::failure& e) {
        ctx->last_error = e.what();
        return GX_ERR_IO;
    } catch (const std::exception& e) {
        ctx->last_error = e.what();
        return GX_ERR_INTERNAL;
    } catch (...) {
        ctx->last_error = "unknown error";
        return GX_ERR_INTERNAL;
    }
}

gx::RunOverrides to_overrides(const gx_overrides* ov) {
    gx::RunOverrides o;
    if (ov == nullptr) return o;
    if (ov->kind != nullptr) o.kind = ov->kind;
    if (ov->has_seed) o.seed = ov->seed;
    if (ov->has_workers) o.workers = ov->workers;
    if (ov->out_path != nullptr) o.out_path = ov->out_path;
    if (ov->format != nullptr) o.format = ov->format;
    return o;
}

gx_report* make_report(gx::RunResult result) {
    auto* r = new gx_report{std::move(result), {}, {}, {}};
    const auto& rep = r->result.report;
    for (const auto& row : rep.rows) {
        std::vector<std::string> cells;
        for (const auto& c : row) cells.push_back(gx::format_cell(c));
        r->text.push_back(std::move(cells));
    }
    r->rendered = gx::render(rep, r->result.output.format);
    r->format = r->result.output.format == gx::ReportFormat::Csv ? "csv" : "json";
    return r;
}

template <class F>
gx_status numeric(gx_context* ctx, double* out, F&& f) {
    if (out == nullptr) return ctx ? (ctx->last_error = "null output pointer", GX_ERR_ARGUMENT) : GX_ERR_ARGUMENT;
    return guarded(ctx, [&] { *out = f(); });
}

}  // namespace

extern "C" {

const char* gx_version(void) { return "1.0.0"; }

const char* gx_status_name(gx_status s) {
    switch (s) {
        case GX_OK: return "ok";
        case GX_ERR_INTERNAL: return "internal error";
        case GX_ERR_CONFIG: return "config error";
        case GX_ERR_INFEASIBLE: return "infeasible";
        case GX_ERR_DOMAIN: return "domain error";
        case GX_ERR_ARGUMENT: return "invalid argument";
        case GX_ERR_IO: return "i/o error";
    }
    return "unknown status";
}

gx_status gx_context_create(gx_context** out) {
    if (out == nullptr) return GX_ERR_ARGUMENT;
    *out = new gx_context{};
    return GX_OK;
}

void gx_context_destroy(gx_context* ctx) { delete ctx; }

const char* gx_last_error(const gx_context* ctx) { return ctx ? ctx->last_error.c_str() : "null context"; }

gx_status gx_run_config_text(gx_context* ctx, const char* json_text, const gx_overrides* ov, gx_report** out) {
    if (json_text == nullptr || out == nullptr) return ctx ? (ctx->last_error = "null argument", GX_ERR_ARGUMENT) : GX_ERR_ARGUMENT;
    *out = nullptr;
    return guarded(ctx, [&] { *out = make_report(gx::run_experiment(json_text, to_overrides(ov))); });
}

gx_status gx_run_config_file(gx_context* ctx, const char* path, const gx_overrides* ov, gx_report** out) {
    if (path == nullptr || out == nullptr) return ctx ? (ctx->last_error = "null argument", GX_ERR_ARGUMENT) : GX_ERR_ARGUMENT;
    *out = nullptr;
    std::ifstream in(path);
    if (!in) {
        if (ctx) ctx->last_error = std::string("cannot read config file ") + path;
        return GX_ERR_CONFIG;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    return gx_run_config_text(ctx, text.c_str(), ov, out);
}

void gx_report_destroy(gx_report* r) { delete r; }

size_t gx_report_rows(const gx_report* r) { return r ? r->result.report.rows.size() : 0; }

size_t gx_report_columns(const gx_report* r) { return r ? r->result.report.columns.size() : 0; }

const char* gx_report_column_name(const gx_report* r, size_t col) {
    if (r == nullptr || col >= r->result.report.columns.size()) return nullptr;
    return r->result.report.columns[col].c_str();
}

gx_status gx_report_value(const gx_report* r, size_t row, size_t col, double* out) {
    if (r == nullptr || out == nullptr) return GX_ERR_ARGUMENT;
    const auto& rows = r->result.report.rows;
    if (row >= rows.size() || col >= rows[row].size()) return GX_ERR_DOMAIN;
    const auto& c = rows[row][col];
    if (std::holds_alternative<double>(c)) {
        *out = std::get<double>(c);
    } else if (std::holds_alternative<std::int64_t>(c)) {
        *out = static_cast<double>(std::get<std::int64_t>(c));
    } else {
        return GX_ERR_DOMAIN;
    }
    return GX_OK;
}

const char* gx_report_text(const gx_report* r, size_t row, size_t col) {
    if (r == nullptr || row >= r->text.size() || col >= r->text[row].size()) return nullptr;
    return r->text[row][col].c_str();
}

size_t gx_report_note_count(const gx_report* r) { return r ? r->result.report.notes.size() : 0; }

const char* gx_report_note(const gx_report* r, size_t i) {
    if (r == nullptr || i >= r->result.report.notes.size()) return nullptr;
    return r->result.report.notes[i].c_str();
}

const char* gx_report_out_path(const gx_report* r) { return r ? r->result.output.path.c_str() : nullptr; }

const char* gx_report_format(const gx_report* r) { return r ? r->format.c_str() : nullptr; }

const char* gx_report_render(const gx_report* r) { return r ? r->rendered.c_str() : nullptr; }

gx_status gx_report_write(gx_context* ctx, const gx_report* r, const char* path) {
    if (r == nullptr) return ctx ? (ctx->last_error = "null report", GX_ERR_ARGUMENT) : GX_ERR_ARGUMENT;
    const std::string target = path != nullptr && *path != '\0' ? path : r->result.output.path;
    return guarded(ctx, [&] {
        if (target.empty()) throw gx::ConfigError("no output path given");
        std::ofstream out(target, std::ios::binary);
        if (!out) throw std::ios_base::failure("cannot open " + target + " for writing");
        out << r->rendered;
        if (!out) throw std::ios_base::failure("write to " + target + " failed");
    });
}

gx_status gx_fbm_covariance(gx_context* ctx, double t, double s, double hurst, double* out) {
    return numeric(ctx, out, [&] { return gx::fbm_covariance(t, s, hurst); });
}

gx_status gx_psi_normal_survival(gx_context* ctx, double u, double* out) {
    return numeric(ctx, out, [&] { return gx::psi_normal_survival(u); });
}

gx_status gx_constant_C(gx_context* ctx, double hurst, double lambda1, double lambda2, double* out) {
    return numeric(ctx, out, [&] { return gx::constant_C(hurst, lambda1, lambda2); });
}

gx_status gx_corollary_psi(gx_context* ctx, double hurst, double c, double u, double pickands, int asymptotic_psi,
                           double* out) {
    return numeric(ctx, out, [&] {
        return gx::corollary_fbm_psi(hurst, c, u, gx::PickandsValue{pickands, 0.0},
                                     asymptotic_psi ? gx::PsiMode::Asymptotic : gx::PsiMode::Exact)
            .value;
    });
}

gx_status gx_stable_tail_constant(gx_context* ctx, double alpha, double t, double* out) {
    return numeric(ctx, out, [&] { return gx::stable_tail_constant(alpha, t); });
}

gx_status gx_integral_mu_comonotone(gx_context* ctx, const double p[2], const double c[2], const double a[2],
                                    double lambda, int norm, double* out) {
    if (p == nullptr || c == nullptr || a == nullptr) return ctx ? (ctx->last_error = "null argument", GX_ERR_ARGUMENT) : GX_ERR_ARGUMENT;
    return numeric(ctx, out, [&] {
        if (norm != 0 && norm != 1) throw gx::DomainError("norm must be 0 (L1) or 1 (max)");
        const auto mu = gx::LimitingMeasure::comonotone({p[0], p[1]}, lambda, norm == 0 ? gx::Norm::L1 : gx::Norm::Lmax);
        const std::vector<double> cv{c[0], c[1]};
        const std::vector<double> av{a[0], a[1]};
        return gx::integral_mu(mu, cv, av).value;
    });
}

gx_status gx_pickands_estimate(gx_context* ctx, double hurst, double t_max, double delta, uint64_t n_reps,
                               uint64_t seed, unsigned workers, double* estimate, double* std_error) {
    if (estimate == nullptr || std_error == nullptr) return ctx ? (ctx->last_error = "null output pointer", GX_ERR_ARGUMENT) : GX_ERR_ARGUMENT;
    return guarded(ctx, [&] {
        gx::PickandsOptions o;
        o.t_max = t_max;
        o.delta = delta;
        o.n_reps = n_reps;
        o.seed = seed;
        o.workers = workers == 0 ? 1 : workers;
        const auto e = gx::pickands_estimate(hurst, o);
        *estimate = e.estimate;
        *std_error = e.std_error;
    });
}

}  // extern "C"
