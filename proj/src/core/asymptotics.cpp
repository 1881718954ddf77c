#include "gauss_extrema/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gauss_extrema/errors.hpp"
#include "gauss_extrema/format.hpp"

namespace gx {

double psi_normal_survival(double u) { return 0.5 * std::erfc(u / std::numbers::sqrt2); }

double psi_tail_equivalent(double u) {
    if (!(u > 0.0)) throw DomainError("tail equivalent of the normal survival needs u > 0");
    return std::exp(-0.5 * u * u) / (std::sqrt(2.0 * std::numbers::pi) * u);
}

std::string to_string(PsiMode m) { return m == PsiMode::Exact ? "exact" : "asymptotic"; }

PsiMode parse_psi_mode(const std::string& s) {
    if (s == "exact") return PsiMode::Exact;
    if (s == "asymptotic") return PsiMode::Asymptotic;
    throw ConfigError("unknown psi mode '" + s + "' (expected exact or asymptotic)");
}

double psi_eval(double u, PsiMode mode) {
    return mode == PsiMode::Exact ? psi_normal_survival(u) : psi_tail_equivalent(u);
}

double constant_C(double h, double l1, double l2) {
    if (!(h > 0.0 && h < 1.0)) throw DomainError("constant_C needs H in (0,1)");
    if (!(l1 > 0.0)) throw DomainError("constant_C needs lambda1 > 0");
    if (!(l2 > 0.0 && l2 <= 1.0)) throw DomainError("constant_C needs lambda2 in (0,1]");
    const double expo = l1 + h - 0.5 + (1.0 - h) / l2;
    return std::sqrt(std::pow(2.0, 1.0 - 1.0 / l2) * std::numbers::pi) * l1 * std::pow(1.0 / h, 1.0 / l2) *
           std::pow(h / (1.0 - h), expo);
}

double AsymptoticValue::factor_product() const {
    double p = 1.0;
    for (const auto& f : factors) p *= f.value;
    return p;
}

namespace {
double find_named(const std::vector<NamedValue>& v, const std::string& name) {
    for (const auto& f : v)
        if (f.name == name) return f.value;
    throw std::out_of_range("no entry named " + name);
}
}  // namespace

double AsymptoticValue::factor(const std::string& name) const { return find_named(factors, name); }
double AsymptoticValue::detail(const std::string& name) const { return find_named(details, name); }
bool AsymptoticValue::has_flag(const std::string& f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

namespace {

AsymptoticValue finish(double u, std::string regime, std::vector<NamedValue> factors) {
    AsymptoticValue v;
    v.u = u;
    v.regime = std::move(regime);
    v.factors = std::move(factors);
    v.value = v.factor_product();
    return v;
}

}  // namespace

FuMinimum fu_minimizer(const VarianceProfile& profile, double c, double u) {
    if (!(u > 0.0)) throw DomainError("fu_minimizer needs u > 0");
    if (!(c > 0.0)) throw DomainError("fu_minimizer needs c > 0");
    auto log_f = [&](double t) { return std::log(u) + std::log1p(t) - std::log(profile.sigma(u * t / c)); };
    // Sign of d/dt log f_u.
    auto slope = [&](double t) { return t / (1.0 + t) - profile.local_index(u * t / c); };

    double h_max = 0.0;
    double h_min = 1.0;
    for (const auto& term : profile.terms()) {
        h_max = std::max(h_max, term.hurst);
        h_min = std::min(h_min, term.hurst);
    }
    double hi = 4.0 * h_max / (1.0 - h_max);
    double lo = 0.5 * h_min / (1.0 - h_min);
    int expansions = 0;
    while (!(slope(hi) > 0.0)) {
        hi *= 2.0;
        if (++expansions > 200 || !std::isfinite(hi))
            throw InfeasibleError("fu_minimizer: no upper bracket found (u=" + format_double(u) +
                                  ", c=" + format_double(c) + ", last t=" + format_double(hi) + ")");
    }
    expansions = 0;
    while (!(slope(lo) < 0.0)) {
        lo *= 0.5;
        if (++expansions > 200 || !(lo > 0.0))
            throw InfeasibleError("fu_minimizer: no lower bracket found (u=" + format_double(u) +
                                  ", c=" + format_double(c) + ", last t=" + format_double(lo) + ")");
    }

    // Golden section on log f_u.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = log_f(x1);
    double f2 = log_f(x2);
    while (b - a > 1e-10 * std::max(1.0, b)) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = log_f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = log_f(x2);
        }
    }
    // Polish on the stationarity condition, which is far better conditioned
    // than the flat minimum itself.
    double t = 0.5 * (a + b);
    double pa = a;
    double pb = b;
    for (double w = 1e-8 * std::max(1.0, b); slope(pa) >= 0.0 && pa > lo; w *= 4.0) pa = std::max(lo, a - w);
    for (double w = 1e-8 * std::max(1.0, b); slope(pb) <= 0.0 && pb < hi; w *= 4.0) pb = std::min(hi, b + w);
    if (slope(pa) < 0.0 && slope(pb) > 0.0) {
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (pa + pb);
            if (mid <= pa || mid >= pb) break;
            if (slope(mid) < 0.0)
                pa = mid;
            else
                pb = mid;
        }
        t = 0.5 * (pa + pb);
    }
    return {t, std::exp(log_f(t))};
}

std::string to_string(DiekerRegime r) {
    switch (r) {
        case DiekerRegime::I:
            return "i";
        case DiekerRegime::II:
            return "ii";
        case DiekerRegime::III:
            return "iii";
    }
    return "?";
}

DiekerRegime dieker_regime(const VarianceProfile& profile) {
    const double h = profile.index_at_infinity();
    if (h == 0.5) return DiekerRegime::II;
    if (std::abs(2.0 * h - 1.0) < 1e-9)
        throw DomainError("ambiguous regime: index at infinity " + format_double(h) +
                          " is numerically but not exactly 1/2 for profile " + profile.describe());
    return h > 0.5 ? DiekerRegime::I : DiekerRegime::III;
}

AsymptoticValue dieker_psi(const VarianceProfile& profile, double rate, double u, const PickandsProvider& pickands,
                           const DiekerOptions& opts) {
    if (!(rate > 0.0)) throw DomainError("dieker_psi needs a negative drift (rate |c| > 0)");
    if (!(u > 0.0)) throw DomainError("dieker_psi needs u > 0");
    if (!pickands) throw ConfigError("dieker_psi needs a Pickands constant source");
    const double c = rate;
    const double h = profile.index_at_infinity();
    const DiekerRegime regime = dieker_regime(profile);
    const FuMinimum fmin = fu_minimizer(profile, c, u);
    const double psi = psi_eval(fmin.value, opts.psi_mode);
    const double sigma_u = profile.sigma(u);

    std::vector<NamedValue> factors;
    PickandsValue pk;
    std::vector<std::string> flags;
    switch (regime) {
        case DiekerRegime::I: {
            pk = pickands(VarianceProfile::fbm(h));
            const double k = constant_C(h, 1.0, h) * ((1.0 - h) / h) * std::pow(c, 1.0 - h);
            const double ratio = sigma_u / sigma_inverse(profile, profile.variance(u) / u);
            factors = {{"pickands", pk.value}, {"constant", k}, {"sigma_ratio", ratio}, {"psi", psi}};
            break;
        }
        case DiekerRegime::II: {
            const double g = profile.leading_weight();
            pk = pickands(profile.scaled(2.0 * c * c / (g * g)));
            const double k = std::sqrt(std::numbers::pi / 2.0) / (std::pow(c, 1.0 + h) * h);
            factors = {{"pickands", pk.value}, {"constant", k}, {"sigma", sigma_u}, {"psi", psi}};
            break;
        }
        case DiekerRegime::III: {
            if (!opts.enable_case_iii) throw InfeasibleError("regime (iii) evaluation is disabled by configuration");
            const double lam = profile.index_at_zero();
            pk = pickands(VarianceProfile::fbm(lam));
            const double k = constant_C(h, 1.0, lam) * std::pow((1.0 - h) / h, h / lam) *
                             std::pow(c, -1.0 - h + 2.0 * h / lam);
            const double ratio = sigma_u / sigma_inverse(profile, profile.variance(u) / u);
            factors = {{"pickands", pk.value}, {"constant", k}, {"sigma_ratio", ratio}, {"psi", psi}};
            flags.emplace_back("as-printed");
            break;
        }
    }
    AsymptoticValue v = finish(u, to_string(regime), std::move(factors));
    v.details = {{"psi_argument", fmin.value}, {"t_star", fmin.t_star}};
    v.flags = std::move(flags);
    if (pk.value > 0.0) v.std_error = v.value * pk.std_error / pk.value;
    return v;
}

double corollary_constant_K(double h, double c) {
    if (!(h > 0.0 && h < 1.0)) throw DomainError("K_H needs H in (0,1)");
    if (!(c > 0.0)) throw DomainError("K_H needs c > 0");
    const double base = std::pow(c, h) / (std::pow(h, h) * std::pow(1.0 - h, 1.0 - h));
    return std::pow(2.0, 0.5 - 0.5 / h) * std::sqrt(std::numbers::pi) / std::sqrt(h * (1.0 - h)) *
           std::pow(base, 1.0 / h - 1.0);
}

AsymptoticValue corollary_fbm_psi(double h, double c, double u, PickandsValue pickands, PsiMode mode) {
    if (!(u > 0.0)) throw DomainError("corollary_fbm_psi needs u > 0");
    const double k = corollary_constant_K(h, c);
    const double arg = std::pow(c, h) * std::pow(u, 1.0 - h) / (std::pow(h, h) * std::pow(1.0 - h, 1.0 - h));
    AsymptoticValue v = finish(u, to_string(dieker_regime(VarianceProfile::fbm(h))),
                               {{"constant", k},
                                {"pickands", pickands.value},
                                {"u_power", std::pow(u, h + 1.0 / h - 2.0)},
                                {"psi", psi_eval(arg, mode)}});
    v.details = {{"psi_argument", arg}, {"t_star", h / (1.0 - h)}};
    if (pickands.value > 0.0) v.std_error = v.value * pickands.std_error / pickands.value;
    return v;
}

AsymptoticValue corollary_fbm_psi(double h, double c, double u, const PickandsProvider& pickands, PsiMode mode) {
    if (!pickands) throw ConfigError("corollary_fbm_psi needs a Pickands constant source");
    return corollary_fbm_psi(h, c, u, pickands(VarianceProfile::fbm(h)), mode);
}

void DriftedProcessSpec::validate() const {
    if (!(coefficient > 0.0) || !std::isfinite(coefficient)) throw ConfigError("coefficient a must be positive");
    if (!std::isfinite(drift)) throw ConfigError("drift must be finite");
}

ProblemSpec::ProblemSpec(std::vector<DriftedProcessSpec> coords, RegVarSampler horizon)
    : coords_(std::move(coords)), horizon_(std::move(horizon)) {
    if (coords_.empty()) throw ConfigError("problem needs at least one coordinate");
    horizon_.validate();
    if (horizon_.measure.dim() != coords_.size())
        throw ConfigError("horizon dimension " + std::to_string(horizon_.measure.dim()) +
                          " does not match the number of coordinates " + std::to_string(coords_.size()));
    int prev = -1;
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        coords_[i].validate();
        const int s = coords_[i].sign();
        if (s < prev)
            throw ConfigError("coordinates must be ordered by drift sign (negative, zero, positive); coordinate " +
                              std::to_string(i) + " is out of order");
        prev = s;
        if (s < 0) ++n_neg_;
        else if (s == 0) ++n_zero_;
        else ++n_pos_;
    }
    if (n_zero_ > 0) {
        const auto& ref = coords_[n_neg_].profile;
        leading_hurst_ = ref.index_at_infinity();
        for (std::size_t i = n_neg_; i < n_neg_ + n_zero_; ++i) {
            const auto& p = coords_[i].profile;
            const double h = p.index_at_infinity();
            if (h > leading_hurst_)
                throw ConfigError("zero-drift coordinate " + std::to_string(i) +
                                  " has a larger index at infinity than the first zero-drift coordinate; reorder so "
                                  "the leading group comes first");
            if (h == leading_hurst_) {
                if (i != n_neg_ + k_.size())
                    throw ConfigError("zero-drift coordinates with the leading index must be contiguous");
                k_.push_back(std::pow(ref.leading_weight() / p.leading_weight(), 1.0 / (2.0 * leading_hurst_)));
            }
        }
    }
}

namespace {

PickandsProvider require_pickands(const PickandsProvider& p) {
    if (!p) throw ConfigError("negative-drift coordinates need a Pickands constant source");
    return p;
}

// prod_{negative i} psi_i(a_i u) with its relative variance.
void negative_product(const ProblemSpec& spec, double u, const Theorem31Options& opts, AsymptoticValue& v,
                      double& rel_var) {
    for (std::size_t i = 0; i < spec.n_negative(); ++i) {
        const auto& c = spec.coords()[i];
        const auto psi = dieker_psi(c.profile, -c.drift, c.coefficient * u, require_pickands(opts.pickands), opts.dieker);
        v.factors.push_back({"psi_" + std::to_string(i), psi.value});
        if (psi.value > 0.0) rel_var += std::pow(psi.std_error / psi.value, 2);
        for (const auto& f : psi.flags)
            if (!v.has_flag(f)) v.flags.push_back(f);
    }
}

}  // namespace

TransformedTail theorem31_nu_tilde(const ProblemSpec& spec, const Theorem31Options& opts) {
    if (spec.n_zero() == 0) throw DomainError("nu_tilde factor needs at least one zero-drift coordinate");
    const std::size_t n = spec.dim();
    std::vector<double> corner(n, 0.0);
    std::vector<double> hurst(n, 0.5);
    const double hl = spec.leading_hurst();
    for (std::size_t j = 0; j < spec.leading_group_size(); ++j) {
        const std::size_t i = spec.n_negative() + j;
        corner[i] = spec.matching_constants()[j] * std::pow(spec.coords()[i].coefficient, 1.0 / hl);
    }
    for (std::size_t i = 0; i < n; ++i) hurst[i] = spec.coords()[i].profile.index_at_infinity();
    return tilde_tail_measure(spec.horizon().measure, hurst, corner, opts.n_mc, opts.seed, opts.xi_grid, opts.workers);
}

AsymptoticValue theorem31_case_i(const ProblemSpec& spec, double u, const TransformedTail& nu_tilde,
                                 const Theorem31Options& opts) {
    if (spec.n_zero() == 0) throw DomainError("case (i) needs a zero-drift coordinate; use case (ii)");
    if (!(u > 0.0)) throw DomainError("u must be positive");
    const auto& ref = spec.coords()[spec.n_negative()].profile;
    const double x = sigma_inverse(ref, u);
    AsymptoticValue v;
    v.u = u;
    v.regime = "theorem31_i";
    v.factors = {{"nu_tilde", nu_tilde.report.estimate}, {"horizon_tail", spec.horizon().radial_tail(x)}};
    double rel_var = 0.0;
    if (nu_tilde.report.estimate > 0.0) rel_var += std::pow(nu_tilde.report.std_error / nu_tilde.report.estimate, 2);
    negative_product(spec, u, opts, v, rel_var);
    v.value = v.factor_product();
    v.std_error = v.value * std::sqrt(rel_var);
    v.details = {{"sigma_inverse", x}, {"nu_tilde_se", nu_tilde.report.std_error}};
    if (nu_tilde.moment_unstable) v.flags.emplace_back("moment_unstable");
    return v;
}

AsymptoticValue theorem31_case_i(const ProblemSpec& spec, double u, const Theorem31Options& opts) {
    return theorem31_case_i(spec, u, theorem31_nu_tilde(spec, opts), opts);
}

std::vector<double> theorem31_corner_ii(const ProblemSpec& spec) {
    if (spec.n_zero() != 0)
        throw DomainError("case (ii) needs all drifts nonzero; a zero drift belongs to case (i)");
    std::vector<double> corner(spec.dim());
    for (std::size_t i = 0; i < spec.dim(); ++i) {
        const auto& c = spec.coords()[i];
        if (c.drift < 0.0) {
            const double h = c.profile.index_at_infinity();
            corner[i] = c.coefficient * (h / (1.0 - h)) / (-c.drift);
        } else {
            corner[i] = c.coefficient / c.drift;
        }
    }
    return corner;
}

AsymptoticValue theorem31_case_ii(const ProblemSpec& spec, double u, const Theorem31Options& opts) {
    if (!(u > 0.0)) throw DomainError("u must be positive");
    const auto corner = theorem31_corner_ii(spec);
    AsymptoticValue v;
    v.u = u;
    v.regime = "theorem31_ii";
    v.factors = {{"rect_tail", spec.horizon().measure.rect_tail(corner)},
                 {"horizon_tail", spec.horizon().radial_tail(u)}};
    double rel_var = 0.0;
    negative_product(spec, u, opts, v, rel_var);
    v.value = v.factor_product();
    v.std_error = v.value * std::sqrt(rel_var);
    for (std::size_t i = 0; i < corner.size(); ++i) v.details.push_back({"corner_" + std::to_string(i), corner[i]});
    return v;
}

std::string to_string(DriftKind k) {
    switch (k) {
        case DriftKind::Negative:
            return "negative";
        case DriftKind::Zero:
            return "zero";
        case DriftKind::Positive:
            return "positive";
    }
    return "?";
}

DriftKind parse_drift_kind(const std::string& s) {
    if (s == "negative") return DriftKind::Negative;
    if (s == "zero") return DriftKind::Zero;
    if (s == "positive") return DriftKind::Positive;
    throw ConfigError("unknown drift kind '" + s + "' (expected negative, zero or positive)");
}

AsymptoticValue onedim_asymptotic(DriftKind kind, const OneDimParams& p, double u) {
    if (!(u > 0.0)) throw DomainError("u must be positive");
    if (!(p.alpha > 0.0) || !(p.x0 > 0.0)) throw ConfigError("horizon needs alpha > 0 and x0 > 0");
    const int expected = kind == DriftKind::Negative ? -1 : (kind == DriftKind::Zero ? 0 : 1);
    const int sign = p.drift < 0.0 ? -1 : (p.drift > 0.0 ? 1 : 0);
    if (sign != expected)
        throw ConfigError("drift " + format_double(p.drift) + " does not match drift kind " + to_string(kind));
    auto tail = [&](double x) { return x <= p.x0 ? 1.0 : std::pow(x / p.x0, -p.alpha); };
    const double h = p.profile.index_at_infinity();
    AsymptoticValue v;
    v.u = u;
    v.regime = "onedim_" + to_string(kind);
    switch (kind) {
        case DriftKind::Zero: {
            XiSampler xs{{h}, p.xi_grid};
            const double order = p.alpha / h;
            McOptions mc{p.n_mc, p.seed, p.workers, 0.95};
            const auto rep = run_mean_mc(
                [&](Rng& rng, std::uint64_t) {
                    double xi = 0.0;
                    xs.sample(rng, std::span<double>(&xi, 1));
                    return std::pow(xi, order);
                },
                mc);
            if (!(rep.std_error <= 0.1 * rep.estimate))
                throw InfeasibleError("moment E[xi^" + format_double(order) + "] is unstable: standard error " +
                                      format_double(rep.std_error) + " exceeds 10% of the mean " +
                                      format_double(rep.estimate));
            const double x = sigma_inverse(p.profile, u);
            v.factors = {{"xi_moment", rep.estimate}, {"horizon_tail", tail(x)}};
            v.value = v.factor_product();
            v.std_error = v.value * rep.std_error / rep.estimate;
            v.details = {{"sigma_inverse", x}, {"moment_order", order}};
            break;
        }
        case DriftKind::Negative: {
            if (!p.pickands) throw ConfigError("negative drift needs a Pickands constant source");
            const double c = -p.drift;
            const auto psi = dieker_psi(p.profile, c, u, p.pickands, p.dieker);
            v.factors = {{"constant", std::pow(c * (1.0 - h) / h, p.alpha)}, {"horizon_tail", tail(u)},
                         {"psi", psi.value}};
            v.value = v.factor_product();
            if (psi.value > 0.0) v.std_error = v.value * psi.std_error / psi.value;
            v.flags = psi.flags;
            break;
        }
        case DriftKind::Positive: {
            v.factors = {{"constant", std::pow(p.drift, p.alpha)}, {"horizon_tail", tail(u)}};
            v.value = v.factor_product();
            break;
        }
    }
    return v;
}

Example33Result example33_asymptotic(DriftKind kind, const Example33Params& p, double u) {
    const std::size_t n = p.c.size();
    if (n == 0 || p.a.size() != n || p.alphas.size() != n)
        throw ConfigError("example parameters need matching non-empty alphas, c and a lists");
    if (!(p.alpha0 > 0.0 && p.alpha0 < 1.0)) throw DomainError("alpha0 must lie in (0,1)");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(p.alphas[i] > 0.0 && p.alphas[i] < 1.0)) throw DomainError("every alpha_i must lie in (0,1)");
        if (!(p.alpha0 < p.alphas[i])) throw DomainError("alpha0 must be smaller than every alpha_i");
        if (!(p.a[i] > 0.0)) throw DomainError("every a_i must be positive");
    }
    if (!(p.horizon > 0.0)) throw DomainError("T must be positive");
    int first = p.c[0] < 0.0 ? -1 : (p.c[0] > 0.0 ? 1 : 0);
    for (double c : p.c) {
        const int s = c < 0.0 ? -1 : (c > 0.0 ? 1 : 0);
        if (s != first) throw DomainError("unsupported case: the drifts c_i must all have the same sign");
    }
    const int expected = kind == DriftKind::Negative ? -1 : (kind == DriftKind::Zero ? 0 : 1);
    if (first != expected) throw DomainError("drift signs do not match the requested case " + to_string(kind));

    Example33Result r;
    r.kind = kind;
    switch (kind) {
        case DriftKind::Positive: {
            double m = 0.0;
            for (std::size_t i = 0; i < n; ++i) m = std::max(m, p.a[i] / p.c[i]);
            r.quantity = "value";
            r.value = stable_tail_constant(p.alpha0, p.horizon) * std::pow(m * u, -p.alpha0);
            break;
        }
        case DriftKind::Zero:
            r.quantity = "order_exponent";
            r.value = -2.0 * p.alpha0;
            r.flags.emplace_back("order_only");
            break;
        case DriftKind::Negative: {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += p.a[i] * p.c[i];
            r.quantity = "log_asymptote";
            r.value = 2.0 * s * u;
            break;
        }
    }
    return r;
}

}  // namespace gx
