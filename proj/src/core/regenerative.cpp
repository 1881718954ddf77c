#include "gauss_extrema/regenerative.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>

#include "gauss_extrema/errors.hpp"
#include "gauss_extrema/format.hpp"

namespace gx {

void RegenSpec::validate() const {
    for (int j = 0; j < 2; ++j) {
        if (!(p[j] > 0.0) || !(q[j] > 0.0)) throw ConfigError("drifts p and q must be positive");
        if (!(hurst[j] > 0.0 && hurst[j] < 1.0) || !(hurst_tilde[j] > 0.0 && hurst_tilde[j] < 1.0))
            throw ConfigError("H and Htilde must lie in (0,1)");
        if (!(a[j] > 0.0)) throw ConfigError("a must be positive");
    }
    if (!(x0 > 0.0)) throw ConfigError("x0 must be positive");
    if (!(exp_rate > 0.0)) throw ConfigError("exp_rate must be positive");
    if (!(lambda > 1.0))
        throw ConfigError("lambda = " + format_double(lambda) +
                          " violates the stability rule p_j E[T] < q_j E[S]: E[T] is infinite unless lambda > 1");
    for (int j = 0; j < 2; ++j) {
        if (!(p[j] * mean_T() < q[j] * mean_S()))
            throw ConfigError("stability rule p_j E[T] < q_j E[S] fails for j = " + std::to_string(j + 1) + " (" +
                              format_double(p[j] * mean_T()) + " >= " + format_double(q[j] * mean_S()) + ")");
    }
}

double RegenSpec::mean_T() const { return lambda > 1.0 ? lambda * x0 / (lambda - 1.0) : INFINITY; }
double RegenSpec::mean_S() const { return 1.0 / exp_rate; }

Vec2 RegenSpec::drift() const {
    return {q[0] * mean_S() - p[0] * mean_T(), q[1] * mean_S() - p[1] * mean_T()};
}

LimitingMeasure RegenSpec::mu() const { return LimitingMeasure::comonotone({p[0], p[1]}, lambda, norm); }

double RegenSpec::tilde_tail(double x) const {
    const double scale = vector_norm(p, norm) * x0;
    return x <= scale ? 1.0 : std::pow(x / scale, -lambda);
}

namespace {

// Fills `a` (and `b`) with B_{h_a}, B_{h_b} on n steps of size step; shares
// one FFT when the indices agree.
void stage_paths(double ha, double hb, std::size_t n, double step, std::vector<double>& a, std::vector<double>& b,
                 Rng& rng) {
    a.assign(n + 1, 0.0);
    b.assign(n + 1, 0.0);
    if (ha == hb) {
        FbmGenerator::cached(ha, n)->sample(rng, step, a, b);
    } else {
        FbmGenerator::cached(ha, n)->sample(rng, step, a);
        FbmGenerator::cached(hb, n)->sample(rng, step, b);
    }
}

std::size_t stage_intervals(const GridPolicy& g, double len, bool overflow_error, bool& coarsened) {
    if (len / g.step > static_cast<double>(g.max_points)) {
        if (overflow_error)
            throw InfeasibleError("stage length " + format_double(len) + " needs more than " +
                                  std::to_string(g.max_points) +
                                  " grid steps; raise max_points, coarsen the step, or stratify on the stage length");
        coarsened = true;
    }
    return g.intervals(len);
}

}  // namespace

CycleDraw simulate_cycle(const RegenSpec& spec, const CycleOptions& opts, Rng& rng) {
    CycleDraw d;
    d.T = spec.x0 * std::pow(uniform_open(rng), -1.0 / spec.lambda);
    d.S = -std::log(uniform_open(rng)) / spec.exp_rate;
    if (!opts.gaussian) {
        for (int j = 0; j < 2; ++j) {
            d.x_end[j] = spec.p[j] * d.T;
            d.U[j] = spec.p[j] * d.T - spec.q[j] * d.S;
            d.M[j] = spec.p[j] * d.T;
        }
        return d;
    }

    Vec2 bound;
    bool reachable = true;
    for (int j = 0; j < 2; ++j) {
        bound[j] = spec.p[j] * d.T + opts.sup_bound_k * (std::pow(d.T, spec.hurst[j]) + std::pow(d.S, spec.hurst_tilde[j]));
        if (bound[j] < opts.need[j]) reachable = false;
    }
    if (vector_norm(bound, spec.norm) < opts.need_norm) reachable = false;

    if (!reachable) {
        // Endpoints are exact; the supremum is only bounded below.
        d.m_exact = false;
        for (int j = 0; j < 2; ++j) {
            d.x_end[j] = std::pow(d.T, spec.hurst[j]) * std_normal(rng) + spec.p[j] * d.T;
            const double y_end = std::pow(d.S, spec.hurst_tilde[j]) * std_normal(rng) - spec.q[j] * d.S;
            d.U[j] = d.x_end[j] + y_end;
            d.M[j] = std::max({0.0, d.x_end[j], d.U[j]});
        }
        return d;
    }

    thread_local std::vector<double> a;
    thread_local std::vector<double> b;
    Vec2 sup_t;
    const std::size_t nt = stage_intervals(opts.grid, d.T, opts.overflow_error, d.coarsened);
    const double st = d.T / static_cast<double>(nt);
    stage_paths(spec.hurst[0], spec.hurst[1], nt, st, a, b, rng);
    sup_t[0] = sup_drifted(a, st, spec.p[0]);
    sup_t[1] = sup_drifted(b, st, spec.p[1]);
    d.x_end[0] = a[nt] + spec.p[0] * d.T;
    d.x_end[1] = b[nt] + spec.p[1] * d.T;

    const std::size_t ns = stage_intervals(opts.grid, d.S, opts.overflow_error, d.coarsened);
    const double ss = d.S / static_cast<double>(ns);
    stage_paths(spec.hurst_tilde[0], spec.hurst_tilde[1], ns, ss, a, b, rng);
    const Vec2 sup_s{sup_drifted(a, ss, -spec.q[0]), sup_drifted(b, ss, -spec.q[1])};
    const Vec2 y_end{a[ns] - spec.q[0] * d.S, b[ns] - spec.q[1] * d.S};
    for (int j = 0; j < 2; ++j) {
        d.U[j] = d.x_end[j] + y_end[j];
        d.M[j] = std::max(sup_t[j], d.x_end[j] + sup_s[j]);
    }
    return d;
}

CycleDraw simulate_cycle(const RegenSpec& spec, double grid_step, std::uint64_t seed) {
    spec.validate();
    if (!(grid_step > 0.0)) throw DomainError("grid step must be positive");
    CycleOptions opts;
    opts.grid.step = grid_step;
    Rng rng(seed);
    return simulate_cycle(spec, opts, rng);
}

namespace {

bool walk(const RegenSpec& spec, double u, const QOptions& opts, Rng& rng, bool& truncated) {
    Vec2 w{0.0, 0.0};
    CycleOptions co = opts.cycle;
    truncated = false;
    for (std::uint64_t n = 0; n < opts.max_cycles; ++n) {
        for (int j = 0; j < 2; ++j) co.need[j] = spec.a[j] * u - w[j];
        const CycleDraw d = simulate_cycle(spec, co, rng);
        if (w[0] + d.M[0] > spec.a[0] * u && w[1] + d.M[1] > spec.a[1] * u) return true;
        w[0] += d.U[0];
        w[1] += d.U[1];
        if (w[0] < -(spec.a[0] + opts.kappa) * u && w[1] < -(spec.a[1] + opts.kappa) * u) return false;
    }
    truncated = true;
    return false;
}

}  // namespace

bool regen_walk_event(const RegenSpec& spec, double u, const QOptions& opts, Rng& rng) {
    bool truncated = false;
    return walk(spec, u, opts, rng, truncated);
}

QEstimate estimate_Q(const RegenSpec& spec, double u, std::uint64_t n_paths, std::uint64_t seed,
                     const QOptions& opts) {
    spec.validate();
    if (!(u >= 0.0)) throw DomainError("u must be nonnegative");
    if (n_paths < 1000) throw DomainError("estimate_Q needs n_paths >= 1000");
    if (!(opts.kappa > 0.0)) throw DomainError("kappa must be positive");
    std::atomic<std::uint64_t> truncated{0};
    McOptions mc{n_paths, seed, opts.workers, opts.confidence};
    QEstimate q;
    q.report = run_probability_mc(
        [&](Rng& rng, std::uint64_t) {
            bool t = false;
            const bool hit = walk(spec, u, opts, rng, t);
            if (t) truncated.fetch_add(1);
            return hit;
        },
        mc);
    q.truncated = truncated.load();
    if (q.truncated > 0) q.report.flags.emplace_back("truncated_walks");
    q.abandon_bias = u > 0.0 ? abandon_bias_estimate(spec, u, opts.kappa) : 0.0;
    return q;
}

namespace {

void check_integral_args(const LimitingMeasure& mu, std::span<const double> c, std::span<const double> a) {
    if (!(mu.alpha() > 1.0))
        throw DomainError("the integral of mu((v c + a, inf]) diverges unless lambda > 1 (got " +
                          format_double(mu.alpha()) + ")");
    if (c.size() != mu.dim() || a.size() != mu.dim()) throw DomainError("c and a must match the measure dimension");
    for (std::size_t i = 0; i < c.size(); ++i)
        if (!(c[i] > 0.0) || !(a[i] > 0.0)) throw DomainError("c and a must be positive");
}

}  // namespace

IntegralResult integral_mu(const LimitingMeasure& mu, std::span<const double> c, std::span<const double> a) {
    check_integral_args(mu, c, a);
    const double lam = mu.alpha();
    // int_{v0}^{v1} (al + be v)^{-lam} dv
    auto piece = [lam](double al, double be, double v0, double v1) {
        const double f0 = std::pow(al + be * v0, 1.0 - lam);
        const double f1 = std::isinf(v1) ? 0.0 : std::pow(al + be * v1, 1.0 - lam);
        return (f0 - f1) / (be * (lam - 1.0));
    };
    double total = 0.0;
    for (const auto& atom : mu.atoms()) {
        // Lines v -> a_i / d_i + (c_i / d_i) v over the coordinates the atom reaches.
        std::vector<std::pair<double, double>> lines;
        for (std::size_t i = 0; i < mu.dim(); ++i)
            if (atom.direction[i] > 0.0) lines.emplace_back(a[i] / atom.direction[i], c[i] / atom.direction[i]);
        // Coordinates the atom never reaches make the rectangle unreachable.
        if (lines.size() < mu.dim()) continue;
        std::size_t cur = 0;
        for (std::size_t k = 1; k < lines.size(); ++k) {
            const auto& l = lines[k];
            if (l.first > lines[cur].first || (l.first == lines[cur].first && l.second > lines[cur].second)) cur = k;
        }
        double v = 0.0;
        double sum = 0.0;
        for (;;) {
            double next_v = INFINITY;
            std::size_t next = cur;
            for (std::size_t k = 0; k < lines.size(); ++k) {
                if (!(lines[k].second > lines[cur].second)) continue;
                const double x = (lines[cur].first - lines[k].first) / (lines[k].second - lines[cur].second);
                const double xv = std::max(x, v);
                if (xv < next_v || (xv == next_v && lines[k].second > lines[next].second)) {
                    next_v = xv;
                    next = k;
                }
            }
            sum += piece(lines[cur].first, lines[cur].second, v, next_v);
            if (next == cur) break;
            v = next_v;
            cur = next;
        }
        total += atom.weight * sum;
    }
    return {total, 0.0, 0.0};
}

IntegralResult integral_mu_quadrature(const LimitingMeasure& mu, std::span<const double> c,
                                      std::span<const double> a) {
    check_integral_args(mu, c, a);
    using boost::math::quadrature::gauss_kronrod;
    const std::vector<double> cv(c.begin(), c.end());
    const std::vector<double> av(a.begin(), a.end());
    auto f = [&](double v) {
        std::vector<double> x(av.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = av[i] + v * cv[i];
        return mu.rect_tail(x);
    };
    double scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) scale = std::max(scale, a[i] / c[i]);
    const double v0 = 10.0 * (1.0 + scale);
    double e1 = 0.0;
    double e2 = 0.0;
    const double head = gauss_kronrod<double, 61>::integrate(f, 0.0, v0, 25, 1e-10, &e1);
    // v = v0 t^{-1/(lambda-1)} turns the v^{-lambda} tail into a bounded integrand on (0, 1].
    const double k = 1.0 / (mu.alpha() - 1.0);
    auto g = [&](double t) {
        if (t <= 0.0) return 0.0;
        const double v = v0 * std::pow(t, -k);
        return f(v) * v0 * k * std::pow(t, -k - 1.0);
    };
    const double tail = gauss_kronrod<double, 61>::integrate(g, 0.0, 1.0, 25, 1e-10, &e2);
    IntegralResult r;
    r.value = head + tail;
    r.abs_error = (e1 + e2) * std::max(1.0, std::abs(r.value));
    r.tail_bound = mu.rect_tail(cv) * std::pow(v0, 1.0 - mu.alpha()) / (mu.alpha() - 1.0);
    return r;
}

AsymptoticValue theorem42_Q(const RegenSpec& spec, double u) {
    spec.validate();
    if (!(u > 0.0)) throw DomainError("u must be positive");
    const Vec2 c = spec.drift();
    const auto integral = integral_mu(spec.mu(), c, spec.a);
    AsymptoticValue v;
    v.u = u;
    v.regime = "theorem42";
    v.factors = {{"integral_mu", integral.value}, {"horizon_tail", spec.tilde_tail(u)}, {"u_factor", u}};
    v.value = v.factor_product();
    v.details = {{"c1", c[0]}, {"c2", c[1]}};
    return v;
}

double abandon_bias_estimate(const RegenSpec& spec, double u, double kappa) {
    const Vec2 c = spec.drift();
    const Vec2 corner{2.0 * spec.a[0] + kappa, 2.0 * spec.a[1] + kappa};
    return integral_mu(spec.mu(), c, corner).value * spec.tilde_tail(u) * u;
}

}  // namespace gx
