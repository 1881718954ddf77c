#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>

#include "gauss_extrema/asymptotics.hpp"
#include "gauss_extrema/gaussian_paths.hpp"
#include "gauss_extrema/montecarlo.hpp"
#include "gauss_extrema/regvar.hpp"

namespace gx {

using Vec2 = std::array<double, 2>;

// Two-dimensional regenerative model: alternating T-stages (Pareto lengths,
// growth B_{H_j}(t) + p_j t) and S-stages (exponential lengths, growth
// B~_{H~_j}(t) - q_j t).
struct RegenSpec {
    Vec2 p{1.0, 1.0};
    Vec2 q{1.0, 1.0};
    Vec2 hurst{0.5, 0.5};
    Vec2 hurst_tilde{0.5, 0.5};
    double lambda = 2.0;  // P(T > x) = (x / x0)^{-lambda}, x >= x0
    double x0 = 1.0;
    double exp_rate = 1.0 / 3.0;  // S ~ Exp(exp_rate)
    Vec2 a{1.0, 1.0};
    Norm norm = Norm::L1;

    void validate() const;
    double mean_T() const;
    double mean_S() const;
    // c_j = q_j E[S] - p_j E[T]; positive under the stability rule.
    Vec2 drift() const;
    // Limiting measure of T~ = (p_1 T, p_2 T).
    LimitingMeasure mu() const;
    // P(|T~| > x) in the configured norm.
    double tilde_tail(double x) const;
};

struct CycleDraw {
    Vec2 U{0.0, 0.0};  // increment over the cycle
    Vec2 M{0.0, 0.0};  // running supremum within the cycle
    Vec2 x_end{0.0, 0.0};  // value at the end of the T-stage
    double T = 0.0;
    double S = 0.0;
    bool m_exact = true;   // false: paths skipped, M holds the lower bound max(0, X(T), U)
    bool coarsened = false;
};

struct CycleOptions {
    GridPolicy grid{1.0 / 64.0, 16, std::size_t{1} << 18};
    bool gaussian = true;  // false: deterministic trajectories (test hook)
    // Paths are generated only if the sup bound p_j T + K T^{H_j} + K S^{H~_j}
    // reaches need[j] in every coordinate and its norm reaches need_norm.
    Vec2 need{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    double need_norm = -std::numeric_limits<double>::infinity();
    double sup_bound_k = 9.0;
    bool overflow_error = false;  // stage longer than grid.max_points steps: throw instead of coarsening
};

CycleDraw simulate_cycle(const RegenSpec& spec, const CycleOptions& opts, Rng& rng);
CycleDraw simulate_cycle(const RegenSpec& spec, double grid_step, std::uint64_t seed);

struct QOptions {
    CycleOptions cycle;
    double kappa = 2.0;
    std::uint64_t max_cycles = 10'000'000;
    unsigned workers = 1;
    double confidence = 0.95;
};

struct QEstimate {
    McReport report;
    // One-big-jump estimate of the probability lost by abandoning walks
    // below -(a + kappa) u.
    double abandon_bias = 0.0;
    std::uint64_t truncated = 0;  // walks stopped by max_cycles
};

// Q(u) = P(exists n: W^{(n-1)} + M^{(n)} > a u in both coordinates).
QEstimate estimate_Q(const RegenSpec& spec, double u, std::uint64_t n_paths, std::uint64_t seed,
                     const QOptions& opts = {});
// Single replication of the walk, for use inside other harnesses.
bool regen_walk_event(const RegenSpec& spec, double u, const QOptions& opts, Rng& rng);

struct IntegralResult {
    double value = 0.0;
    double abs_error = 0.0;
    double tail_bound = 0.0;  // bound on the dropped/estimated part beyond v0 (quadrature only)
};

// int_0^inf mu((v c + a, inf]) dv for a discrete measure of index lambda > 1:
// exact sum of power-law pieces along the upper envelope of the lines.
IntegralResult integral_mu(const LimitingMeasure& mu, std::span<const double> c, std::span<const double> a);
// Same integral by adaptive Gauss-Kronrod quadrature on [0, v0] and [v0, inf).
IntegralResult integral_mu_quadrature(const LimitingMeasure& mu, std::span<const double> c,
                                      std::span<const double> a);

AsymptoticValue theorem42_Q(const RegenSpec& spec, double u);
// The same form with corner (2a + kappa); used for the abandon bias note.
double abandon_bias_estimate(const RegenSpec& spec, double u, double kappa);

}  // namespace gx
