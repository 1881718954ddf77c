#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gauss_extrema/rng.hpp"

namespace gx {

struct ProfileTerm {
    double weight;
    double hurst;
};

// sigma^2(t) = sum_j w_j t^{2 H_j}: a finite sum of independent fBms. Any such
// profile is continuous, strictly increasing and regularly varying at 0 and
// infinity, with indices min H_j and max H_j.
class VarianceProfile {
public:
    explicit VarianceProfile(std::vector<ProfileTerm> terms);

    static VarianceProfile fbm(double hurst, double weight = 1.0) { return VarianceProfile({{weight, hurst}}); }

    const std::vector<ProfileTerm>& terms() const { return terms_; }
    bool is_single_term() const { return terms_.size() == 1; }

    double index_at_infinity() const { return h_inf_; }
    double index_at_zero() const { return h_zero_; }
    // Total weight of the terms carrying the index at infinity.
    double leading_weight() const;
    double weight_at_zero() const;

    double variance(double t) const;
    double sigma(double t) const;
    // First and second derivative of sigma^2.
    double variance_d1(double t) const;
    double variance_d2(double t) const;
    // t * (sigma^2)'(t) / (2 sigma^2(t)): weighted mean of the H_j, increasing in t.
    double local_index(double t) const;

    VarianceProfile scaled(double factor) const;

    // Start of the range where (sigma^2)' and (sigma^2)'' are monotone. For a
    // finite sum of powers the sign changes of the third derivative are
    // bounded by the number of terms; we locate the last one on a geometric grid.
    double c4_threshold() const;

    std::string describe() const;

private:
    std::vector<ProfileTerm> terms_;
    double h_inf_ = 0.0;
    double h_zero_ = 0.0;
};

struct PathGrid {
    double step = 0.0;
    std::vector<double> values;  // values[0] == 0

    std::size_t size() const { return values.size(); }
    double horizon() const { return step * static_cast<double>(values.size() - 1); }
};

double fbm_covariance(double t, double s, double hurst);

// Davies-Harte sampler for fBm on the unit-step grid {0, 1, ..., n}. The
// circulant embedding of the fractional Gaussian noise autocovariance is
// nonnegative definite for every H in (0,1). One FFT produces two independent
// paths (real and imaginary parts).
class FbmGenerator {
public:
    FbmGenerator(double hurst, std::size_t n_steps);

    // Shared generator whose size is n_steps rounded up to a power of two;
    // prefixes of the produced paths are exact samples for shorter grids.
    static std::shared_ptr<const FbmGenerator> cached(double hurst, std::size_t min_steps);

    double hurst() const { return hurst_; }
    std::size_t steps() const { return n_; }

    // Fills `a` (and `b`, if nonempty) with cumulative paths of length
    // steps()+1 on the unit grid, scaled by step^H so that the grid spacing is
    // `step`. Either span may be shorter than steps()+1 to take a prefix.
    void sample(Rng& rng, double step, std::span<double> a, std::span<double> b = {}) const;

private:
    double hurst_;
    std::size_t n_;
    std::vector<double> sqrt_eigen_;  // sqrt(lambda_k / m)
};

// Exact-in-distribution sample of B_H on {0, T/n, ..., T}.
PathGrid sample_fbm_path(double hurst, double horizon, std::size_t n, std::uint64_t seed);
PathGrid sample_fbm_path(double hurst, double horizon, std::size_t n, Rng& rng);

PathGrid sample_sum_path(const VarianceProfile& profile, double horizon, std::size_t n, std::uint64_t seed);
PathGrid sample_sum_path(const VarianceProfile& profile, double horizon, std::size_t n, Rng& rng);

// Adds sum_j sqrt(w_j) B_{H_j} on the grid {0, step, ..., (len-1) step} to `out`.
void add_profile_path(const VarianceProfile& profile, double step, std::span<double> out, Rng& rng);

// max_k values[k] + c k step
double sup_drifted(const PathGrid& path, double drift);
double sup_drifted(std::span<const double> values, double step, double drift);

// Exact inverse of sigma by bracketed bisection; |sigma(t) - y| <= 1e-12 y.
double sigma_inverse(const VarianceProfile& profile, double y);

// Discretisation of a horizon: the step is `step` unless that leaves fewer than
// `min_points` intervals, and is coarsened when more than `max_points` would
// be needed.
struct GridPolicy {
    double step = 1.0 / 1024.0;
    std::size_t min_points = 16;
    std::size_t max_points = std::size_t{1} << 18;

    std::size_t intervals(double horizon) const;
};

}  // namespace gx
