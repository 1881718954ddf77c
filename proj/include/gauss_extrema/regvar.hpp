#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gauss_extrema/montecarlo.hpp"
#include "gauss_extrema/rng.hpp"

namespace gx {

enum class Norm { L1, Lmax };

Norm parse_norm(const std::string& s);
std::string to_string(Norm n);
double vector_norm(std::span<const double> x, Norm n);

struct Atom {
    std::vector<double> direction;  // nonnegative, unit norm after construction
    double weight = 1.0;
};

// Limiting measure nu of a regularly varying vector with a discrete angular
// part: nu = sum_k w_k (alpha r^{-alpha-1} dr) x delta_{d_k}, so that the
// measure of the unit-norm complement {|x| > 1} is 1.
class LimitingMeasure {
public:
    // Directions are rescaled to unit norm and weights to total mass 1.
    LimitingMeasure(double alpha, Norm norm, std::vector<Atom> atoms);

    // Single atom along p: the limit measure of (p_1 T, ..., p_n T).
    static LimitingMeasure comonotone(std::vector<double> p, double alpha, Norm norm);
    // Mass split over the coordinate axes.
    static LimitingMeasure axes(std::size_t dim, double alpha, Norm norm, std::vector<double> weights = {});

    double alpha() const { return alpha_; }
    Norm norm() const { return norm_; }
    std::size_t dim() const { return dim_; }
    const std::vector<Atom>& atoms() const { return atoms_; }

    // nu((a, inf]) with coordinates a_i = 0 left unconstrained.
    double rect_tail(std::span<const double> corner) const;

private:
    double alpha_;
    Norm norm_;
    std::size_t dim_ = 0;
    std::vector<Atom> atoms_;
};

double rect_tail_measure(const LimitingMeasure& nu, std::span<const double> corner);

// Constructive regularly varying vector R * D: R Pareto with
// P(R > x) = (x / x0)^{-alpha} for x >= x0, D drawn from the atoms.
struct RegVarSampler {
    LimitingMeasure measure;
    double x0 = 1.0;

    void validate() const;
    double radial_tail(double x) const;
    void sample(Rng& rng, std::span<double> out) const;
};

std::vector<std::vector<double>> sample_regvar(const RegVarSampler& s, std::size_t n, std::uint64_t seed);

// xi_i = grid sup of an independent B_{H_i} on [0, 1].
struct XiSampler {
    std::vector<double> hurst;
    std::size_t grid = 4096;

    // Only coordinates with active[i] true are sampled; others are set to 1.
    void sample(Rng& rng, std::span<double> out, const std::vector<bool>& active = {}) const;
};

std::vector<std::vector<double>> sample_xi(const XiSampler& s, std::size_t n, std::uint64_t seed);

using VectorSampler = std::function<void(Rng&, std::span<double>)>;

struct TransformedTail {
    McReport report;           // mean and SE of nu(eta^{-1} K)
    double moment_order = 0;   // alpha + delta used for the moment check
    double moment_first_half = 0;
    double moment_second_half = 0;
    bool moment_unstable = false;
};

// nu_hat(K) = E nu(eta^{-1} K) for K = (corner, inf]; also checks that the
// sample (alpha + delta)-moment of eta is finite and stable across halves.
TransformedTail hat_tail_measure(const LimitingMeasure& nu, const VectorSampler& eta, std::span<const double> corner,
                                 std::size_t n_mc, std::uint64_t seed, unsigned workers = 1);

// nu_tilde(K) = E nu(xi^{-1/H} K), i.e. nu_hat with eta_i = xi_i^{1/H_i}.
TransformedTail tilde_tail_measure(const LimitingMeasure& nu, std::span<const double> hurst,
                                   std::span<const double> corner, std::size_t n_mc, std::uint64_t seed,
                                   std::size_t xi_grid = 4096, unsigned workers = 1);
// Same with a caller-supplied xi sampler.
TransformedTail tilde_tail_measure(const LimitingMeasure& nu, std::span<const double> hurst,
                                   std::span<const double> corner, const VectorSampler& xi, std::size_t n_mc,
                                   std::uint64_t seed, unsigned workers = 1);

// Positive alpha-stable draws S(t) ~ S_alpha(t^{1/alpha}, 1, 0) by the
// Chambers-Mallows-Stuck representation.
double stable_subordinator_draw(double alpha, double t, Rng& rng);
std::vector<double> sample_stable_subordinator(double alpha, double t, std::size_t n, std::uint64_t seed);

// P(S(T) > x) ~ C x^{-alpha} with C = T / (Gamma(1 - alpha) cos(pi alpha / 2)).
double stable_tail_constant(double alpha, double horizon);

}  // namespace gx
