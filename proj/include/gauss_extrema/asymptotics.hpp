#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gauss_extrema/gaussian_paths.hpp"
#include "gauss_extrema/pickands.hpp"
#include "gauss_extrema/regvar.hpp"

namespace gx {

// Standard normal survival function, via erfc.
double psi_normal_survival(double u);
// exp(-u^2/2) / (sqrt(2 pi) u), the tail equivalent of the above.
double psi_tail_equivalent(double u);

enum class PsiMode { Exact, Asymptotic };
std::string to_string(PsiMode m);
PsiMode parse_psi_mode(const std::string& s);
double psi_eval(double u, PsiMode mode);

double constant_C(double hurst, double lambda1, double lambda2);

struct NamedValue {
    std::string name;
    double value;
};

struct AsymptoticValue {
    double u = 0.0;
    double value = 0.0;
    double std_error = 0.0;  // from Monte Carlo inputs, 0 if none
    std::string regime;
    std::vector<NamedValue> factors;  // multiply to `value`
    std::vector<NamedValue> details;  // informational (Psi argument, minimiser, ...)
    std::vector<std::string> flags;

    double factor_product() const;
    double factor(const std::string& name) const;
    double detail(const std::string& name) const;
    bool has_flag(const std::string& f) const;
};

struct FuMinimum {
    double t_star = 0.0;
    double value = 0.0;
};

// Minimiser of f_u(t) = u (1 + t) / sigma(u t / c) over t > 0.
FuMinimum fu_minimizer(const VarianceProfile& profile, double c, double u);

enum class DiekerRegime { I, II, III };
std::string to_string(DiekerRegime r);
// Structural: compares 2H (index at infinity) with 1.
DiekerRegime dieker_regime(const VarianceProfile& profile);

struct DiekerOptions {
    PsiMode psi_mode = PsiMode::Exact;
    bool enable_case_iii = true;
};

// psi(u) = P(sup_{t >= 0} X(t) - rate t > u), rate > 0.
AsymptoticValue dieker_psi(const VarianceProfile& profile, double rate, double u, const PickandsProvider& pickands,
                           const DiekerOptions& opts = {});

double corollary_constant_K(double hurst, double c);
AsymptoticValue corollary_fbm_psi(double hurst, double c, double u, PickandsValue pickands, PsiMode mode = PsiMode::Exact);
AsymptoticValue corollary_fbm_psi(double hurst, double c, double u, const PickandsProvider& pickands,
                                  PsiMode mode = PsiMode::Exact);

struct DriftedProcessSpec {
    VarianceProfile profile;
    double drift = 0.0;
    double coefficient = 1.0;

    int sign() const { return drift < 0.0 ? -1 : (drift > 0.0 ? 1 : 0); }
    void validate() const;
};

// P(u) = P(all i: sup_{[0, T_i]} X_i(t) + c_i t > a_i u) with T independent of X.
class ProblemSpec {
public:
    // Coordinates must be ordered negative, zero, positive drifts.
    ProblemSpec(std::vector<DriftedProcessSpec> coords, RegVarSampler horizon);

    const std::vector<DriftedProcessSpec>& coords() const { return coords_; }
    const RegVarSampler& horizon() const { return horizon_; }
    std::size_t dim() const { return coords_.size(); }
    std::size_t n_negative() const { return n_neg_; }
    std::size_t n_zero() const { return n_zero_; }
    std::size_t n_positive() const { return n_pos_; }
    // Zero-drift coordinates n_neg .. n_neg + m - 1 share the leading index.
    std::size_t leading_group_size() const { return k_.size(); }
    const std::vector<double>& matching_constants() const { return k_; }
    double leading_hurst() const { return leading_hurst_; }

private:
    std::vector<DriftedProcessSpec> coords_;
    RegVarSampler horizon_;
    std::size_t n_neg_ = 0;
    std::size_t n_zero_ = 0;
    std::size_t n_pos_ = 0;
    std::vector<double> k_;
    double leading_hurst_ = 0.0;
};

struct Theorem31Options {
    std::size_t n_mc = 20000;
    std::uint64_t seed = 0;
    std::size_t xi_grid = 4096;
    unsigned workers = 1;
    DiekerOptions dieker;
    PickandsProvider pickands;  // needed only with negative drifts
};

// The u-independent factor nu_tilde((k a0^{1/H}, inf]) of case (i).
TransformedTail theorem31_nu_tilde(const ProblemSpec& spec, const Theorem31Options& opts);
AsymptoticValue theorem31_case_i(const ProblemSpec& spec, double u, const Theorem31Options& opts);
AsymptoticValue theorem31_case_i(const ProblemSpec& spec, double u, const TransformedTail& nu_tilde,
                                 const Theorem31Options& opts);
AsymptoticValue theorem31_case_ii(const ProblemSpec& spec, double u, const Theorem31Options& opts);
// Corner of case (ii): a_i t*_i / |c_i| for negative drifts, a_i / c_i for positive.
std::vector<double> theorem31_corner_ii(const ProblemSpec& spec);

enum class DriftKind { Negative, Zero, Positive };
std::string to_string(DriftKind k);
DriftKind parse_drift_kind(const std::string& s);

struct OneDimParams {
    VarianceProfile profile = VarianceProfile::fbm(0.5);
    double drift = 0.0;
    double alpha = 1.0;  // P(T > x) = (x / x0)^{-alpha}, x >= x0
    double x0 = 1.0;
    std::size_t n_mc = 20000;
    std::uint64_t seed = 0;
    std::size_t xi_grid = 4096;
    unsigned workers = 1;
    DiekerOptions dieker;
    PickandsProvider pickands;
};

AsymptoticValue onedim_asymptotic(DriftKind kind, const OneDimParams& params, double u);

struct Example33Params {
    double alpha0 = 0.5;
    std::vector<double> alphas;
    std::vector<double> c;
    std::vector<double> a;
    double horizon = 1.0;
};

struct Example33Result {
    DriftKind kind = DriftKind::Positive;
    // "value" (P_B(u) itself), "order_exponent" (P_B(u) of exact order u^value)
    // or "log_asymptote" (ln P_B(u) ~ value).
    std::string quantity;
    double value = 0.0;
    std::vector<std::string> flags;
};

Example33Result example33_asymptotic(DriftKind kind, const Example33Params& params, double u);

}  // namespace gx
