#include "gauss_extrema/gaussian_paths.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "gauss_extrema/errors.hpp"

namespace gx {

namespace {

void check_hurst(double h) {
    if (!(h > 0.0 && h < 1.0)) throw DomainError("Hurst index must lie in (0,1), got " + std::to_string(h));
}

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans live for the whole process.
fftw_plan forward_plan(std::size_t m) {
    static std::mutex mutex;
    static std::map<std::size_t, fftw_plan> plans;
    std::lock_guard lock(mutex);
    auto it = plans.find(m);
    if (it != plans.end()) return it->second;
    std::vector<std::complex<double>> tmp(m);
    auto* buf = reinterpret_cast<fftw_complex*>(tmp.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(m), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw InternalError("FFTW could not create a plan of size " + std::to_string(m));
    plans.emplace(m, plan);
    return plan;
}

void fft_inplace(std::vector<std::complex<double>>& data) {
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(forward_plan(data.size()), buf, buf);
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

double fgn_autocov(std::size_t k, double h) {
    const double kk = static_cast<double>(k);
    const double two_h = 2.0 * h;
    return 0.5 * (std::pow(kk + 1.0, two_h) - 2.0 * std::pow(kk, two_h) + std::pow(std::abs(kk - 1.0), two_h));
}

}  // namespace

VarianceProfile::VarianceProfile(std::vector<ProfileTerm> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw DomainError("variance profile needs at least one term");
    h_inf_ = 0.0;
    h_zero_ = 1.0;
    for (const auto& t : terms_) {
        check_hurst(t.hurst);
        if (!(t.weight > 0.0) || !std::isfinite(t.weight))
            throw DomainError("variance profile weights must be positive and finite");
        h_inf_ = std::max(h_inf_, t.hurst);
        h_zero_ = std::min(h_zero_, t.hurst);
    }
}

double VarianceProfile::leading_weight() const {
    double w = 0.0;
    for (const auto& t : terms_)
        if (t.hurst == h_inf_) w += t.weight;
    return w;
}

double VarianceProfile::weight_at_zero() const {
    double w = 0.0;
    for (const auto& t : terms_)
        if (t.hurst == h_zero_) w += t.weight;
    return w;
}

double VarianceProfile::variance(double t) const {
    if (t <= 0.0) return 0.0;
    double v = 0.0;
    for (const auto& term : terms_) v += term.weight * std::pow(t, 2.0 * term.hurst);
    return v;
}

double VarianceProfile::sigma(double t) const { return std::sqrt(variance(t)); }

double VarianceProfile::variance_d1(double t) const {
    double v = 0.0;
    for (const auto& term : terms_) v += term.weight * 2.0 * term.hurst * std::pow(t, 2.0 * term.hurst - 1.0);
    return v;
}

double VarianceProfile::variance_d2(double t) const {
    double v = 0.0;
    for (const auto& term : terms_) {
        const double e = 2.0 * term.hurst;
        v += term.weight * e * (e - 1.0) * std::pow(t, e - 2.0);
    }
    return v;
}

double VarianceProfile::local_index(double t) const {
    if (terms_.size() == 1) return terms_.front().hurst;
    // Weights w_j t^{2H_j} normalised in log space to survive extreme t.
    const double lt = std::log(t);
    double mx = -INFINITY;
    for (const auto& term : terms_) mx = std::max(mx, std::log(term.weight) + 2.0 * term.hurst * lt);
    double num = 0.0;
    double den = 0.0;
    for (const auto& term : terms_) {
        const double w = std::exp(std::log(term.weight) + 2.0 * term.hurst * lt - mx);
        num += w * term.hurst;
        den += w;
    }
    return num / den;
}

VarianceProfile VarianceProfile::scaled(double factor) const {
    if (!(factor > 0.0)) throw DomainError("profile scale factor must be positive");
    auto terms = terms_;
    for (auto& t : terms) t.weight *= factor;
    return VarianceProfile(std::move(terms));
}

double VarianceProfile::c4_threshold() const {
    // Third and fourth derivatives of sigma^2 decide monotonicity of the first
    // two; scan for their last sign change.
    auto d3 = [&](double t) {
        double v = 0.0;
        for (const auto& term : terms_) {
            const double e = 2.0 * term.hurst;
            v += term.weight * e * (e - 1.0) * (e - 2.0) * std::pow(t, e - 3.0);
        }
        return v;
    };
    auto d2 = [&](double t) { return variance_d2(t); };
    double threshold = 0.0;
    double prev3 = d3(1e-8);
    double prev2 = d2(1e-8);
    for (double t = 1e-8; t <= 1e8; t *= 1.05) {
        const double c3 = d3(t);
        const double c2 = d2(t);
        if ((c3 > 0) != (prev3 > 0) || (c2 > 0) != (prev2 > 0)) threshold = t;
        prev3 = c3;
        prev2 = c2;
    }
    return threshold;
}

std::string VarianceProfile::describe() const {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i) os << ',';
        os << terms_[i].weight << ':' << terms_[i].hurst;
    }
    return os.str();
}

double fbm_covariance(double t, double s, double hurst) {
    check_hurst(hurst);
    if (t < 0.0 || s < 0.0) throw DomainError("fbm_covariance needs t, s >= 0");
    const double e = 2.0 * hurst;
    return 0.5 * (std::pow(t, e) + std::pow(s, e) - std::pow(std::abs(t - s), e));
}

FbmGenerator::FbmGenerator(double hurst, std::size_t n_steps) : hurst_(hurst), n_(n_steps) {
    check_hurst(hurst);
    if (n_steps < 1) throw DomainError("fBm grid needs at least one step");
    const std::size_t m = 2 * n_;
    std::vector<std::complex<double>> row(m);
    for (std::size_t j = 0; j <= n_; ++j) row[j] = fgn_autocov(j, hurst);
    for (std::size_t j = n_ + 1; j < m; ++j) row[j] = row[m - j];
    fft_inplace(row);
    double max_eig = 0.0;
    for (const auto& z : row) max_eig = std::max(max_eig, z.real());
    sqrt_eigen_.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        double lam = row[k].real();
        if (lam < -1e-10 * max_eig)
            throw InternalError("circulant embedding is not nonnegative definite (eigenvalue " + std::to_string(lam) +
                                ")");
        lam = std::max(lam, 0.0);
        sqrt_eigen_[k] = std::sqrt(lam / static_cast<double>(m));
    }
}

std::shared_ptr<const FbmGenerator> FbmGenerator::cached(double hurst, std::size_t min_steps) {
    static std::mutex mutex;
    static std::map<std::pair<double, std::size_t>, std::shared_ptr<const FbmGenerator>> cache;
    const std::size_t n = next_pow2(std::max<std::size_t>(min_steps, 1));
    std::lock_guard lock(mutex);
    auto key = std::make_pair(hurst, n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto gen = std::make_shared<const FbmGenerator>(hurst, n);
    cache.emplace(key, gen);
    return gen;
}

void FbmGenerator::sample(Rng& rng, double step, std::span<double> a, std::span<double> b) const {
    if (a.size() > n_ + 1 || b.size() > n_ + 1) throw InternalError("requested path longer than generator grid");
    std::normal_distribution<double> normal(0.0, 1.0);
    if (hurst_ == 0.5) {
        // Independent increments: a cumulative sum is exact and skips the FFT.
        const double sd = std::sqrt(step);
        for (std::span<double> p : {a, b}) {
            if (p.empty()) continue;
            p[0] = 0.0;
            for (std::size_t k = 1; k < p.size(); ++k) p[k] = p[k - 1] + sd * normal(rng);
        }
        return;
    }
    const std::size_t m = 2 * n_;
    thread_local std::vector<std::complex<double>> work;
    work.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double re = normal(rng);
        const double im = normal(rng);
        work[k] = std::complex<double>(sqrt_eigen_[k] * re, sqrt_eigen_[k] * im);
    }
    fft_inplace(work);
    const double scale = std::pow(step, hurst_);
    if (!a.empty()) {
        a[0] = 0.0;
        double acc = 0.0;
        for (std::size_t k = 1; k < a.size(); ++k) {
            acc += work[k - 1].real();
            a[k] = scale * acc;
        }
    }
    if (!b.empty()) {
        b[0] = 0.0;
        double acc = 0.0;
        for (std::size_t k = 1; k < b.size(); ++k) {
            acc += work[k - 1].imag();
            b[k] = scale * acc;
        }
    }
}

PathGrid sample_fbm_path(double hurst, double horizon, std::size_t n, Rng& rng) {
    check_hurst(hurst);
    if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
    if (n < 1) throw DomainError("grid size must be at least 1");
    PathGrid path;
    path.step = horizon / static_cast<double>(n);
    path.values.assign(n + 1, 0.0);
    FbmGenerator::cached(hurst, n)->sample(rng, path.step, path.values);
    return path;
}

PathGrid sample_fbm_path(double hurst, double horizon, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    return sample_fbm_path(hurst, horizon, n, rng);
}

void add_profile_path(const VarianceProfile& profile, double step, std::span<double> out, Rng& rng) {
    if (out.empty()) return;
    thread_local std::vector<double> tmp;
    tmp.resize(out.size());
    const std::size_t steps = out.size() - 1;
    for (const auto& term : profile.terms()) {
        FbmGenerator::cached(term.hurst, std::max<std::size_t>(steps, 1))->sample(rng, step, tmp);
        const double w = std::sqrt(term.weight);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += w * tmp[k];
    }
}

PathGrid sample_sum_path(const VarianceProfile& profile, double horizon, std::size_t n, Rng& rng) {
    if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
    if (n < 1) throw DomainError("grid size must be at least 1");
    PathGrid path;
    path.step = horizon / static_cast<double>(n);
    path.values.assign(n + 1, 0.0);
    add_profile_path(profile, path.step, path.values, rng);
    return path;
}

PathGrid sample_sum_path(const VarianceProfile& profile, double horizon, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    return sample_sum_path(profile, horizon, n, rng);
}

double sup_drifted(std::span<const double> values, double step, double drift) {
    double best = -INFINITY;
    for (std::size_t k = 0; k < values.size(); ++k)
        best = std::max(best, values[k] + drift * step * static_cast<double>(k));
    return best;
}

double sup_drifted(const PathGrid& path, double drift) { return sup_drifted(path.values, path.step, drift); }

double sigma_inverse(const VarianceProfile& profile, double y) {
    if (!(y > 0.0)) throw DomainError("sigma_inverse needs y > 0");
    // Initial guess from the dominant power, then geometric bracket expansion.
    double guess = std::pow(y / std::sqrt(profile.leading_weight()), 1.0 / profile.index_at_infinity());
    if (!std::isfinite(guess) || guess <= 0.0) guess = 1.0;
    double lo = guess;
    double hi = guess;
    while (profile.sigma(lo) > y) lo *= 0.5;
    while (profile.sigma(hi) < y) hi *= 2.0;
    double mid = std::sqrt(lo * hi);
    for (int it = 0; it < 400; ++it) {
        mid = 0.5 * (lo + hi);
        const double s = profile.sigma(mid);
        if (std::abs(s - y) <= 1e-14 * y) break;
        if (s < y)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    }
    return mid;
}

std::size_t GridPolicy::intervals(double horizon) const {
    if (!(horizon > 0.0)) return std::max<std::size_t>(min_points, 1);
    const double raw = std::ceil(horizon / step);
    std::size_t n = raw > static_cast<double>(max_points) ? max_points : static_cast<std::size_t>(raw);
    n = std::max(n, min_points);
    return std::min(n, std::max(max_points, min_points));
}

}  // namespace gx
