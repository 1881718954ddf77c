#include "gauss_extrema/regvar.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

#include "gauss_extrema/errors.hpp"
#include "gauss_extrema/gaussian_paths.hpp"

namespace gx {

Norm parse_norm(const std::string& s) {
    if (s == "L1" || s == "l1") return Norm::L1;
    if (s == "Lmax" || s == "lmax" || s == "Linf" || s == "max") return Norm::Lmax;
    throw ConfigError("unknown norm '" + s + "' (expected L1 or Lmax)");
}

std::string to_string(Norm n) { return n == Norm::L1 ? "L1" : "Lmax"; }

double vector_norm(std::span<const double> x, Norm n) {
    double r = 0.0;
    for (double v : x) r = n == Norm::L1 ? r + std::abs(v) : std::max(r, std::abs(v));
    return r;
}

LimitingMeasure::LimitingMeasure(double alpha, Norm norm, std::vector<Atom> atoms)
    : alpha_(alpha), norm_(norm), atoms_(std::move(atoms)) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("tail index alpha must be positive");
    if (atoms_.empty()) throw DomainError("limiting measure needs at least one atom");
    dim_ = atoms_.front().direction.size();
    if (dim_ == 0) throw DomainError("atom directions must be nonempty");
    double total = 0.0;
    for (auto& a : atoms_) {
        if (a.direction.size() != dim_) throw DomainError("atom directions differ in dimension");
        for (double v : a.direction)
            if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("atom directions must be nonnegative");
        const double len = vector_norm(a.direction, norm_);
        if (!(len > 0.0)) throw DomainError("atom direction must be nonzero");
        for (double& v : a.direction) v /= len;
        if (!(a.weight > 0.0) || !std::isfinite(a.weight)) throw DomainError("atom weights must be positive");
        total += a.weight;
    }
    for (auto& a : atoms_) a.weight /= total;
}

LimitingMeasure LimitingMeasure::comonotone(std::vector<double> p, double alpha, Norm norm) {
    return LimitingMeasure(alpha, norm, {Atom{std::move(p), 1.0}});
}

LimitingMeasure LimitingMeasure::axes(std::size_t dim, double alpha, Norm norm, std::vector<double> weights) {
    if (weights.empty()) weights.assign(dim, 1.0);
    if (weights.size() != dim) throw DomainError("axis weights must match dimension");
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < dim; ++i) {
        std::vector<double> d(dim, 0.0);
        d[i] = 1.0;
        atoms.push_back(Atom{std::move(d), weights[i]});
    }
    return LimitingMeasure(alpha, norm, std::move(atoms));
}

double LimitingMeasure::rect_tail(std::span<const double> corner) const {
    if (corner.size() != dim_) throw DomainError("corner dimension does not match the measure");
    bool any_positive = false;
    for (double a : corner) {
        if (std::isnan(a) || a < 0.0) throw DomainError("corner coordinates must be nonnegative");
        if (a > 0.0) any_positive = true;
    }
    if (!any_positive) throw DomainError("rectangle tail at the origin is infinite");
    double total = 0.0;
    for (const auto& atom : atoms_) {
        double radius = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            if (corner[i] <= 0.0) continue;
            const double need = atom.direction[i] > 0.0 ? corner[i] / atom.direction[i] : INFINITY;
            radius = std::max(radius, need);
        }
        if (std::isfinite(radius)) total += atom.weight * std::pow(radius, -alpha_);
    }
    return total;
}

double rect_tail_measure(const LimitingMeasure& nu, std::span<const double> corner) { return nu.rect_tail(corner); }

void RegVarSampler::validate() const {
    if (!(x0 > 0.0) || !std::isfinite(x0)) throw DomainError("radial scale x0 must be positive");
}

double RegVarSampler::radial_tail(double x) const {
    if (x <= x0) return 1.0;
    return std::pow(x / x0, -measure.alpha());
}

void RegVarSampler::sample(Rng& rng, std::span<double> out) const {
    const auto& atoms = measure.atoms();
    const double r = x0 * std::pow(uniform_open(rng), -1.0 / measure.alpha());
    std::size_t k = 0;
    if (atoms.size() > 1) {
        double u = uniform01(rng);
        for (k = 0; k + 1 < atoms.size(); ++k) {
            if (u < atoms[k].weight) break;
            u -= atoms[k].weight;
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = r * atoms[k].direction[i];
}

std::vector<std::vector<double>> sample_regvar(const RegVarSampler& s, std::size_t n, std::uint64_t seed) {
    s.validate();
    Rng rng(seed);
    std::vector<std::vector<double>> out(n, std::vector<double>(s.measure.dim()));
    for (auto& v : out) s.sample(rng, v);
    return out;
}

void XiSampler::sample(Rng& rng, std::span<double> out, const std::vector<bool>& active) const {
    thread_local std::vector<double> path;
    path.assign(grid + 1, 0.0);
    const double step = 1.0 / static_cast<double>(grid);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!active.empty() && !active[i]) {
            out[i] = 1.0;
            continue;
        }
        FbmGenerator::cached(hurst.at(i), grid)->sample(rng, step, path);
        out[i] = *std::max_element(path.begin(), path.end());
    }
}

std::vector<std::vector<double>> sample_xi(const XiSampler& s, std::size_t n, std::uint64_t seed) {
    if (s.grid < 1) throw DomainError("xi grid must have at least one step");
    std::vector<std::vector<double>> out(n, std::vector<double>(s.hurst.size()));
    for (std::size_t r = 0; r < n; ++r) {
        Rng rng = make_rng(seed, r);
        s.sample(rng, out[r]);
    }
    return out;
}

namespace {

TransformedTail transformed_tail(const LimitingMeasure& nu, const VectorSampler& eta, std::span<const double> corner,
                                 std::size_t n_mc, std::uint64_t seed, unsigned workers) {
    if (n_mc < 2) throw DomainError("n_mc must be at least 2");
    // Validates the corner once up front.
    (void)nu.rect_tail(corner);
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t dim = nu.dim();
    const double order = nu.alpha() + 0.25;
    const std::uint64_t half = n_mc / 2;
    struct Block {
        double sum = 0, sum_sq = 0, mom_a = 0, mom_b = 0;
        bool finite = true;
    };
    const std::uint64_t n_blocks = (n_mc + kReplicationBlock - 1) / kReplicationBlock;
    std::vector<Block> blocks(n_blocks);
    for_each_block(n_mc, workers, [&](std::uint64_t lo, std::uint64_t hi, std::uint64_t b, std::uint64_t& at) {
        Block blk;
        std::vector<double> e(dim);
        std::vector<double> scaled(dim);
        for (std::uint64_t i = lo; i < hi; ++i) {
            at = i;
            Rng rng = make_rng(seed, i);
            eta(rng, e);
            double m = 0.0;
            for (std::size_t j = 0; j < dim; ++j) {
                if (!(e[j] >= 0.0)) throw DomainError("eta samples must be nonnegative");
                if (corner[j] > 0.0) m = std::max(m, e[j]);
                scaled[j] = corner[j] > 0.0 ? (e[j] > 0.0 ? corner[j] / e[j] : INFINITY) : 0.0;
            }
            const double v = nu.rect_tail(scaled);
            blk.sum += v;
            blk.sum_sq += v * v;
            const double mom = std::pow(m, order);
            if (!std::isfinite(mom)) blk.finite = false;
            (i < half ? blk.mom_a : blk.mom_b) += mom;
        }
        blocks[b] = blk;
    });
    TransformedTail out;
    double sum = 0, sum_sq = 0, ma = 0, mb = 0;
    bool finite = true;
    for (const auto& b : blocks) {
        sum += b.sum;
        sum_sq += b.sum_sq;
        ma += b.mom_a;
        mb += b.mom_b;
        finite = finite && b.finite;
    }
    const double n = static_cast<double>(n_mc);
    McReport& r = out.report;
    r.kind = McReport::Kind::Mean;
    r.n_reps = n_mc;
    r.seed = seed;
    r.estimate = sum / n;
    r.std_error = std::sqrt(std::max(0.0, (sum_sq - n * r.estimate * r.estimate) / (n - 1.0)) / n);
    r.half_width = normal_quantile(0.975) * r.std_error;
    r.ci_lo = r.estimate - r.half_width;
    r.ci_hi = r.estimate + r.half_width;
    out.moment_order = order;
    out.moment_first_half = ma / static_cast<double>(std::max<std::uint64_t>(half, 1));
    out.moment_second_half = mb / static_cast<double>(std::max<std::uint64_t>(n_mc - half, 1));
    const double scale = std::max(out.moment_first_half, out.moment_second_half);
    out.moment_unstable = !finite || !std::isfinite(scale) ||
                          (scale > 0.0 && std::abs(out.moment_first_half - out.moment_second_half) > 0.5 * scale);
    if (out.moment_unstable) r.flags.emplace_back("moment_unstable");
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace

TransformedTail hat_tail_measure(const LimitingMeasure& nu, const VectorSampler& eta, std::span<const double> corner,
                                 std::size_t n_mc, std::uint64_t seed, unsigned workers) {
    return transformed_tail(nu, eta, corner, n_mc, seed, workers);
}

TransformedTail tilde_tail_measure(const LimitingMeasure& nu, std::span<const double> hurst,
                                   std::span<const double> corner, const VectorSampler& xi, std::size_t n_mc,
                                   std::uint64_t seed, unsigned workers) {
    if (hurst.size() != nu.dim()) throw DomainError("Hurst vector dimension does not match the measure");
    if (n_mc < 1000) throw DomainError("nu_tilde needs n_mc >= 1000");
    for (double h : hurst)
        if (!(h > 0.0 && h < 1.0)) throw DomainError("Hurst indices must lie in (0,1)");
    std::vector<double> hv(hurst.begin(), hurst.end());
    VectorSampler eta = [&xi, hv](Rng& rng, std::span<double> out) {
        xi(rng, out);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::pow(out[i], 1.0 / hv[i]);
    };
    return transformed_tail(nu, eta, corner, n_mc, seed, workers);
}

TransformedTail tilde_tail_measure(const LimitingMeasure& nu, std::span<const double> hurst,
                                   std::span<const double> corner, std::size_t n_mc, std::uint64_t seed,
                                   std::size_t xi_grid, unsigned workers) {
    XiSampler sampler{std::vector<double>(hurst.begin(), hurst.end()), xi_grid};
    std::vector<bool> active(corner.size());
    for (std::size_t i = 0; i < corner.size(); ++i) active[i] = corner[i] > 0.0;
    VectorSampler xi = [sampler, active](Rng& rng, std::span<double> out) { sampler.sample(rng, out, active); };
    return tilde_tail_measure(nu, hurst, corner, xi, n_mc, seed, workers);
}

double stable_subordinator_draw(double alpha, double t, Rng& rng) {
    using std::numbers::pi;
    const double v = pi * (uniform01(rng) - 0.5);
    const double w = -std::log(uniform_open(rng));
    // beta = 1: B = pi/2, S = cos(pi alpha / 2)^{-1/alpha}
    const double b = pi / 2.0;
    const double s = std::pow(std::cos(pi * alpha / 2.0), -1.0 / alpha);
    const double x = s * std::sin(alpha * (v + b)) / std::pow(std::cos(v), 1.0 / alpha) *
                     std::pow(std::cos(v - alpha * (v + b)) / w, (1.0 - alpha) / alpha);
    return std::pow(t, 1.0 / alpha) * x;
}

std::vector<double> sample_stable_subordinator(double alpha, double t, std::size_t n, std::uint64_t seed) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("stable index must lie in (0,1)");
    if (!(t > 0.0)) throw DomainError("subordinator time must be positive");
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& x : out) {
        do {
            x = stable_subordinator_draw(alpha, t, rng);
        } while (!(x > 0.0) || !std::isfinite(x));
    }
    return out;
}

double stable_tail_constant(double alpha, double horizon) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("stable index must lie in (0,1)");
    if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
    return horizon / (std::tgamma(1.0 - alpha) * std::cos(std::numbers::pi * alpha / 2.0));
}

}  // namespace gx
