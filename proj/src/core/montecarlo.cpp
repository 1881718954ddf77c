#include "gauss_extrema/montecarlo.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>

namespace gx {

bool McReport::has_flag(const std::string& f) const { return std::find(flags.begin(), flags.end(), f) != flags.end(); }

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal_distribution<double>(), p); }

namespace detail {

void rethrow_with_index(std::exception_ptr err, std::uint64_t index) {
    const std::string where = "replication " + std::to_string(index) + ": ";
    try {
        std::rethrow_exception(err);
    } catch (const DomainError& e) {
        throw DomainError(where + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(where + e.what());
    } catch (const InfeasibleError& e) {
        throw InfeasibleError(where + e.what());
    } catch (const InternalError& e) {
        throw InternalError(where + e.what());
    } catch (const std::exception& e) {
        throw std::runtime_error(where + e.what());
    }
}

}  // namespace detail

McReport binomial_report(std::uint64_t successes, std::uint64_t n, double confidence) {
    if (n == 0) throw DomainError("binomial report needs at least one replication");
    McReport r;
    r.kind = McReport::Kind::Probability;
    r.n_reps = n;
    r.n_success = successes;
    r.confidence = confidence;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    r.estimate = p;
    r.std_error = std::sqrt(p * (1.0 - p) / nn);
    const double alpha = 1.0 - confidence;
    if (successes >= 30) {
        const double z = normal_quantile(1.0 - alpha / 2.0);
        r.half_width = z * r.std_error;
        r.ci_lo = std::max(0.0, p - r.half_width);
        r.ci_hi = std::min(1.0, p + r.half_width);
    } else {
        const double k = static_cast<double>(successes);
        r.ci_lo = successes == 0 ? 0.0
                                 : boost::math::quantile(boost::math::beta_distribution<double>(k, nn - k + 1.0), alpha / 2.0);
        r.ci_hi = successes == n
                      ? 1.0
                      : boost::math::quantile(boost::math::beta_distribution<double>(k + 1.0, nn - k), 1.0 - alpha / 2.0);
        r.half_width = std::max(p - r.ci_lo, r.ci_hi - p);
        r.flags.emplace_back("exact_binomial");
        if (successes == 0) r.flags.emplace_back("zero_success");
    }
    return r;
}

McReport run_probability_mc(const EventSampler& sampler, const McOptions& opts) {
    if (opts.n_reps < 100) throw DomainError("n_reps must be at least 100");
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t n_blocks = (opts.n_reps + kReplicationBlock - 1) / kReplicationBlock;
    std::vector<std::uint64_t> block_hits(n_blocks, 0);
    for_each_block(opts.n_reps, opts.workers, [&](std::uint64_t lo, std::uint64_t hi, std::uint64_t b, std::uint64_t& at) {
        std::uint64_t hits = 0;
        for (std::uint64_t i = lo; i < hi; ++i) {
            at = i;
            Rng rng = make_rng(opts.seed, i);
            if (sampler(rng, i)) ++hits;
        }
        block_hits[b] = hits;
    });
    std::uint64_t total = 0;
    for (auto h : block_hits) total += h;
    McReport r = binomial_report(total, opts.n_reps, opts.confidence);
    r.seed = opts.seed;
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

McReport run_mean_mc(const ValueSampler& sampler, const McOptions& opts) {
    if (opts.n_reps < 2) throw DomainError("n_reps must be at least 2 for a mean estimate");
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t n_blocks = (opts.n_reps + kReplicationBlock - 1) / kReplicationBlock;
    // Per-block shifted sums keep the variance computation stable.
    struct Block {
        double sum = 0.0;
        double sum_sq = 0.0;
    };
    std::vector<Block> blocks(n_blocks);
    for_each_block(opts.n_reps, opts.workers, [&](std::uint64_t lo, std::uint64_t hi, std::uint64_t b, std::uint64_t& at) {
        Block blk;
        for (std::uint64_t i = lo; i < hi; ++i) {
            at = i;
            Rng rng = make_rng(opts.seed, i);
            const double v = sampler(rng, i);
            blk.sum += v;
            blk.sum_sq += v * v;
        }
        blocks[b] = blk;
    });
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& b : blocks) {
        sum += b.sum;
        sum_sq += b.sum_sq;
    }
    McReport r;
    r.kind = McReport::Kind::Mean;
    r.n_reps = opts.n_reps;
    r.seed = opts.seed;
    r.confidence = opts.confidence;
    const double n = static_cast<double>(opts.n_reps);
    r.estimate = sum / n;
    const double var = std::max(0.0, (sum_sq - n * r.estimate * r.estimate) / (n - 1.0));
    r.std_error = std::sqrt(var / n);
    const double z = normal_quantile(1.0 - (1.0 - opts.confidence) / 2.0);
    r.half_width = z * r.std_error;
    r.ci_lo = r.estimate - r.half_width;
    r.ci_hi = r.estimate + r.half_width;
    if (!std::isfinite(r.estimate)) r.flags.emplace_back("non_finite");
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace gx
