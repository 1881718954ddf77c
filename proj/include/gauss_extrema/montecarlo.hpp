#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "gauss_extrema/errors.hpp"
#include "gauss_extrema/rng.hpp"

namespace gx {

struct McReport {
    enum class Kind { Probability, Mean };

    Kind kind = Kind::Probability;
    double estimate = 0.0;
    double std_error = 0.0;
    double half_width = 0.0;  // at `confidence`
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::uint64_t n_reps = 0;
    std::uint64_t n_success = 0;  // probability targets only
    std::uint64_t seed = 0;
    double confidence = 0.95;
    double wall_time = 0.0;  // seconds; never serialised
    std::vector<std::string> flags;

    bool has_flag(const std::string& f) const;
};

struct McOptions {
    std::uint64_t n_reps = 1000;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    double confidence = 0.95;
};

// Bernoulli outcome of replication `index`; the rng is already seeded from
// (root seed, index).
using EventSampler = std::function<bool(Rng&, std::uint64_t index)>;
using ValueSampler = std::function<double(Rng&, std::uint64_t index)>;

McReport run_probability_mc(const EventSampler& sampler, const McOptions& opts);
McReport run_mean_mc(const ValueSampler& sampler, const McOptions& opts);

// Binomial interval: normal approximation when successes >= 30, Clopper-Pearson otherwise.
McReport binomial_report(std::uint64_t successes, std::uint64_t n, double confidence);

double normal_quantile(double p);

// Replications are grouped in fixed blocks so that reductions happen in the
// same order whatever the worker count.
inline constexpr std::uint64_t kReplicationBlock = 1024;

namespace detail {

[[noreturn]] void rethrow_with_index(std::exception_ptr err, std::uint64_t index);

}  // namespace detail

// Calls body(block_begin, block_end, block_id) for consecutive blocks of
// kReplicationBlock indices, spread over `workers` threads. The first failing
// replication (lowest index) is rethrown with its index in the message.
template <class Body>
void for_each_block(std::uint64_t n, unsigned workers, Body&& body) {
    const std::uint64_t n_blocks = (n + kReplicationBlock - 1) / kReplicationBlock;
    std::atomic<std::uint64_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_err;
    std::uint64_t first_err_index = UINT64_MAX;

    auto worker = [&] {
        for (;;) {
            const std::uint64_t b = next.fetch_add(1);
            if (b >= n_blocks) return;
            const std::uint64_t lo = b * kReplicationBlock;
            const std::uint64_t hi = std::min(n, lo + kReplicationBlock);
            std::uint64_t failed_at = lo;
            try {
                body(lo, hi, b, failed_at);
            } catch (...) {
                std::lock_guard lock(err_mutex);
                if (failed_at < first_err_index) {
                    first_err_index = failed_at;
                    first_err = std::current_exception();
                }
                next.store(n_blocks);
                return;
            }
        }
    };

    const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::uint64_t>(n_blocks, 1))));
    if (w == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(w);
        for (unsigned i = 0; i < w; ++i) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (first_err) detail::rethrow_with_index(first_err, first_err_index);
}

}  // namespace gx
