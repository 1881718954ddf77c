#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>

#include "gauss_extrema/gaussian_paths.hpp"
#include "gauss_extrema/montecarlo.hpp"

namespace gx {

enum class PickandsMethod {
    // E exp(sup W) computed under the mixture measure tilted by exp(W(s)),
    // s uniform on the grid; same target, bounded summands.
    Tilted,
    // Plain sample mean of exp(sup W); heavy tailed, kept for comparison.
    Direct,
};

std::string to_string(PickandsMethod m);
PickandsMethod parse_pickands_method(const std::string& s);

struct PickandsOptions {
    double t_max = 64.0;
    double delta = 0.02;
    std::uint64_t n_reps = 10000;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    PickandsMethod method = PickandsMethod::Tilted;
};

struct PickandsEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t n_reps = 0;
    bool from_cache = false;
};

// (1/T) E exp(max_{k delta <= T} (sqrt(2) Z(k delta) - sigma_Z^2(k delta)))
PickandsEstimate pickands_estimate(const VarianceProfile& z, const PickandsOptions& opts);
PickandsEstimate pickands_estimate(double hurst, const PickandsOptions& opts);

struct PickandsRecord {
    std::string profile;  // "H=<h>" for standard fBm, otherwise "profile=w:h,..."
    double t_max = 0.0;
    double delta = 0.0;
    std::uint64_t n_reps = 0;
    std::uint64_t seed = 0;
    PickandsMethod method = PickandsMethod::Tilted;
    double estimate = 0.0;
    double std_error = 0.0;

    bool same_key(const PickandsRecord& other) const;
};

std::string profile_key(const VarianceProfile& z);
std::string format_record(const PickandsRecord& r);
std::optional<PickandsRecord> parse_record(const std::string& line);

// Plain-text cache, one "v1 ..." record per line. Lookups read the file;
// stores append under a process-wide lock.
class PickandsCache {
public:
    explicit PickandsCache(std::filesystem::path path) : path_(std::move(path)) {}

    // GAUSS_EXTREMA_CACHE if set, else ./gauss_extrema_pickands.cache
    static std::filesystem::path default_path();

    const std::filesystem::path& path() const { return path_; }
    std::optional<PickandsRecord> lookup(const PickandsRecord& key) const;
    void store(const PickandsRecord& record) const;

private:
    std::filesystem::path path_;
};

// Estimate with the cache consulted first; a miss computes and stores.
PickandsEstimate cached_pickands_estimate(const VarianceProfile& z, const PickandsOptions& opts,
                                          const PickandsCache* cache);

struct PickandsValue {
    double value = 0.0;
    double std_error = 0.0;
};

// Supplies generalized Pickands constants H_Z for a variance profile.
using PickandsProvider = std::function<PickandsValue(const VarianceProfile&)>;

// Known H_{B_H} values keyed by H; single-term profiles w t^{2H} map to
// w^{1/(2H)} H_{B_H}. Anything else is reported infeasible.
PickandsProvider fixed_pickands(std::vector<std::pair<double, double>> fbm_values);
// H_{B_{1/2}} = 1.
PickandsProvider brownian_pickands();
// Receives one line per estimate: cache hit, cache miss or no cache.
using PickandsNote = std::function<void(const std::string&)>;

// Estimates (through the cache when given).
PickandsProvider estimated_pickands(PickandsOptions opts, std::optional<std::filesystem::path> cache_path,
                                    PickandsNote note = {});

}  // namespace gx
