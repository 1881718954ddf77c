#include "gauss_extrema/pickands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "gauss_extrema/errors.hpp"
#include "gauss_extrema/format.hpp"

namespace gx {

std::string to_string(PickandsMethod m) { return m == PickandsMethod::Tilted ? "tilted" : "direct"; }

PickandsMethod parse_pickands_method(const std::string& s) {
    if (s == "tilted") return PickandsMethod::Tilted;
    if (s == "direct") return PickandsMethod::Direct;
    throw ConfigError("unknown Pickands method '" + s + "' (expected tilted or direct)");
}

namespace {

void validate(const PickandsOptions& o) {
    if (!(o.t_max >= 32.0)) throw DomainError("Pickands estimate needs t_max >= 32");
    if (!(o.delta > 0.0 && o.delta <= 0.05)) throw DomainError("Pickands estimate needs 0 < delta <= 0.05");
    if (o.n_reps < 1000) throw DomainError("Pickands estimate needs n_reps >= 1000");
}

// One replication's summand for a grid path z[0..n] with variances var[k].
double tilted_summand(std::span<const double> z, std::span<const double> var, Rng& rng) {
    const std::size_t n = z.size() - 1;
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, n)(rng);
    thread_local std::vector<double> w;
    w.resize(n + 1);
    double mx = -INFINITY;
    for (std::size_t k = 0; k <= n; ++k) {
        const std::size_t lag = k > j ? k - j : j - k;
        w[k] = std::sqrt(2.0) * z[k] + var[j] - var[lag];
        mx = std::max(mx, w[k]);
    }
    double s = 0.0;
    for (std::size_t k = 0; k <= n; ++k) s += std::exp(w[k] - mx);
    return 1.0 / s;
}

double direct_summand(std::span<const double> z, std::span<const double> var) {
    double mx = -INFINITY;
    for (std::size_t k = 0; k < z.size(); ++k) mx = std::max(mx, std::sqrt(2.0) * z[k] - var[k]);
    return std::exp(mx);
}

}  // namespace

PickandsEstimate pickands_estimate(const VarianceProfile& z, const PickandsOptions& opts) {
    validate(opts);
    const auto n = static_cast<std::size_t>(std::llround(opts.t_max / opts.delta));
    const double delta = opts.t_max / static_cast<double>(n);
    std::vector<double> var(n + 1);
    for (std::size_t k = 0; k <= n; ++k) var[k] = z.variance(delta * static_cast<double>(k));

    const bool pair = z.is_single_term();
    std::shared_ptr<const FbmGenerator> gen;
    if (pair) gen = FbmGenerator::cached(z.terms().front().hurst, n);
    const double pair_scale = pair ? std::sqrt(z.terms().front().weight) : 1.0;

    auto summand = [&](std::span<const double> path, Rng& rng) {
        return opts.method == PickandsMethod::Tilted ? tilted_summand(path, var, rng) : direct_summand(path, var);
    };

    McOptions mc{opts.n_reps, opts.seed, opts.workers, 0.95};
    McReport rep = run_mean_mc(
        [&](Rng& rng, std::uint64_t) {
            thread_local std::vector<double> a;
            thread_local std::vector<double> b;
            a.assign(n + 1, 0.0);
            if (pair) {
                b.assign(n + 1, 0.0);
                gen->sample(rng, delta, a, b);
                for (std::size_t k = 0; k <= n; ++k) {
                    a[k] *= pair_scale;
                    b[k] *= pair_scale;
                }
                const double ya = summand(a, rng);
                const double yb = summand(b, rng);
                return 0.5 * (ya + yb);
            }
            add_profile_path(z, delta, a, rng);
            return summand(a, rng);
        },
        mc);

    if (!std::isfinite(rep.estimate) || !std::isfinite(rep.std_error))
        throw InfeasibleError("Pickands sample mean overflowed at t_max = " + format_double(opts.t_max) +
                              "; use a smaller t_max or the tilted method");

    const double scale = opts.method == PickandsMethod::Tilted ? static_cast<double>(n + 1) / opts.t_max
                                                               : 1.0 / opts.t_max;
    PickandsEstimate out;
    out.estimate = scale * rep.estimate;
    out.std_error = scale * rep.std_error;
    out.n_reps = opts.n_reps;
    return out;
}

PickandsEstimate pickands_estimate(double hurst, const PickandsOptions& opts) {
    return pickands_estimate(VarianceProfile::fbm(hurst), opts);
}

bool PickandsRecord::same_key(const PickandsRecord& o) const {
    return profile == o.profile && t_max == o.t_max && delta == o.delta && n_reps == o.n_reps && seed == o.seed &&
           method == o.method;
}

std::string profile_key(const VarianceProfile& z) {
    if (z.is_single_term() && z.terms().front().weight == 1.0) return "H=" + format_double(z.terms().front().hurst);
    std::string s = "profile=";
    for (std::size_t i = 0; i < z.terms().size(); ++i) {
        if (i) s += ',';
        s += format_double(z.terms()[i].weight) + ':' + format_double(z.terms()[i].hurst);
    }
    return s;
}

std::string format_record(const PickandsRecord& r) {
    std::string s = "v1 " + r.profile;
    s += " t_max=" + format_double(r.t_max);
    s += " delta=" + format_double(r.delta);
    s += " n_reps=" + std::to_string(r.n_reps);
    s += " seed=" + std::to_string(r.seed);
    s += " method=" + to_string(r.method);
    s += " estimate=" + format_double(r.estimate);
    s += " se=" + format_double(r.std_error);
    return s;
}

std::optional<PickandsRecord> parse_record(const std::string& line) {
    std::istringstream is(line);
    std::string tok;
    if (!(is >> tok) || tok != "v1") return std::nullopt;
    std::map<std::string, std::string> kv;
    std::string profile;
    while (is >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) return std::nullopt;
        const std::string key = tok.substr(0, eq);
        if (key == "H" || key == "profile") {
            if (!profile.empty()) return std::nullopt;
            profile = tok;
            continue;
        }
        if (!kv.emplace(key, tok.substr(eq + 1)).second) return std::nullopt;
    }
    if (profile.empty() || kv.size() != 7) return std::nullopt;
    try {
        PickandsRecord r;
        r.profile = profile;
        r.t_max = parse_double(kv.at("t_max"));
        r.delta = parse_double(kv.at("delta"));
        r.n_reps = parse_u64(kv.at("n_reps"));
        r.seed = parse_u64(kv.at("seed"));
        r.method = parse_pickands_method(kv.at("method"));
        r.estimate = parse_double(kv.at("estimate"));
        r.std_error = parse_double(kv.at("se"));
        return r;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

namespace {
std::mutex& cache_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

std::filesystem::path PickandsCache::default_path() {
    if (const char* env = std::getenv("GAUSS_EXTREMA_CACHE"); env != nullptr && *env != '\0') return env;
    return "gauss_extrema_pickands.cache";
}

std::optional<PickandsRecord> PickandsCache::lookup(const PickandsRecord& key) const {
    std::lock_guard lock(cache_mutex());
    std::ifstream in(path_);
    if (!in) return std::nullopt;
    std::optional<PickandsRecord> found;
    std::string line;
    while (std::getline(in, line)) {
        auto r = parse_record(line);
        if (r && r->same_key(key)) found = r;
    }
    return found;
}

void PickandsCache::store(const PickandsRecord& record) const {
    std::lock_guard lock(cache_mutex());
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    std::ofstream out(path_, std::ios::app);
    if (!out) throw std::runtime_error("cannot write Pickands cache " + path_.string());
    out << format_record(record) << '\n';
}

PickandsEstimate cached_pickands_estimate(const VarianceProfile& z, const PickandsOptions& opts,
                                          const PickandsCache* cache) {
    PickandsRecord key;
    key.profile = profile_key(z);
    key.t_max = opts.t_max;
    key.delta = opts.delta;
    key.n_reps = opts.n_reps;
    key.seed = opts.seed;
    key.method = opts.method;
    if (cache != nullptr) {
        if (auto hit = cache->lookup(key)) {
            PickandsEstimate e;
            e.estimate = hit->estimate;
            e.std_error = hit->std_error;
            e.n_reps = hit->n_reps;
            e.from_cache = true;
            return e;
        }
    }
    PickandsEstimate e = pickands_estimate(z, opts);
    if (cache != nullptr) {
        key.estimate = e.estimate;
        key.std_error = e.std_error;
        cache->store(key);
    }
    return e;
}

PickandsProvider fixed_pickands(std::vector<std::pair<double, double>> fbm_values) {
    return [values = std::move(fbm_values)](const VarianceProfile& z) -> PickandsValue {
        if (z.is_single_term()) {
            const auto& t = z.terms().front();
            for (const auto& [h, v] : values)
                if (std::abs(h - t.hurst) <= 1e-12) return {std::pow(t.weight, 1.0 / (2.0 * t.hurst)) * v, 0.0};
        }
        throw InfeasibleError("no Pickands constant supplied for profile " + z.describe() +
                              "; configure an estimate instead");
    };
}

PickandsProvider brownian_pickands() { return fixed_pickands({{0.5, 1.0}}); }

PickandsProvider estimated_pickands(PickandsOptions opts, std::optional<std::filesystem::path> cache_path,
                                    PickandsNote note) {
    struct State {
        std::mutex mutex;
        std::map<std::string, PickandsValue> memo;
    };
    auto state = std::make_shared<State>();
    return [opts, cache_path, state, note](const VarianceProfile& z) -> PickandsValue {
        // Single terms reduce to the standard fBm constant by self-similarity.
        const bool single = z.is_single_term();
        const VarianceProfile target = single ? VarianceProfile::fbm(z.terms().front().hurst) : z;
        const std::string key = profile_key(target);
        PickandsValue base;
        {
            std::lock_guard lock(state->mutex);
            auto it = state->memo.find(key);
            if (it != state->memo.end()) {
                base = it->second;
            } else {
                std::optional<PickandsCache> cache;
                if (cache_path) cache.emplace(*cache_path);
                const auto e = cached_pickands_estimate(target, opts, cache ? &*cache : nullptr);
                if (note) {
                    std::string where = cache ? " (" + cache->path().string() + ")" : "";
                    note("pickands " + key + ": " + (!cache ? "no cache" : e.from_cache ? "cache hit" : "cache miss, stored") +
                         where);
                }
                base = {e.estimate, e.std_error};
                state->memo.emplace(key, base);
            }
        }
        if (!single) return base;
        const auto& t = z.terms().front();
        const double f = std::pow(t.weight, 1.0 / (2.0 * t.hurst));
        return {f * base.value, f * base.std_error};
    };
}

}  // namespace gx
