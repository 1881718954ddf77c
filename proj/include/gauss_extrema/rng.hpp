#pragma once

#include <cstdint>
#include <random>

namespace gx {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-derived stream seed: replication `index` of root `seed` gets a
// stream that does not depend on which worker runs it.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t sub) {
    return stream_seed(stream_seed(seed, index), sub);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t index) { return Rng(stream_seed(seed, index)); }

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

// Uniform on (0,1], safe for log and negative powers.
inline double uniform_open(Rng& rng) { return 1.0 - uniform01(rng); }

inline double std_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

}  // namespace gx
