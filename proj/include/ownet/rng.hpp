#pragma once

#include <cstdint>
#include <string_view>

namespace ownet {

// SplitMix64: small counter-style generator with full-avalanche output.
// Used everywhere randomness is needed so results are identical across
// platforms and standard libraries (std::uniform_int_distribution is not
// portable bit-for-bit).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n) via the multiply-shift reduction.
    // Bias is O(n / 2^64), negligible for permutation indices.
    std::uint64_t bounded(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

// 64-bit FNV-1a over a byte string. Stable across runs and platforms;
// used to derive per-node random streams and input fingerprints.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Stafford mix13 finalizer, applied when combining seed components.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Deterministic stream seed for one (master_seed, run, node) triple.
// Each Monte Carlo run derives its own streams, so partitioning runs
// across workers cannot change any draw.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                        std::uint64_t run_index,
                                        std::uint64_t node_hash) {
    std::uint64_t s = mix64(master_seed ^ 0x8BADF00D5EEDC0DEULL);
    s = mix64(s ^ (run_index + 0x9E3779B97F4A7C15ULL));
    s = mix64(s ^ node_hash);
    return s;
}

} // namespace ownet
