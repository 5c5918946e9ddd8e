#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace pcgcn {

// Deterministic splitmix64 generator. Every run funnels all randomness
// through one root seed; each consumer derives its own named stream with
// Rng::derive(seed, label), so adding or removing a consumer never shifts
// the draws seen by another. Distributions are implemented here rather
// than taken from <random> so that sequences are identical across
// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    static std::uint64_t hash_label(std::string_view label) {
        // FNV-1a 64-bit
        std::uint64_t h = 0xCBF29CE484222325ULL;
        for (unsigned char c : label) {
            h ^= c;
            h *= 0x100000001B3ULL;
        }
        return h;
    }

    static Rng derive(std::uint64_t seed, std::string_view label) {
        return Rng(mix(seed ^ mix(hash_label(label))));
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform double in [0, 1), 53 bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller. Always consumes exactly two u64
    /// draws; the spare value is discarded to keep draw counts stable.
    double normal() {
        double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; // (0, 1]
        double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

} // namespace pcgcn
