#pragma once

#include <cstdint>

#include "wbary/stats.hpp"

namespace wbary {

/// Splittable counter-based generator. Each stream is (key, counter); output k
/// is a SplitMix64-style finalizer of key + k*gamma, so draws depend only on
/// (seed, fork path, draw index) and runs are bit-reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : key_(finalize(seed + kGamma)) {}

    std::uint64_t next_u64() { return finalize(key_ + (++counter_) * kGamma); }

    /// Uniform in [0,1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via inverse c.d.f. (platform-stable, no cached state).
    double normal() {
        double u = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
        return norm_quantile(u);
    }

    /// Integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    /// Independent child stream identified by tag; does not disturb this stream.
    [[nodiscard]] Rng fork(std::uint64_t tag) const {
        Rng child(0);
        child.key_ = finalize(key_ ^ finalize(tag * kGamma + 0xD1B54A32D192ED03ull));
        child.counter_ = 0;
        return child;
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

    static std::uint64_t finalize(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace wbary
