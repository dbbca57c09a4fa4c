#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ssotfs/types.hpp"

namespace ssotfs {

// splitmix64; used to whiten seed material when deriving substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic random stream. Substreams are derived from a master seed and
/// up to three counters, so Monte-Carlo trials can draw independently in any
/// order (and from any thread) while staying reproducible.
///
/// Uniform and Gaussian variates are mapped from raw engine output explicitly
/// rather than through std:: distributions, so a (seed, counters) tuple pins
/// the exact sample sequence.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix(seed, 0, 0, 0)) {}

    static Rng stream(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                      std::uint64_t c = 0) {
        return Rng(master, a, b, c);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        // rejection sampling keeps the draw unbiased
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return lo + static_cast<int>(r % span);
    }

    /// Standard normal via Box-Muller.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    cdouble cgaussian(double variance) {
        const double s = std::sqrt(variance / 2.0);
        return {s * gaussian(), s * gaussian()};
    }

    /// Fisher-Yates partial shuffle: first k entries of [0, n) without replacement.
    template <typename Out>
    void sample_distinct(int n, int k, Out out) {
        std::vector<int> pool(n);
        for (int i = 0; i < n; ++i) pool[i] = i;
        for (int i = 0; i < k; ++i) {
            const int j = uniform_int(i, n - 1);
            std::swap(pool[i], pool[j]);
            *out++ = pool[i];
        }
    }

private:
    Rng(std::uint64_t master, std::uint64_t a, std::uint64_t b, std::uint64_t c)
        : engine_(mix(master, a, b, c)) {}

    static std::uint64_t mix(std::uint64_t master, std::uint64_t a, std::uint64_t b,
                             std::uint64_t c) {
        std::uint64_t s = master;
        std::uint64_t h = splitmix64(s);
        s ^= a * 0xd1342543de82ef95ULL;
        h ^= splitmix64(s);
        s ^= b * 0xaf251af3b0f025b5ULL;
        h ^= splitmix64(s);
        s ^= c * 0x9e3779b97f4a7c15ULL;
        h ^= splitmix64(s);
        return h;
    }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace ssotfs
