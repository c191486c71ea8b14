#pragma once

#include <cstdint>
#include <complex>
#include <cmath>

#include "otfsisac/common.hpp"

namespace otfsisac {

/// Deterministic counter-seeded generator (splitmix64 core).
///
/// Every consumer derives its own stream from (master seed, stream id,
/// substream id), so results never depend on call order across threads or
/// on the platform's standard-library distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) { next(); }

    /// Derives an independent stream, e.g. (master, trial index, purpose).
    static Rng stream(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
        Rng r(master);
        r.state_ ^= mix(a + 0x9E3779B97F4A7C15ULL);
        r.next();
        r.state_ ^= mix(b + 0xD1B54A32D192ED03ULL);
        r.next();
        return r;
    }

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t uniform_int(std::uint64_t n) { return next() % n; }

    /// Standard normal via Box-Muller (portable, no libstdc++ dependence).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * PI * uniform();
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

    /// Circularly symmetric complex Gaussian with E|z|^2 = sigma2.
    cd cnormal(double sigma2) {
        const double s = std::sqrt(sigma2 / 2.0);
        return {s * normal(), s * normal()};
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Stream ids keeping the per-purpose substreams apart.
enum : std::uint64_t {
    STREAM_FRAME = 1,
    STREAM_MASKS = 2,
    STREAM_NOISE = 3,
    STREAM_CHANNEL = 4,
    STREAM_SCENE = 5,
    STREAM_MISC = 6,
};

}  // namespace otfsisac
