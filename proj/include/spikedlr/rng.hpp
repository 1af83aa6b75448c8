#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace spikedlr {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent stream key from (master seed, replicate, tag).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replicate,
                                 std::uint64_t tag = 0) {
    std::uint64_t s = splitmix64(master ^ 0x5851f42d4c957f2dULL);
    s = splitmix64(s ^ splitmix64(replicate));
    s = splitmix64(s ^ splitmix64(tag + 0x9e3779b97f4a7c15ULL));
    return s;
}

// Gaussian stream with a fixed Box-Muller implementation. The standard
// library's normal_distribution is implementation-defined, which would break
// the bit-identical determinism contract for EigenSample.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}

    double uniform01() {
        // in (0,1], 53-bit resolution
        return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1p-53;
    }

    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 gen_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace spikedlr
