#pragma once

#include <cmath>
#include <cstdint>

#include "kobalab/geometry.hpp"

namespace kobalab {

// Counter-based stream: every sample index owns an independent generator
// derived from (seed, stream, index), so parallel schedules cannot perturb
// the draws.
class Rng {
  public:
    Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
        state_ = mix(seed + 0x9e3779b97f4a7c15ull * (stream + 1));
        state_ = mix(state_ ^ mix(index + 0xbf58476d1ce4e5b9ull));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    double log_uniform(double a, double b) {
        return std::exp(uniform(std::log(a), std::log(b)));
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0, u2 = 0;
        do { u1 = uniform(); } while (u1 <= 0);
        u2 = uniform();
        const double m = std::sqrt(-2.0 * std::log(u1));
        spare_ = m * std::sin(6.283185307179586476925286766559 * u2);
        have_spare_ = true;
        return m * std::cos(6.283185307179586476925286766559 * u2);
    }

    RVec sphere(int d) {
        RVec u(d);
        double n2 = 0;
        do {
            for (int j = 0; j < d; ++j) u[j] = normal();
            n2 = u.squaredNorm();
        } while (n2 < 1e-24);
        return u / std::sqrt(n2);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_ = 0;
    bool have_spare_ = false;
    double spare_ = 0;
};

}  // namespace kobalab
