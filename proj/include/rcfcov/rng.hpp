#pragma once
// Deterministic random stream: xoshiro256++ seeded through splitmix64, with
// the normal and chi-square variates the samplers need. Streams have value
// semantics; child(i) derives an independent stream so per-trial work can be
// scheduled in any order without changing the draws.

#include <array>
#include <cmath>
#include <cstdint>

#include "rcfcov/errors.hpp"

namespace rcfcov::synthetic {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
}

}  // namespace detail

class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : seed_(seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = detail::splitmix64(sm);
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        auto& s = state_;
        const std::uint64_t result = detail::rotl(s[0] + s[3], 23) + s[0];
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = detail::rotl(s[3], 45);
        return result;
    }

    // Uniform on (0, 1]: never returns 0, so logs are safe.
    double uniform_pos() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) {
        const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    // Standard normal via Box-Muller, caching the second variate.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform_pos();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Chi-square with integer dof: direct sum of squares for small dof,
    // otherwise 2 * Gamma(dof/2, 1) by Marsaglia-Tsang.
    double chi_square(int dof) {
        if (dof < 1)
            throw DomainError("chi_square: dof must be >= 1");
        if (dof <= 30) {
            double s = 0.0;
            for (int i = 0; i < dof; ++i) {
                const double z = normal();
                s += z * z;
            }
            return s;
        }
        return 2.0 * gamma_shape(0.5 * dof);
    }

    // Independent stream derived from this stream's seed and a child index.
    RngStream child(std::uint64_t index) const {
        std::uint64_t sm = seed_ ^ (0x632be59bd9b4e019ULL + index);
        const std::uint64_t mixed = detail::splitmix64(sm) ^ detail::splitmix64(sm);
        return RngStream(mixed);
    }

  private:
    // Marsaglia-Tsang for shape >= 1 (always true here: dof > 30).
    double gamma_shape(double shape) {
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double z;
            double v;
            do {
                z = normal();
                v = 1.0 + c * z;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_pos();
            if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v))
                return d * v;
        }
    }

    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_{};
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace rcfcov::synthetic
