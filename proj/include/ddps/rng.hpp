#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ddps {

// Deterministic random helpers. std::mt19937_64's raw output is pinned by the
// standard, but the std::*_distribution mappings are implementation-defined, so
// the uniform/normal transforms are spelled out here: a given seed must produce
// the same stream on every toolchain (trace files are byte-compared in tests).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform in [0, 1): the top 53 bits of one engine word.
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // Integer in [0, m). Scaled floor keeps the draw count fixed at one word;
    // the O(m/2^53) bias is irrelevant at the sizes used here (shuffles, picks).
    std::uint64_t below(std::uint64_t m) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(m));
    }

    // Standard normal via Box-Muller. u1 is shifted into (0, 1] so log() is safe.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        constexpr double two_pi = 6.28318530717958647692;
        const double u1 = (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(two_pi * u2);
        have_spare_ = true;
        return r * std::cos(two_pi * u2);
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace ddps
