#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace mobsim {

// Deterministic RNG used across the whole artifact.  Uniform doubles are
// derived from the raw engine output instead of std distributions so that
// identical seeds give identical streams on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform in [0, 1).
    double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    std::uint64_t raw() { return eng_(); }

    // Uniform integer in [0, n).
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(u01() * static_cast<double>(n)) % n;
    }

  private:
    std::mt19937_64 eng_;
};

// Index drawn proportionally to non-negative weights (total must be > 0).
std::size_t pick_weighted(Rng& rng, std::span<const double> weights);

// One draw from the density p(x) ~ x^-exponent * exp(-x / cutoff) on
// [x_min, x_max], via rejection: inverse-CDF proposal from the bounded pure
// power law, acceptance exp(-x / cutoff).
double sample_truncated_power_law(Rng& rng, double x_min, double x_max,
                                  double exponent, double cutoff);

// Support caps for the two samplers built on the law above.  Mass beyond the
// caps is negligible for the default cutoffs (tau = 17 h, lambda = 104).
inline constexpr double kWaitingTimeSupportMaxHours = 1.0e4;
inline constexpr double kRelevanceSupportMax = 1.0e8;

}  // namespace mobsim
