#include "mobsim/random.hpp"

#include <cassert>
#include <cmath>

namespace mobsim {

std::size_t pick_weighted(Rng& rng, std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    assert(total > 0.0);
    const double target = rng.u01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (target < acc) return i;
    }
    // Rounding can push the target past the final accumulator.
    for (std::size_t i = weights.size(); i-- > 0;) {
        if (weights[i] > 0.0) return i;
    }
    return weights.size() - 1;
}

double sample_truncated_power_law(Rng& rng, double x_min, double x_max,
                                  double exponent, double cutoff) {
    assert(x_min > 0.0 && x_max > x_min);
    const bool unit = std::abs(exponent - 1.0) < 1e-12;
    const double one_m = 1.0 - exponent;
    const double a = unit ? 0.0 : std::pow(x_min, one_m);
    const double b = unit ? 0.0 : std::pow(x_max, one_m);
    while (true) {
        const double u = rng.u01();
        double x;
        if (unit) {
            x = x_min * std::pow(x_max / x_min, u);
        } else {
            x = std::pow(a + u * (b - a), 1.0 / one_m);
        }
        if (rng.u01() <= std::exp(-x / cutoff)) return x;
    }
}

}  // namespace mobsim
