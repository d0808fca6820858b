#include "sdm/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace sdm::special {

namespace {

constexpr double kAsymptoticThreshold = 10.0;

}  // namespace

double log_gamma(double x) {
    if (!(x > 0.0)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (std::isinf(x)) {
        return x;
    }
    if (x <= 23.0 && x == std::floor(x)) {
        // (x - 1)! is exact in double precision up to 22!.
        double factorial = 1.0;
        for (double k = 2.0; k < x; k += 1.0) {
            factorial *= k;
        }
        return std::log(factorial);
    }
    double shift = 0.0;
    double product = 1.0;
    while (x < kAsymptoticThreshold) {
        product *= x;
        x += 1.0;
    }
    if (product != 1.0) {
        shift = std::log(product);
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Stirling series with Bernoulli coefficients up to B_16.
    const double series =
        inv * (1.0 / 12.0 +
               inv2 * (-1.0 / 360.0 +
                       inv2 * (1.0 / 1260.0 +
                               inv2 * (-1.0 / 1680.0 +
                                       inv2 * (1.0 / 1188.0 +
                                               inv2 * (-691.0 / 360360.0 +
                                                       inv2 * (1.0 / 156.0 +
                                                               inv2 * (-3617.0 / 122400.0))))))));
    return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + series - shift;
}

double digamma(double x) {
    if (!(x > 0.0)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double acc = 0.0;
    while (x < kAsymptoticThreshold) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double series =
        inv2 * (-1.0 / 12.0 +
                inv2 * (1.0 / 120.0 +
                        inv2 * (-1.0 / 252.0 +
                                inv2 * (1.0 / 240.0 +
                                        inv2 * (-1.0 / 132.0 +
                                                inv2 * (691.0 / 32760.0 +
                                                        inv2 * (-1.0 / 12.0)))))));
    return acc + std::log(x) - 0.5 * inv + series;
}

double trigamma(double x) {
    if (!(x > 0.0)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double acc = 0.0;
    while (x < kAsymptoticThreshold) {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double series =
        inv * inv2 *
        (1.0 / 6.0 +
         inv2 * (-1.0 / 30.0 +
                 inv2 * (1.0 / 42.0 +
                         inv2 * (-1.0 / 30.0 +
                                 inv2 * (5.0 / 66.0 +
                                         inv2 * (-691.0 / 2730.0 + inv2 * (7.0 / 6.0)))))));
    return acc + inv + 0.5 * inv2 + series;
}

double log_beta(double a, double b) {
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

}  // namespace sdm::special
