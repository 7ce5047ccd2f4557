#pragma once
// Digamma via upward recurrence into the asymptotic regime. Accuracy target
// is ~1e-12 over the half-integer arguments the risk formula needs.

#include <cmath>

#include "rcfcov/errors.hpp"

namespace rcfcov::linalg {

inline double digamma(double x) {
    if (!(x > 0.0))
        throw DomainError("digamma: argument must be positive");
    double value = 0.0;
    // psi(x) = psi(x + 1) - 1/x, applied until x >= 10.
    while (x < 10.0) {
        value -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Asymptotic series: log x - 1/(2x) - sum B_{2k} / (2k x^{2k}).
    double series = -inv2 * (1.0 / 12.0 +
                    inv2 * (-1.0 / 120.0 +
                    inv2 * (1.0 / 252.0 +
                    inv2 * (-1.0 / 240.0 +
                    inv2 * (1.0 / 132.0 +
                    inv2 * (-691.0 / 32760.0 +
                    inv2 * (1.0 / 12.0)))))));
    value += std::log(x) - 0.5 * inv + series;
#ifdef RCFCOV_FAULT_DIGAMMA
    // Fault injection for the self-test negative control: a deliberate bias
    // that the closed-form-vs-Monte-Carlo check must flag.
    value += 0.25;
#endif
    return value;
}

}  // namespace rcfcov::linalg
