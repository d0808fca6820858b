#pragma once

// Gamma-family special functions used by the score and Fisher information
// formulas. All routines accept x > 0 only and are accurate to ~1e-13
// relative on the ranges the distributions exercise.

namespace sdm::special {

/// ln Γ(x) by upward recurrence to x >= 10 followed by the Stirling series.
double log_gamma(double x);

/// ψ(x) = d/dx ln Γ(x).
double digamma(double x);

/// ψ'(x).
double trigamma(double x);

/// ln B(a, b) = ln Γ(a) + ln Γ(b) - ln Γ(a + b).
double log_beta(double a, double b);

}  // namespace sdm::special
