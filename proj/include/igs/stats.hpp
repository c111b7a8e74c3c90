#pragma once

#include <cstddef>
#include <span>

namespace igs {

// Product-moment correlation, clamped to [-1, 1].
// Throws LengthMismatchError, DomainError (n < 3 or non-finite values) and
// DegenerateInputError (a constant vector).
double pearson(std::span<const double> x, std::span<const double> y);

// Two-sided p-value of the test of zero correlation: the Student t statistic
// rho * sqrt((n-2) / (1-rho^2)) with n-2 degrees of freedom. Evaluated as
// I_{nu/(nu+t^2)}(nu/2, 1/2) = I_{1-rho^2}(nu/2, 1/2).
// rho = 0 gives exactly 1 and |rho| = 1 exactly 0.
// Throws DomainError if n < 3 or |rho| > 1.
double noncorrelation_p(double rho, std::size_t n);

// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
double regularized_incomplete_beta(double x, double a, double b);

}  // namespace igs
