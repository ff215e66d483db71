#pragma once
#include <complex>
#include <vector>

#include "lpdyn/bigint.hpp"

namespace lpdyn {

// All roots of c_0 + c_1 z + ... + c_d z^d (leading zeros trimmed; zero roots
// from trailing zero coefficients are included).  Companion-matrix
// eigenvalues for moderate degrees, Aberth-Ehrlich for large ones; both are
// finished by Aberth sweeps until the iteration stalls.
std::vector<std::complex<double>> polynomial_roots(const std::vector<std::complex<double>>& coeffs);

// log Mahler measure of a univariate polynomial by Jensen's formula:
// log|c_d| + sum_j max(log|root_j|, 0).
double jensen_univariate(const std::vector<std::complex<double>>& coeffs);
// Integer-coefficient version: the leading term enters exactly; the
// coefficients are scaled by a common power of two (which does not move the
// roots) before conversion to floating point.
double jensen_univariate(const std::vector<Int>& coeffs);

} // namespace lpdyn
