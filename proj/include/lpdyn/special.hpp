#pragma once
#include <complex>
#include <functional>
#include <vector>

namespace lpdyn {

// Dilogarithm Li2(z) on the whole complex plane (principal branch).
std::complex<double> dilog(std::complex<double> z);

// Bloch-Wigner function D(z) = Im(Li2(z)) + log|z| * arg(1 - z).
// Real-analytic away from {0, 1}, zero on the real axis.
double bloch_wigner(std::complex<double> z);

// D(e^{2 i theta}) = sum_{n>=1} sin(2 n theta) / n^2, accurate to 1e-12.
double circle_dilog(double theta);

// Chebyshev polynomial of the first kind: T_r(cos t) = cos(r t).
double chebyshev_t(int r, double x);
// Integer coefficients of T_r in the monomial basis, degree r (r <= 62).
std::vector<long long> chebyshev_t_coeffs(int r);

// The Smyth constant m(x1 + x2 + 1) = D(e^{i pi / 3}) / pi.
double smyth_constant();

// Closed form for m(x4) of the rank-2 recurrence with exponent r:
// r times the Smyth constant.
double mx4_closed(int r);

// The r solutions t*_1 < ... < t*_r in (0, pi) of
//   2^{r-1} |sin(r t / 2)|^r = sin(t / 2),
// located by a sign scan on a grid of 200 r cells plus bisection to 1e-13.
// Throws if the scan does not find exactly r roots or a residual check fails.
std::vector<double> pr_roots(int r);

// The degree r^2 - 1 polynomial P_r(X) = (1 - T_r(X))^r / (2^{1-r} (1 - X)) - 1,
// evaluated at X (for X != 1); cos of each pr_roots value is a zero of P_r.
double pr_eval(int r, double x);

// Closed form for m(x5) of the rank-2 recurrence with exponent r (r >= 1):
//   (r / pi) * sum_{j=1}^{r} (-1)^{j+1} (D(e^{i r t*_j}) - D(e^{i t*_j})),
// and 0 for r = 1.
double mx5_closed(int r);

// Independent check of mx5_closed: adaptive integration of
// log|(1 - z)/(1 - z^r)^r| over the arcs of the unit circle where that
// modulus exceeds 1, times r / pi.
double mx5_quadrature(int r);

// m(x5) for the Markoff map: twice the Smyth constant.
double markoff_x5_closed();
// m(x6) for the Somos-4 map: the Smyth constant.
double somos_x6_closed();

// The two-variable constant C* = m(log|largest root of z^2 - K z + 1|)
// averaged over K = x1/x2 + x2/x1 + 1/(x1 x2) with x1, x2 ranging over the
// M-th roots of unity (M >= 25).  threads > 1 splits the outer row loop.
double cstar_constant(int M, int threads = 1);

// Doubly-exponential (tanh-sinh) quadrature on [a, b]; integrable endpoint
// singularities are fine.  target is an absolute error goal.
double tanh_sinh_quad(const std::function<double(double)>& f, double a, double b, double target = 1e-12);

} // namespace lpdyn
