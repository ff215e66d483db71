#include "lpdyn/roots.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "lpdyn/errors.hpp"

namespace lpdyn {

namespace {

using cdouble = std::complex<double>;

cdouble horner(const std::vector<cdouble>& c, cdouble z) {
    cdouble acc(0.0, 0.0);
    for (size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
    return acc;
}

cdouble horner_deriv(const std::vector<cdouble>& c, cdouble z) {
    cdouble acc(0.0, 0.0);
    for (size_t i = c.size(); i-- > 1;) acc = acc * z + c[i] * static_cast<double>(i);
    return acc;
}

// One Aberth-Ehrlich sweep; returns the largest relative step taken.
double aberth_sweep(const std::vector<cdouble>& c, std::vector<cdouble>& roots) {
    const size_t d = roots.size();
    double worst = 0.0;
    for (size_t i = 0; i < d; ++i) {
        const cdouble z = roots[i];
        const cdouble p = horner(c, z);
        if (p == cdouble(0.0, 0.0)) continue;
        const cdouble dp = horner_deriv(c, z);
        cdouble repel(0.0, 0.0);
        for (size_t j = 0; j < d; ++j) {
            if (j == i) continue;
            const cdouble diff = z - roots[j];
            if (diff == cdouble(0.0, 0.0)) continue;
            repel += 1.0 / diff;
        }
        const cdouble newton = dp / p; // reciprocal of the Newton step
        const cdouble denom = newton - repel;
        if (denom == cdouble(0.0, 0.0)) continue;
        const cdouble step = 1.0 / denom;
        roots[i] = z - step;
        const double scale = std::max(1.0, std::abs(z));
        worst = std::max(worst, std::abs(step) / scale);
    }
    return worst;
}

std::vector<cdouble> companion_eigen_roots(const std::vector<cdouble>& c) {
    const size_t d = c.size() - 1;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    const cdouble lead = c[d];
    for (size_t i = 0; i + 1 < d; ++i) m(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = 1.0;
    for (size_t i = 0; i < d; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d - 1)) = -c[i] / lead;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw Error("eigenvalue iteration failed to converge");
    std::vector<cdouble> roots(d);
    for (size_t i = 0; i < d; ++i) roots[i] = solver.eigenvalues()(static_cast<Eigen::Index>(i));
    return roots;
}

std::vector<cdouble> circle_start_roots(const std::vector<cdouble>& c) {
    const size_t d = c.size() - 1;
    // Cauchy-style radius estimate from the coefficient profile.
    double radius = 0.0;
    const double lead = std::abs(c[d]);
    for (size_t i = 0; i < d; ++i) {
        if (c[i] == cdouble(0.0, 0.0)) continue;
        radius = std::max(radius, std::pow(std::abs(c[i]) / lead, 1.0 / static_cast<double>(d - i)));
    }
    // Start just outside the estimated outermost root: from far away the
    // Newton step only contracts by ~1/d per sweep, so a tight circle saves
    // hundreds of sweeps at high degree.
    radius = 1.1 * std::max(radius, 0.5);
    std::vector<cdouble> roots(d);
    for (size_t i = 0; i < d; ++i) {
        const double angle = 2.0 * M_PI * (static_cast<double>(i) + 0.35) / static_cast<double>(d) + 0.5 / static_cast<double>(d);
        roots[i] = radius * cdouble(std::cos(angle), std::sin(angle));
    }
    return roots;
}

} // namespace

std::vector<cdouble> polynomial_roots(const std::vector<cdouble>& coeffs) {
    std::vector<cdouble> c = coeffs;
    while (!c.empty() && c.back() == cdouble(0.0, 0.0)) c.pop_back();
    if (c.empty()) throw Error("cannot take roots of the zero polynomial");
    std::vector<cdouble> zeros_at_origin;
    size_t first = 0;
    while (first < c.size() && c[first] == cdouble(0.0, 0.0)) ++first;
    if (first > 0) {
        zeros_at_origin.assign(first, cdouble(0.0, 0.0));
        c.erase(c.begin(), c.begin() + static_cast<long>(first));
    }
    if (c.size() <= 1) return zeros_at_origin;

    // Scale so the largest coefficient magnitude is 1 (the roots do not move).
    double big = 0.0;
    for (const cdouble& v : c) big = std::max(big, std::abs(v));
    for (cdouble& v : c) v /= big;

    const size_t d = c.size() - 1;
    std::vector<cdouble> roots;
    if (d == 1) {
        roots = {-c[0] / c[1]};
    } else if (d <= 500) {
        roots = companion_eigen_roots(c);
    } else {
        roots = circle_start_roots(c);
    }
    const int max_sweeps = (d <= 500) ? 12 : 400;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        const double moved = aberth_sweep(c, roots);
        if (moved < 1e-14) break;
    }
    roots.insert(roots.end(), zeros_at_origin.begin(), zeros_at_origin.end());
    return roots;
}

double jensen_univariate(const std::vector<cdouble>& coeffs) {
    std::vector<cdouble> c = coeffs;
    while (!c.empty() && c.back() == cdouble(0.0, 0.0)) c.pop_back();
    if (c.empty()) throw Error("log Mahler measure of the zero polynomial is undefined");
    double total = std::log(std::abs(c.back()));
    if (c.size() == 1) return total;
    for (const cdouble& root : polynomial_roots(c)) {
        const double mag = std::abs(root);
        if (mag > 1.0) total += std::log(mag);
    }
    return total;
}

double jensen_univariate(const std::vector<Int>& coeffs) {
    size_t deg = coeffs.size();
    while (deg > 0 && coeffs[deg - 1] == 0) --deg;
    if (deg == 0) throw Error("log Mahler measure of the zero polynomial is undefined");

    // Convert via mantissa/exponent pairs so huge integers keep their top
    // bits; a common power of two is divided out, which fixes the scale
    // without moving any root.
    std::vector<double> mant(deg, 0.0);
    std::vector<long> expo(deg, 0);
    long emax = std::numeric_limits<long>::min();
    for (size_t i = 0; i < deg; ++i) {
        if (coeffs[i] == 0) continue;
        mant[i] = mpz_get_d_2exp(&expo[i], coeffs[i].get_mpz_t());
        emax = std::max(emax, expo[i]);
    }
    std::vector<cdouble> c(deg);
    for (size_t i = 0; i < deg; ++i) {
        if (mant[i] == 0.0) continue;
        c[i] = cdouble(std::ldexp(mant[i], static_cast<int>(std::max<long>(expo[i] - emax, -1060L))), 0.0);
    }
    double total = log_abs(coeffs[deg - 1]);
    if (deg == 1) return total;
    for (const cdouble& root : polynomial_roots(c)) {
        const double mag = std::abs(root);
        if (mag > 1.0) total += std::log(mag);
    }
    return total;
}

} // namespace lpdyn
