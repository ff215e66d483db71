#include "lpdyn/special.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>

#include "lpdyn/errors.hpp"

namespace lpdyn {

namespace {

using cdouble = std::complex<double>;

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kPiSqOver6 = 1.644934066848226436472415166646025189;
constexpr double kEulerGamma = 0.577215664901532860606512090082402431;

double zeta_even(int two_m) {
    switch (two_m) {
        case 2: return kPiSqOver6;
        case 4: return 1.082323233711138191516003696541167902;  // pi^4 / 90
        case 6: return 1.017343061984449139714517929790920527;  // pi^6 / 945
        case 8: return 1.004077356197944339378685238508652465;  // pi^8 / 9450
        default: break;
    }
    double total = 1.0;
    for (int n = 2; n <= 64; ++n) {
        const double term = std::pow(static_cast<double>(n), -two_m);
        total += term;
        if (term < 1e-19) break;
    }
    return total;
}

// Coefficients c_k of Li2(z) = sum_k c_k u^{k+1} with u = -log(1 - z):
// c_k = B_k / (k + 1)!, computed through zeta values so no factorial overflows.
const std::vector<double>& u_series_coeffs() {
    static const std::vector<double> table = [] {
        std::vector<double> c(80, 0.0);
        c[0] = 1.0;
        c[1] = -0.25;
        double two_pi_pow = 1.0;
        const double two_pi_sq = 4.0 * kPi * kPi;
        for (int m = 1; 2 * m + 1 < static_cast<int>(c.size()); ++m) {
            two_pi_pow *= two_pi_sq; // (2 pi)^{2m}
            const double mag = 2.0 * zeta_even(2 * m) / (two_pi_pow * (2 * m + 1));
            c[2 * m] = (m % 2 == 1) ? mag : -mag;
        }
        return c;
    }();
    return table;
}

cdouble dilog_power_series(cdouble z) {
    // Valid for |z| <= 0.5.
    cdouble term = z;
    cdouble total = z;
    for (int n = 2; n <= 60; ++n) {
        term *= z;
        const cdouble add = term / static_cast<double>(n * n);
        total += add;
        if (std::abs(add) < 1e-18 * (1.0 + std::abs(total))) return total;
    }
    return total;
}

cdouble dilog_u_series(cdouble z) {
    // Valid while |log(1 - z)| < 2 pi.
    const cdouble u = -std::log(1.0 - z);
    const std::vector<double>& c = u_series_coeffs();
    cdouble upow = u;
    cdouble total = c[0] * u;
    total += c[1] * (upow *= u);
    const cdouble u_sq = u * u;
    cdouble upow_odd = u * u_sq; // u^{2m+1}, starting at m = 1
    for (int m = 1; 2 * m < static_cast<int>(c.size()); ++m) {
        const cdouble add = c[2 * m] * upow_odd;
        total += add;
        if (std::abs(add) < 1e-18 * (1.0 + std::abs(total))) return total;
        upow_odd *= u_sq;
    }
    return total;
}

// Cosine integral Ci(z) for z > 0, used by the tail correction of the
// circle series.  Power series for small z, asymptotic expansion otherwise.
double cosine_integral(double z) {
    if (z <= 20.0) {
        double total = 0.0;
        double term = 1.0;
        for (int k = 1; k <= 60; ++k) {
            term *= -z * z / ((2.0 * k) * (2.0 * k - 1.0));
            const double add = term / (2.0 * k);
            total += add;
            if (std::abs(add) < 1e-20 * (1.0 + std::abs(total))) break;
        }
        return kEulerGamma + std::log(z) + total;
    }
    double f = 0.0;
    double g = 0.0;
    double fac = 1.0;  // (2k)! / z^{2k}, alternating in sign below
    double sign = 1.0;
    for (int k = 0; k < 8; ++k) {
        f += sign * fac;
        const double fac_odd = fac * (2.0 * k + 1.0) / z;
        g += sign * fac_odd;
        fac = fac_odd * (2.0 * k + 2.0) / z;
        sign = -sign;
    }
    f /= z;
    g /= z;
    return f * std::sin(z) - g * std::cos(z);
}

// sum_{n > N} sin(n phi) / n^2 by Euler-Maclaurin, phi in (0, pi].
double circle_series_tail(double phi, long N) {
    const double a = static_cast<double>(N + 1);
    const double s = std::sin(phi * a);
    const double c = std::cos(phi * a);
    const double integral = s / a - phi * cosine_integral(phi * a);
    const double half_f = 0.5 * s / (a * a);
    const double fp = phi * c / (a * a) - 2.0 * s / (a * a * a);
    const double fppp = -phi * phi * phi * c / (a * a) + 6.0 * phi * phi * s / (a * a * a)
                        + 18.0 * phi * c / (a * a * a * a) - 24.0 * s / (a * a * a * a * a);
    return integral + half_f - fp / 12.0 + fppp / 720.0;
}

} // namespace

cdouble dilog(cdouble z) {
    if (z == cdouble(0.0, 0.0)) return {0.0, 0.0};
    if (z == cdouble(1.0, 0.0)) return {kPiSqOver6, 0.0};
    const double az = std::abs(z);
    if (az <= 0.5) return dilog_power_series(z);
    if (az >= 2.0) {
        const cdouble lg = std::log(-z);
        return -dilog(1.0 / z) - kPiSqOver6 - 0.5 * lg * lg;
    }
    const cdouble w = 1.0 - z;
    if (std::abs(w) <= 0.5) {
        return kPiSqOver6 - std::log(z) * std::log(w) - dilog_power_series(w);
    }
    return dilog_u_series(z);
}

double bloch_wigner(cdouble z) {
    if (z.imag() == 0.0) return 0.0;
    return std::imag(dilog(z)) + std::log(std::abs(z)) * std::arg(1.0 - z);
}

double circle_dilog(double theta) {
    if (!std::isfinite(theta)) throw Error("circle_dilog needs a finite angle");
    // The series depends on phi = 2 theta only through phi mod 2 pi, and is odd.
    double phi = std::remainder(2.0 * theta, 2.0 * kPi);
    if (phi == 0.0 || phi == -0.0) return 0.0;
    double sign = 1.0;
    if (phi < 0.0) {
        phi = -phi;
        sign = -1.0;
    }
    if (phi >= kPi) {
        // remainder() returns values in [-pi, pi]; phi == pi means sin(n phi) = 0.
        if (phi == kPi) return 0.0;
        throw Error("angle reduction failed");
    }

    const long N = 1000000;
    // Direct sum with an incremental rotation, re-synchronized periodically so
    // rotation drift stays far below the target accuracy.
    const double step_c = std::cos(phi);
    const double step_s = std::sin(phi);
    double total = 0.0;
    double comp = 0.0; // Kahan compensation: a million additions would
                       // otherwise cost a couple of digits in the worst case
    double s = 0.0;
    double c = 1.0;
    for (long n = 1; n <= N; ++n) {
        if ((n & 4095) == 1) {
            s = std::sin(phi * static_cast<double>(n));
            c = std::cos(phi * static_cast<double>(n));
        } else {
            const double ns = s * step_c + c * step_s;
            const double nc = c * step_c - s * step_s;
            s = ns;
            c = nc;
        }
        const double y = s / (static_cast<double>(n) * static_cast<double>(n)) - comp;
        const double t = total + y;
        comp = (t - total) - y;
        total = t;
    }
    total += circle_series_tail(phi, N);
    return sign * total;
}

double chebyshev_t(int r, double x) {
    if (r < 0) throw Error("chebyshev_t needs a nonnegative degree");
    if (r == 0) return 1.0;
    double prev = 1.0;
    double cur = x;
    for (int n = 1; n < r; ++n) {
        const double next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

std::vector<long long> chebyshev_t_coeffs(int r) {
    if (r < 0 || r > 62) throw Error("chebyshev_t_coeffs supports degrees 0..62");
    std::vector<long long> prev = {1};
    if (r == 0) return prev;
    std::vector<long long> cur = {0, 1};
    for (int n = 1; n < r; ++n) {
        std::vector<long long> next(static_cast<size_t>(n) + 2, 0);
        for (size_t k = 0; k < cur.size(); ++k) {
            long long doubled;
            if (__builtin_mul_overflow(cur[k], 2LL, &doubled) ||
                __builtin_add_overflow(next[k + 1], doubled, &next[k + 1])) {
                throw Error("chebyshev coefficients overflow 64 bits");
            }
        }
        for (size_t k = 0; k < prev.size(); ++k) {
            if (__builtin_sub_overflow(next[k], prev[k], &next[k])) {
                throw Error("chebyshev coefficients overflow 64 bits");
            }
        }
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

double smyth_constant() { return circle_dilog(kPi / 6.0) / kPi; }

double mx4_closed(int r) {
    if (r < 1) throw Error("mx4_closed needs r >= 1");
    return static_cast<double>(r) * smyth_constant();
}

double pr_eval(int r, double x) {
    if (r < 1) throw Error("pr_eval needs r >= 1");
    if (x == 1.0) throw Error("pr_eval is singular at x = 1");
    const double base = 1.0 - chebyshev_t(r, x);
    return std::ldexp(std::pow(base, r), r - 1) / (1.0 - x) - 1.0;
}

std::vector<double> pr_roots(int r) {
    if (r < 2) throw Error("pr_roots needs r >= 2");
    const auto f = [r](double t) {
        return std::ldexp(std::pow(std::abs(std::sin(0.5 * r * t)), r), r - 1) - std::sin(0.5 * t);
    };
    const auto fprime = [r](double t) {
        const double s = std::sin(0.5 * r * t);
        const double mag = std::pow(std::abs(s), r - 2);
        return std::ldexp(0.5 * r * r * mag * s * std::cos(0.5 * r * t), r - 1) - 0.5 * std::cos(0.5 * t);
    };

    const int cells = 200 * r;
    std::vector<double> roots;
    double t_prev = 0.0;
    double f_prev = f(t_prev);
    for (int i = 1; i <= cells; ++i) {
        const double t_cur = kPi * static_cast<double>(i) / static_cast<double>(cells);
        const double f_cur = f(t_cur);
        if (f_cur == 0.0 && i < cells) {
            roots.push_back(t_cur);
        } else if (f_prev * f_cur < 0.0) {
            double lo = t_prev;
            double hi = t_cur;
            double f_lo = f_prev;
            while (hi - lo > 1e-13) {
                const double mid = 0.5 * (lo + hi);
                const double f_mid = f(mid);
                if (f_mid == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((f_lo < 0.0) == (f_mid < 0.0)) {
                    lo = mid;
                    f_lo = f_mid;
                } else {
                    hi = mid;
                }
            }
            double root = 0.5 * (lo + hi);
            for (int it = 0; it < 4; ++it) {
                const double d = fprime(root);
                if (d == 0.0) break;
                const double next = root - f(root) / d;
                if (!(next > t_prev && next < t_cur)) break;
                root = next;
            }
            roots.push_back(root);
        }
        t_prev = t_cur;
        f_prev = f_cur;
    }

    if (static_cast<int>(roots.size()) != r) {
        throw Error("root scan found " + std::to_string(roots.size()) + " crossings, expected " + std::to_string(r));
    }
    for (const double t : roots) {
        if (std::abs(f(t)) > 1e-11) throw Error("root residual exceeds 1e-11");
        if (std::abs(pr_eval(r, std::cos(t))) > 1e-9) throw Error("polynomial residual exceeds 1e-9");
    }
    return roots;
}

double mx5_closed(int r) {
    if (r < 1) throw Error("mx5_closed needs r >= 1");
    if (r == 1) return 0.0;
    const std::vector<double> roots = pr_roots(r);
    double total = 0.0;
    for (int j = 0; j < r; ++j) {
        const double term = circle_dilog(0.5 * r * roots[static_cast<size_t>(j)])
                            - circle_dilog(0.5 * roots[static_cast<size_t>(j)]);
        total += (j % 2 == 0) ? term : -term;
    }
    return static_cast<double>(r) / kPi * total;
}

double mx5_quadrature(int r) {
    if (r < 1) throw Error("mx5_quadrature needs r >= 1");
    if (r == 1) return 0.0;
    const std::vector<double> roots = pr_roots(r);
    std::vector<double> bounds;
    bounds.push_back(0.0);
    bounds.insert(bounds.end(), roots.begin(), roots.end());
    if (r % 2 == 0) bounds.push_back(kPi);

    const auto integrand = [r](double t) {
        return std::log(std::abs(2.0 * std::sin(0.5 * t))) - r * std::log(std::abs(2.0 * std::sin(0.5 * r * t)));
    };

    double total = 0.0;
    for (size_t k = 0; k + 1 < bounds.size(); k += 2) {
        const double a = bounds[k];
        const double b = bounds[k + 1];
        // Split at the interior poles t = 2 pi m / r of the second log term.
        std::vector<double> cuts = {a};
        for (int m = 1; m < r; ++m) {
            const double pole = 2.0 * kPi * static_cast<double>(m) / static_cast<double>(r);
            if (pole > a + 1e-12 && pole < b - 1e-12) cuts.push_back(pole);
        }
        cuts.push_back(b);
        for (size_t p = 0; p + 1 < cuts.size(); ++p) {
            const double mid = 0.5 * (cuts[p] + cuts[p + 1]);
            if (integrand(mid) <= 0.0) {
                throw Error("modulus sign pattern disagrees with the root layout");
            }
            total += tanh_sinh_quad(integrand, cuts[p], cuts[p + 1], 1e-11);
        }
    }
    return static_cast<double>(r) / kPi * total;
}

double markoff_x5_closed() { return 2.0 * smyth_constant(); }

double somos_x6_closed() { return smyth_constant(); }

double cstar_constant(int M, int threads) {
    if (M < 25) throw Error("cstar_constant needs a lattice size of at least 25");
    if (threads < 1) threads = 1;
    std::vector<double> cos_tab(static_cast<size_t>(M));
    std::vector<double> sin_tab(static_cast<size_t>(M));
    for (int a = 0; a < M; ++a) {
        const double angle = 2.0 * kPi * static_cast<double>(a) / static_cast<double>(M);
        cos_tab[static_cast<size_t>(a)] = std::cos(angle);
        sin_tab[static_cast<size_t>(a)] = std::sin(angle);
    }

    // One partial sum per row: the final reduction is a fixed-order sum over
    // rows, so the result does not depend on how rows are assigned to workers.
    std::vector<double> row_sum(static_cast<size_t>(M), 0.0);
    const auto run_rows = [&](int begin, int end) {
        for (int a = begin; a < end; ++a) {
            double acc = 0.0;
            for (int b = 0; b < M; ++b) {
                // K = x1/x2 + x2/x1 + 1/(x1 x2) on the unit torus.
                const double diff_c = cos_tab[static_cast<size_t>(a)] * cos_tab[static_cast<size_t>(b)]
                                      + sin_tab[static_cast<size_t>(a)] * sin_tab[static_cast<size_t>(b)];
                const double sum_c = cos_tab[static_cast<size_t>(a)] * cos_tab[static_cast<size_t>(b)]
                                     - sin_tab[static_cast<size_t>(a)] * sin_tab[static_cast<size_t>(b)];
                const double sum_s = sin_tab[static_cast<size_t>(a)] * cos_tab[static_cast<size_t>(b)]
                                     + cos_tab[static_cast<size_t>(a)] * sin_tab[static_cast<size_t>(b)];
                const cdouble K(2.0 * diff_c + sum_c, -sum_s);
                cdouble s = std::sqrt(K * K - 4.0);
                // Align the square root with K so the larger root is formed
                // without cancellation (the two roots multiply to 1, so the
                // absolute log is branch independent anyway).
                if (K.real() * s.real() + K.imag() * s.imag() < 0.0) s = -s;
                const double mag = 0.5 * std::abs(K + s);
                acc += std::abs(std::log(mag));
            }
            row_sum[static_cast<size_t>(a)] = acc;
        }
    };

    if (threads == 1) {
        run_rows(0, M);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (M + threads - 1) / threads;
        for (int w = 0; w < threads; ++w) {
            const int begin = w * chunk;
            const int end = std::min(M, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(run_rows, begin, end);
        }
        for (std::thread& t : pool) t.join();
    }

    double total = 0.0;
    for (int a = 0; a < M; ++a) total += row_sum[static_cast<size_t>(a)];
    return total / (static_cast<double>(M) * static_cast<double>(M));
}

double tanh_sinh_quad(const std::function<double(double)>& f, double a, double b, double target) {
    if (!(b > a)) throw Error("tanh_sinh_quad needs a < b");
    const double half = 0.5 * (b - a);
    const double t_max = 3.8;

    const auto sample = [&](double t) -> double {
        const double s = 0.5 * kPi * std::sinh(t);
        // 1 - tanh(s) computed stably so points hug the endpoints without
        // collapsing onto them.
        const double e = std::exp(-2.0 * std::abs(s));
        const double dist = 2.0 * e / (1.0 + e); // 1 - |tanh(s)|
        // Form the point as endpoint +/- distance: the distance to the nearer
        // endpoint then carries full relative precision, which integrands with
        // endpoint singularities need.
        const double x = (s >= 0.0) ? b - half * dist : a + half * dist;
        if (x <= a || x >= b) return 0.0;
        const double ch = std::cosh(s);
        const double weight = 0.5 * kPi * std::cosh(t) / (ch * ch);
        const double v = f(x);
        if (!std::isfinite(v)) return 0.0;
        return v * weight;
    };

    double h = 1.0;
    double sum = sample(0.0);
    for (int k = 1; k * h <= t_max; ++k) sum += sample(k * h) + sample(-k * h);
    double estimate = half * h * sum;
    for (int level = 1; level <= 11; ++level) {
        h *= 0.5;
        double add = 0.0;
        for (int k = 1; k * h <= t_max; k += 2) add += sample(k * h) + sample(-k * h);
        sum += add;
        const double next = half * h * sum;
        const double change = std::abs(next - estimate);
        estimate = next;
        if (level >= 3 && change < target * std::max(1.0, std::abs(estimate))) break;
    }
    return estimate;
}

} // namespace lpdyn
