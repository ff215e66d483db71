#pragma once
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>

#include "lpdyn/bigint.hpp"
#include "lpdyn/errors.hpp"

namespace lpdyn {

// Complex number with a software-extended exponent: value = man * 2^e with
// |man| in [1,2) (man == 0 encodes zero).  Orbit magnitudes here grow doubly
// exponentially, far past the 2^+-1024 range of native doubles; a 128-bit
// base-2 exponent keeps every window used by the estimators in range while
// the mantissa keeps ordinary double precision.
class ExtComplex {
public:
    using Exp = __int128;

    ExtComplex() : man_(0.0, 0.0), e_(0) {}

    explicit ExtComplex(double x) { assign(std::complex<double>(x, 0.0), 0); }
    explicit ExtComplex(std::complex<double> z) { assign(z, 0); }
    ExtComplex(std::complex<double> man, Exp e) { assign(man, e); }

    static ExtComplex zero() { return ExtComplex(); }
    static ExtComplex one() { return ExtComplex(1.0); }

    // Exact conversion of a big integer: mantissa keeps the top 53 bits.
    static ExtComplex from_int(const Int& z) {
        if (sgn(z) == 0) return zero();
        long e2 = 0;
        double m = mpz_get_d_2exp(&e2, z.get_mpz_t()); // |m| in [0.5,1)
        return ExtComplex(std::complex<double>(2.0 * m, 0.0), static_cast<Exp>(e2) - 1);
    }

    static ExtComplex from_polar_unit(double theta) {
        return ExtComplex(std::complex<double>(std::cos(theta), std::sin(theta)), 0);
    }

    bool is_zero() const { return man_ == std::complex<double>(0.0, 0.0); }

    std::complex<double> mantissa() const { return man_; }
    Exp exponent() const { return e_; }

    // Natural log of |value|; -inf for zero.
    double log_abs() const {
        if (is_zero()) return -std::numeric_limits<double>::infinity();
        return std::log(std::abs(man_)) + static_cast<double>(e_) * M_LN2;
    }

    // log2 of |value| as a double (fits easily; |e_| < 2^127).
    double log2_abs() const {
        if (is_zero()) return -std::numeric_limits<double>::infinity();
        return std::log2(std::abs(man_)) + static_cast<double>(e_);
    }

    double arg() const { return std::arg(man_); }

    // Best-effort native conversion; overflows to +-inf, underflows to 0.
    std::complex<double> to_complex() const {
        if (is_zero()) return {0.0, 0.0};
        if (e_ > 2000) {
            double s = std::numeric_limits<double>::infinity();
            return {man_.real() * s, man_.imag() * s};
        }
        if (e_ < -2000) return {0.0, 0.0};
        int k = static_cast<int>(e_);
        return {std::ldexp(man_.real(), k), std::ldexp(man_.imag(), k)};
    }

    ExtComplex operator-() const {
        ExtComplex r(*this);
        r.man_ = -r.man_;
        return r;
    }

    friend ExtComplex operator*(const ExtComplex& a, const ExtComplex& b) {
        if (a.is_zero() || b.is_zero()) return zero();
        return ExtComplex(a.man_ * b.man_, a.e_ + b.e_);
    }

    friend ExtComplex operator/(const ExtComplex& a, const ExtComplex& b) {
        if (b.is_zero()) throw ZeroDivisionError("division by exact zero");
        if (a.is_zero()) return zero();
        return ExtComplex(a.man_ / b.man_, a.e_ - b.e_);
    }

    friend ExtComplex operator+(const ExtComplex& a, const ExtComplex& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        // Align exponents; beyond 96 bits the smaller addend is below one ulp.
        if (a.e_ - b.e_ > 96) return a;
        if (b.e_ - a.e_ > 96) return b;
        if (a.e_ >= b.e_) {
            int d = static_cast<int>(a.e_ - b.e_);
            std::complex<double> m(b.man_.real() * std::ldexp(1.0, -d),
                                   b.man_.imag() * std::ldexp(1.0, -d));
            return ExtComplex(a.man_ + m, a.e_);
        }
        return b + a;
    }

    friend ExtComplex operator-(const ExtComplex& a, const ExtComplex& b) { return a + (-b); }

    ExtComplex& operator*=(const ExtComplex& o) { return *this = *this * o; }
    ExtComplex& operator+=(const ExtComplex& o) { return *this = *this + o; }

    // Integer power by binary exponentiation (negative allowed, base nonzero).
    ExtComplex pow(long long n) const {
        if (n == 0) return one();
        if (is_zero()) {
            if (n < 0) throw ZeroDivisionError("zero raised to a negative power");
            return zero();
        }
        ExtComplex base = *this;
        if (n < 0) {
            base = one() / base;
            n = -n;
        }
        ExtComplex acc = one();
        while (n > 0) {
            if (n & 1) acc *= base;
            base *= base;
            n >>= 1;
        }
        return acc;
    }

    std::string debug_string() const {
        return "(" + std::to_string(man_.real()) + (man_.imag() < 0 ? "" : "+") +
               std::to_string(man_.imag()) + "i)*2^" + std::to_string(static_cast<double>(e_));
    }

private:
    void assign(std::complex<double> m, Exp e) {
        if (m == std::complex<double>(0.0, 0.0)) {
            man_ = {0.0, 0.0};
            e_ = 0;
            return;
        }
        double a = std::abs(m);
        if (!std::isfinite(a)) {
            // Propagate as an error early: the estimators treat NaN samples as
            // skips, but the arithmetic itself must stay finite.
            man_ = m;
            e_ = e;
            return;
        }
        int k = std::ilogb(a); // |m| in [2^k, 2^(k+1))
        if (k != 0) {
            double s = std::ldexp(1.0, -k);
            m = {m.real() * s, m.imag() * s};
        }
        man_ = m;
        e_ = e + k;
    }

    std::complex<double> man_;
    Exp e_;
};

} // namespace lpdyn
