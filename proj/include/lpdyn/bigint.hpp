#pragma once
#include <gmpxx.h>
#include <cmath>
#include <string>

namespace lpdyn {

using Int = mpz_class; // arbitrary-precision integer coefficients
using Rat = mpq_class; // exact rational orbit values

// Natural log of |z| for a big integer, accurate to ~1e-15 relative even when
// z has millions of digits (mantissa/exponent split avoids overflow).
inline double log_abs(const Int& z) {
    if (sgn(z) == 0) return -std::numeric_limits<double>::infinity();
    long exp2 = 0;
    double m = mpz_get_d_2exp(&exp2, z.get_mpz_t()); // |m| in [0.5, 1)
    return std::log(std::fabs(m)) + static_cast<double>(exp2) * M_LN2;
}

// log max(|num|, |den|) of a rational in lowest terms; the height of 0 is 1.
inline double log_height(const Rat& q) {
    if (sgn(q) == 0) return 0.0;
    double ln = log_abs(Int(q.get_num()));
    double ld = log_abs(Int(q.get_den()));
    return std::max(ln, ld);
}

inline std::string to_string(const Int& z) { return z.get_str(); }
inline std::string to_string(const Rat& q) { return q.get_str(); }

} // namespace lpdyn
