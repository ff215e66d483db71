#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lpdyn/bigint.hpp"
#include "lpdyn/errors.hpp"
#include "lpdyn/extcomplex.hpp"

namespace lpdyn {

using Exp = int32_t;
using ExpVec = std::vector<Exp>;

// Degrees of a Laurent polynomial written as P / x^d with P an ordinary
// polynomial not divisible by any variable and x^d a monomial.
struct DegreeProfile {
    ExpVec dvector;            // denominator-monomial exponents (>= 0)
    ExpVec numerator_degrees;  // per-variable degrees of P
    int numerator_total = 0;   // total degree of P
    int denominator_total = 0; // sum of the d-vector
    int rational_degree = 0;   // max(numerator_total, denominator_total)
};

// Sparse Laurent polynomial over arbitrary-precision integers.
//
// Terms are kept sorted by exponent vector in descending lexicographic order,
// with no zero coefficients and no duplicate exponent vectors, so iteration
// order — and hence text output and hashing — is deterministic.
class LaurentPoly {
public:
    LaurentPoly() : nv_(0) {}
    explicit LaurentPoly(int num_vars) : nv_(num_vars) {}

    static LaurentPoly zero(int num_vars) { return LaurentPoly(num_vars); }
    static LaurentPoly constant(int num_vars, Int c);
    static LaurentPoly variable(int num_vars, int index); // x_{index+1}
    static LaurentPoly monomial(int num_vars, const ExpVec& exps, Int c);
    // Builds from an unsorted term list (duplicates are combined).
    static LaurentPoly from_terms(int num_vars, std::vector<std::pair<ExpVec, Int>> terms);

    int num_vars() const { return nv_; }
    size_t size() const { return cf_.size(); }
    bool is_zero() const { return cf_.empty(); }
    bool is_one() const;
    bool is_monomial() const { return cf_.size() == 1; }

    const Exp* exps(size_t i) const { return ex_.data() + i * nv_; }
    const Int& coeff(size_t i) const { return cf_[i]; }

    bool operator==(const LaurentPoly& o) const;
    bool operator!=(const LaurentPoly& o) const { return !(*this == o); }

    LaurentPoly operator-() const;
    friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b);
    friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b);
    friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);
    LaurentPoly& operator+=(const LaurentPoly& o) { return *this = *this + o; }
    LaurentPoly& operator-=(const LaurentPoly& o) { return *this = *this - o; }
    LaurentPoly& operator*=(const LaurentPoly& o) { return *this = *this * o; }

    LaurentPoly pow(unsigned long n) const;

    // Multiplies by the monomial x^shift (shift entries may be negative).
    LaurentPoly shifted(const ExpVec& shift) const;

    // Exact division.  Throws NotLaurentError when the quotient is not a
    // Laurent polynomial with integer coefficients; try_div_exact returns
    // nullopt instead so probes can treat failure as data.
    friend LaurentPoly div_exact(const LaurentPoly& num, const LaurentPoly& den);
    friend std::optional<LaurentPoly> try_div_exact(const LaurentPoly& num,
                                                    const LaurentPoly& den);

    // Substitutes images[j] for variable j.  The result must stay Laurent
    // (NotLaurentError otherwise, e.g. a negative power of a non-monomial
    // image that does not divide out).
    LaurentPoly substitute(const std::vector<LaurentPoly>& images) const;

    // Evaluation over the extended-range complexes.  A zero coordinate raised
    // to a negative power throws ZeroDivisionError; zero to a positive power
    // contributes zero.
    ExtComplex eval_complex(const std::vector<ExtComplex>& point) const;
    Rat eval_rational(const std::vector<Rat>& point) const;
    Int value_at_ones() const; // P(1,...,1), exact
    Int length() const;        // sum of |coefficients|, exact

    ExpVec min_exps() const; // componentwise minimum over terms (zero poly: all 0)
    ExpVec max_exps() const;

    DegreeProfile degree_profile() const;
    ExpVec dvector() const { return degree_profile().dvector; }

    // Canonical text form, terms in descending lexicographic order,
    // e.g. "3*x1^2*x2^-1 + 1".  Variable names default to x1..xn.
    std::string to_string() const;
    std::string to_string(const std::vector<std::string>& var_names) const;

private:
    void check_same_space(const LaurentPoly& o) const;

    int nv_;
    std::vector<Exp> ex_; // nv_ entries per term, lex-descending
    std::vector<Int> cf_; // parallel nonzero coefficients
};

// RAII scope guard bounding the term count any single arithmetic result may
// hold (thread-local).  Arithmetic past the bound throws BudgetExceededError;
// iteration drivers catch it and mark their output truncated instead of
// letting memory grow without bound.
class TermBudgetGuard {
public:
    explicit TermBudgetGuard(size_t max_terms);
    ~TermBudgetGuard();
    TermBudgetGuard(const TermBudgetGuard&) = delete;
    TermBudgetGuard& operator=(const TermBudgetGuard&) = delete;

private:
    size_t prev_;
};

// Parses the canonical text form.  Variables x1..x<num_vars>; optional extra
// named variables may be supplied (mapped to indices num_vars..).
LaurentPoly parse_poly(const std::string& text, int num_vars);
LaurentPoly parse_poly(const std::string& text, const std::vector<std::string>& var_names);

} // namespace lpdyn
