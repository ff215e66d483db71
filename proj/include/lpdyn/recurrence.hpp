#pragma once
#include <string>
#include <vector>

#include "lpdyn/laurent.hpp"

namespace lpdyn {

// A recurrence in product form
//
//     x_{n+N} * prod_{j=0}^{N-1} x_{n+j}^{m_j}  =  F(x_n, ..., x_{n+N-1}, params)
//
// covering both the plain family x_{n+N} x_n = F(x_{n+1}..x_{n+N-1}) (then
// m = (1,0,...,0)) and the order-5 variant whose left side carries the
// monomial x_{n+2}^3 x_{n+1}^2.  F lives in a window space whose variables
// are the N lagged values followed by the frozen parameters.
struct RecurrenceDef {
    std::string name;
    int order = 0;                   // N
    ExpVec lhs_exponents;            // m_0..m_{N-1}
    LaurentPoly rhs;                 // over order + params.size() variables
    std::vector<std::string> params; // frozen parameter names

    int window_vars() const { return order + static_cast<int>(params.size()); }
    std::vector<std::string> window_names() const;
    // Text in the recurrence grammar; only plain-form definitions round-trip
    // through parse_recurrence.
    std::string to_string() const;
};

// Built-in systems: "lyness", "rank2(r)" for integer r >= 1, "markoff",
// "somos4", "hv" (one frozen parameter named a).
RecurrenceDef builtin_recurrence(const std::string& spec);

// Parses "x[n+N]*x[n] = <integer polynomial in x[n+1]..x[n+N-1] and params>".
// Unknown identifiers on the right become frozen parameters.
RecurrenceDef parse_recurrence(const std::string& text);

struct SymbolicOrbit {
    // iterates[k] is x_{k+1}; the first `order` entries are the initial
    // cluster variables (parameters appended as extra variables).
    std::vector<LaurentPoly> iterates;
    bool truncated = false;   // stopped early because a step left the budget
    size_t term_budget = 0;
};

// Iterates symbolically from the initial variables.  Every step performs the
// exact division by the left-side monomial in lagged iterates; a non-Laurent
// step throws NotLaurentError (that outcome falsifies a Laurent-property
// claim and is deliberately loud).
SymbolicOrbit iterate_symbolic(const RecurrenceDef& def, int n_max,
                               size_t term_budget = 5'000'000);

// Exact rational orbit from given initial values.
std::vector<Rat> iterate_rational(const RecurrenceDef& def, std::vector<Rat> init,
                                  int n_max, const std::vector<Rat>& param_values = {});

// Backward orbit: returns x_0, x_{-1}, ..., computed by solving the defining
// relation for the lowest index.  Supported when F is independent of x_n and
// m_0 = 1 (plain form), or F is linear in x_n with m_0 = 0.
std::vector<Rat> iterate_rational_backward(const RecurrenceDef& def, std::vector<Rat> init,
                                           int steps, const std::vector<Rat>& param_values = {});

struct NumericOrbit {
    std::vector<ExtComplex> values; // x_1..x_n while valid
    bool truncated = false;
    std::string reason;
};

// Precompiled one-step evaluator for the hot numeric loops.
class NumericStepper {
public:
    explicit NumericStepper(const RecurrenceDef& def);
    // window holds the last `order` values x_n..x_{n+N-1}; returns x_{n+N}.
    // Throws ZeroDivisionError when the left-side monomial vanishes.
    ExtComplex step(const std::vector<ExtComplex>& window,
                    const std::vector<ExtComplex>& params) const;
    int order() const { return order_; }

private:
    struct Term {
        ExtComplex c;
        std::vector<std::pair<int, int>> powers; // (window/param index, exponent)
    };
    int order_;
    int nparams_;
    std::vector<Term> terms_;
    std::vector<std::pair<int, int>> lhs_powers_;
};

NumericOrbit iterate_numeric(const RecurrenceDef& def, std::vector<ExtComplex> init,
                             int n_max, const std::vector<ExtComplex>& param_values = {});

// Reduced two-dimensional maps obtained from the translation-invariant
// coordinates y_n = x_{n+1}/x_n (markoff_y) and y_n = x_{n+2} x_n / x_{n+1}^2
// (somos4_y).  Each step consumes (y_n, y_{n+1}) and produces y_{n+2}.
ExtComplex markoff_y_step(const ExtComplex& y1, const ExtComplex& y2);
ExtComplex somos4_y_step(const ExtComplex& y1, const ExtComplex& y2);
Rat markoff_y_step(const Rat& y1, const Rat& y2);
Rat somos4_y_step(const Rat& y1, const Rat& y2);

// Named first integrals: "rank2_K" = x1/x2 + x2/x1 + 1/(x1 x2) over two
// variables (conserved for the r = 2 system), "markoff_K" = (x1^2 + x2^2 +
// x3^2)/(x1 x2 x3) over three.
LaurentPoly conserved_quantity(const std::string& name);

// Tropicalized degree data: d-vectors of the iterates in the initial-cluster
// exponent space (parameters included as trailing components).  Exact for
// subtraction-free systems; for systems whose F has mixed signs the result
// is a growth-order proxy and callers should flag it as an assumption.
// Components are big integers because they grow exponentially in n.
std::vector<std::vector<Int>> tropical_dvector_sequence(const RecurrenceDef& def, int n_max);

} // namespace lpdyn
