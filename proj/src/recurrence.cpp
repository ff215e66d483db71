#include "lpdyn/recurrence.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "lpdyn/errors.hpp"

namespace lpdyn {

std::vector<std::string> RecurrenceDef::window_names() const {
    std::vector<std::string> names;
    names.reserve(window_vars());
    for (int j = 0; j < order; ++j) {
        if (j == 0)
            names.push_back("x[n]");
        else
            names.push_back("x[n+" + std::to_string(j) + "]");
    }
    for (const auto& p : params) names.push_back(p);
    return names;
}

std::string RecurrenceDef::to_string() const {
    std::ostringstream os;
    os << "x[n+" << order << "]";
    for (int j = 0; j < order; ++j) {
        Exp m = lhs_exponents[static_cast<size_t>(j)];
        if (m == 0) continue;
        os << "*" << (j == 0 ? std::string("x[n]") : "x[n+" + std::to_string(j) + "]");
        if (m != 1) os << "^" << m;
    }
    os << " = " << rhs.to_string(window_names());
    return os.str();
}

namespace {

RecurrenceDef make_plain(std::string name, int order, const LaurentPoly& rhs,
                         std::vector<std::string> params = {}) {
    RecurrenceDef def;
    def.name = std::move(name);
    def.order = order;
    def.lhs_exponents.assign(static_cast<size_t>(order), 0);
    def.lhs_exponents[0] = 1;
    def.rhs = rhs;
    def.params = std::move(params);
    return def;
}

} // namespace

RecurrenceDef builtin_recurrence(const std::string& spec) {
    auto mono = [](int nv, ExpVec e, long c = 1) {
        return LaurentPoly::monomial(nv, e, Int(c));
    };
    if (spec == "lyness") {
        // x_{n+2} x_n = x_{n+1} + 1
        LaurentPoly rhs = mono(2, {0, 1}) + LaurentPoly::constant(2, 1);
        return make_plain("lyness", 2, rhs);
    }
    if (spec.rfind("rank2(", 0) == 0 && spec.back() == ')') {
        const std::string inner = spec.substr(6, spec.size() - 7);
        int r = 0;
        try {
            size_t pos = 0;
            r = std::stoi(inner, &pos);
            if (pos != inner.size()) throw std::invalid_argument(inner);
        } catch (const std::exception&) {
            throw SyntaxError("invalid rank2 parameter '" + inner + "'", 6);
        }
        if (r < 1 || r > 1000) throw SyntaxError("rank2 parameter out of range", 6);
        // x_{n+2} x_n = x_{n+1}^r + 1
        LaurentPoly rhs = mono(2, {0, static_cast<Exp>(r)}) + LaurentPoly::constant(2, 1);
        return make_plain(spec, 2, rhs);
    }
    if (spec == "markoff") {
        // x_{n+3} x_n = x_{n+2}^2 + x_{n+1}^2
        LaurentPoly rhs = mono(3, {0, 0, 2}) + mono(3, {0, 2, 0});
        return make_plain("markoff", 3, rhs);
    }
    if (spec == "somos4") {
        // x_{n+4} x_n = x_{n+3} x_{n+1} + x_{n+2}^2
        LaurentPoly rhs = mono(4, {0, 1, 0, 1}) + mono(4, {0, 0, 2, 0});
        return make_plain("somos4", 4, rhs);
    }
    if (spec == "hv") {
        // x_{n+5} x_{n+2}^3 x_{n+1}^2 =
        //   x_{n+4}^3 x_{n+1}^3 - x_{n+4}^2 x_{n+3}^3 x_n + a x_{n+3}^6 x_{n+2}^6
        RecurrenceDef def;
        def.name = "hv";
        def.order = 5;
        def.lhs_exponents = {0, 2, 3, 0, 0};
        def.params = {"a"};
        const int nv = 6;
        def.rhs = mono(nv, {0, 3, 0, 0, 3, 0}) + mono(nv, {1, 0, 0, 3, 2, 0}, -1) +
                  mono(nv, {0, 0, 6, 6, 0, 1});
        return def;
    }
    throw SyntaxError("unknown built-in recurrence '" + spec + "'", 0);
}

// ---------------------------------------------------------------------------
// Recurrence grammar parser
// ---------------------------------------------------------------------------

namespace {

class RecParser {
public:
    explicit RecParser(const std::string& text) : s_(text) {}

    RecurrenceDef parse() {
        RecurrenceDef def;
        skip_ws();
        int head = expect_lag_var();
        if (head < 1) fail("left side must start with x[n+N], N >= 1");
        def.order = head;
        skip_ws();
        expect('*');
        skip_ws();
        int lag0 = expect_lag_var();
        if (lag0 != 0) fail("left side must be x[n+N]*x[n]");
        skip_ws();
        expect('=');
        parse_rhs(def);
        def.name = "custom";
        return def;
    }

private:
    const std::string& s_;
    size_t i_ = 0;
    // Collected right-side terms: coefficient and exponents keyed by lag index
    // (>= 0) or parameter name.
    struct RawTerm {
        Int coeff;
        std::map<int, int> lag_exps;
        std::map<std::string, int> param_exps;
    };
    std::vector<RawTerm> terms_;
    std::vector<std::string> param_order_;

    [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, i_); }
    void skip_ws() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eof() const { return i_ >= s_.size(); }
    char peek() const { return eof() ? '\0' : s_[i_]; }
    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++i_;
    }

    Int read_integer() {
        skip_ws();
        size_t start = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (i_ == start) fail("expected an integer");
        return Int(s_.substr(start, i_ - start));
    }

    int read_small_int() {
        Int v = read_integer();
        if (v > 1000000) fail("integer too large");
        return static_cast<int>(v.get_si());
    }

    // Returns the lag k for "x[n+k]" / "x[n]"; caller has verified the 'x['.
    int read_lag_bracket() {
        expect('[');
        skip_ws();
        if (peek() != 'n') fail("expected 'n' inside x[...]");
        ++i_;
        skip_ws();
        int lag = 0;
        if (peek() == '+') {
            ++i_;
            lag = read_small_int();
        }
        skip_ws();
        expect(']');
        return lag;
    }

    int expect_lag_var() {
        if (peek() != 'x') fail("expected x[n+k]");
        ++i_;
        if (peek() != '[') fail("expected '[' after x");
        return read_lag_bracket();
    }

    void parse_rhs(RecurrenceDef& def) {
        skip_ws();
        if (eof()) fail("empty right side");
        bool first = true;
        while (true) {
            skip_ws();
            if (eof()) break;
            int sign = 1;
            if (peek() == '+' || peek() == '-') {
                if (peek() == '-') sign = -1;
                ++i_;
            } else if (!first) {
                fail("expected '+' or '-' between terms");
            }
            parse_term(def.order, sign);
            first = false;
        }
        if (terms_.empty()) fail("empty right side");
        finalize(def);
    }

    void parse_term(int order, int sign) {
        RawTerm t;
        t.coeff = sign;
        bool any = false;
        while (true) {
            skip_ws();
            char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c))) {
                t.coeff *= read_integer();
                any = true;
            } else if (c == 'x' && i_ + 1 < s_.size() && s_[i_ + 1] == '[') {
                i_ += 1;
                size_t at = i_;
                int lag = read_lag_bracket();
                if (lag < 1 || lag >= order)
                    throw SyntaxError("right side may only use x[n+1].." +
                                          std::string("x[n+") + std::to_string(order - 1) + "]",
                                      at);
                t.lag_exps[lag] += read_exponent();
                any = true;
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string id = read_identifier();
                if (std::find(param_order_.begin(), param_order_.end(), id) == param_order_.end())
                    param_order_.push_back(id);
                t.param_exps[id] += read_exponent();
                any = true;
            } else {
                fail("expected a factor");
            }
            skip_ws();
            if (peek() == '*') {
                ++i_;
                continue;
            }
            break;
        }
        if (!any) fail("empty term");
        terms_.push_back(std::move(t));
    }

    std::string read_identifier() {
        size_t start = i_;
        while (i_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_'))
            ++i_;
        return s_.substr(start, i_ - start);
    }

    int read_exponent() {
        skip_ws();
        if (peek() != '^') return 1;
        ++i_;
        skip_ws();
        if (peek() == '-') fail("negative exponents are not allowed on the right side");
        int e = read_small_int();
        if (e < 1 || e > 10000) fail("exponent out of range");
        return e;
    }

    void finalize(RecurrenceDef& def) {
        def.params = param_order_;
        def.lhs_exponents.assign(static_cast<size_t>(def.order), 0);
        def.lhs_exponents[0] = 1;
        const int nv = def.window_vars();
        std::vector<std::pair<ExpVec, Int>> built;
        built.reserve(terms_.size());
        for (const auto& t : terms_) {
            ExpVec e(static_cast<size_t>(nv), 0);
            for (const auto& [lag, k] : t.lag_exps) e[static_cast<size_t>(lag)] = k;
            for (const auto& [name, k] : t.param_exps) {
                auto it = std::find(param_order_.begin(), param_order_.end(), name);
                e[static_cast<size_t>(def.order + (it - param_order_.begin()))] = k;
            }
            built.emplace_back(std::move(e), t.coeff);
        }
        def.rhs = LaurentPoly::from_terms(nv, std::move(built));
        if (def.rhs.is_zero()) fail("right side is identically zero");
    }
};

} // namespace

RecurrenceDef parse_recurrence(const std::string& text) { return RecParser(text).parse(); }

// ---------------------------------------------------------------------------
// Symbolic iteration
// ---------------------------------------------------------------------------

SymbolicOrbit iterate_symbolic(const RecurrenceDef& def, int n_max, size_t term_budget) {
    if (def.order < 1) throw DimensionMismatchError("recurrence order must be positive");
    const int N = def.order;
    const int nv = def.window_vars();
    SymbolicOrbit orbit;
    orbit.term_budget = term_budget;
    orbit.iterates.reserve(static_cast<size_t>(std::max(n_max, N)));
    for (int j = 0; j < N && j < std::max(n_max, 0); ++j)
        orbit.iterates.push_back(LaurentPoly::variable(nv, j));
    if (n_max <= N) return orbit;

    std::vector<LaurentPoly> images(static_cast<size_t>(nv));
    for (int p = 0; p < nv - N; ++p) images[static_cast<size_t>(N + p)] = LaurentPoly::variable(nv, N + p);

    for (int n = N; n < n_max; ++n) {
        try {
            TermBudgetGuard guard(term_budget);
            for (int j = 0; j < N; ++j)
                images[static_cast<size_t>(j)] = orbit.iterates[static_cast<size_t>(n - N + j)];
            LaurentPoly value = def.rhs.substitute(images);
            for (int j = 0; j < N; ++j) {
                for (Exp k = 0; k < def.lhs_exponents[static_cast<size_t>(j)]; ++k)
                    value = div_exact(value, images[static_cast<size_t>(j)]);
            }
            orbit.iterates.push_back(std::move(value));
        } catch (const BudgetExceededError&) {
            orbit.truncated = true;
            break;
        }
    }
    return orbit;
}

// ---------------------------------------------------------------------------
// Rational iteration
// ---------------------------------------------------------------------------

namespace {

void check_sizes(const RecurrenceDef& def, size_t init_size, size_t param_size) {
    if (init_size != static_cast<size_t>(def.order))
        throw DimensionMismatchError("expected " + std::to_string(def.order) +
                                     " initial values, got " + std::to_string(init_size));
    if (param_size != def.params.size())
        throw DimensionMismatchError("expected " + std::to_string(def.params.size()) +
                                     " parameter values, got " + std::to_string(param_size));
}

} // namespace

std::vector<Rat> iterate_rational(const RecurrenceDef& def, std::vector<Rat> init, int n_max,
                                  const std::vector<Rat>& param_values) {
    check_sizes(def, init.size(), param_values.size());
    const int N = def.order;
    std::vector<Rat> values = std::move(init);
    if (n_max < static_cast<int>(values.size())) values.resize(static_cast<size_t>(std::max(n_max, 0)));
    std::vector<Rat> point(static_cast<size_t>(def.window_vars()));
    for (size_t p = 0; p < param_values.size(); ++p) point[static_cast<size_t>(N) + p] = param_values[p];
    for (int n = N; n < n_max; ++n) {
        for (int j = 0; j < N; ++j) point[static_cast<size_t>(j)] = values[static_cast<size_t>(n - N + j)];
        Rat den = 1;
        for (int j = 0; j < N; ++j) {
            Exp m = def.lhs_exponents[static_cast<size_t>(j)];
            if (m == 0) continue;
            if (point[static_cast<size_t>(j)] == 0)
                throw ZeroDivisionError("left-side monomial vanished", n + 1);
            for (Exp k = 0; k < m; ++k) den *= point[static_cast<size_t>(j)];
        }
        Rat num = def.rhs.eval_rational(point);
        values.push_back(num / den);
    }
    return values;
}

std::vector<Rat> iterate_rational_backward(const RecurrenceDef& def, std::vector<Rat> init,
                                           int steps, const std::vector<Rat>& param_values) {
    check_sizes(def, init.size(), param_values.size());
    const int N = def.order;
    const int nv = def.window_vars();

    // Split F into the part without x_n and the cofactor of x_n.
    std::vector<std::pair<ExpVec, Int>> f0_terms, f1_terms;
    for (size_t i = 0; i < def.rhs.size(); ++i) {
        ExpVec e(def.rhs.exps(i), def.rhs.exps(i) + nv);
        if (e[0] == 0) {
            f0_terms.emplace_back(std::move(e), def.rhs.coeff(i));
        } else if (e[0] == 1) {
            e[0] = 0;
            f1_terms.emplace_back(std::move(e), def.rhs.coeff(i));
        } else {
            throw NotLaurentError("recurrence is not reversible: right side has degree > 1 in x[n]");
        }
    }
    const Exp m0 = def.lhs_exponents[0];
    const bool plain = f1_terms.empty() && m0 == 1;
    const bool solvable = !f1_terms.empty() && m0 == 0;
    if (!plain && !solvable)
        throw NotLaurentError("recurrence is not reversible: cannot solve for x[n]");
    LaurentPoly f0 = LaurentPoly::from_terms(nv, std::move(f0_terms));
    LaurentPoly f1 = LaurentPoly::from_terms(nv, std::move(f1_terms));

    // window holds (x_m, ..., x_{m+N-1}); point slot 0 is unused by f0/f1.
    std::vector<Rat> window = std::move(init);
    std::vector<Rat> out;
    out.reserve(static_cast<size_t>(std::max(steps, 0)));
    std::vector<Rat> point(static_cast<size_t>(nv));
    for (size_t p = 0; p < param_values.size(); ++p) point[static_cast<size_t>(N) + p] = param_values[p];
    for (int s = 0; s < steps; ++s) {
        const int n = -s; // solving the relation with base index n yields x_n
        for (int j = 1; j < N; ++j) point[static_cast<size_t>(j)] = window[static_cast<size_t>(j - 1)];
        const Rat& x_top = window[static_cast<size_t>(N - 1)];
        Rat side = x_top;
        for (int j = 1; j < N; ++j) {
            Exp m = def.lhs_exponents[static_cast<size_t>(j)];
            for (Exp k = 0; k < m; ++k) side *= point[static_cast<size_t>(j)];
        }
        Rat x_prev;
        if (plain) {
            if (side == 0) throw ZeroDivisionError("left-side monomial vanished", n);
            x_prev = f0.eval_rational(point) / side;
        } else {
            Rat denom = f1.eval_rational(point);
            if (denom == 0) throw ZeroDivisionError("cofactor of x[n] vanished", n);
            x_prev = (side - f0.eval_rational(point)) / denom;
        }
        out.push_back(x_prev);
        for (int j = N - 1; j > 0; --j) window[static_cast<size_t>(j)] = window[static_cast<size_t>(j - 1)];
        window[0] = x_prev;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Numeric iteration
// ---------------------------------------------------------------------------

NumericStepper::NumericStepper(const RecurrenceDef& def)
    : order_(def.order), nparams_(static_cast<int>(def.params.size())) {
    terms_.reserve(def.rhs.size());
    for (size_t i = 0; i < def.rhs.size(); ++i) {
        Term t;
        t.c = ExtComplex::from_int(def.rhs.coeff(i));
        const Exp* e = def.rhs.exps(i);
        for (int j = 0; j < def.window_vars(); ++j)
            if (e[j] != 0) t.powers.emplace_back(j, e[j]);
        terms_.push_back(std::move(t));
    }
    for (int j = 0; j < order_; ++j)
        if (def.lhs_exponents[static_cast<size_t>(j)] != 0)
            lhs_powers_.emplace_back(j, def.lhs_exponents[static_cast<size_t>(j)]);
}

ExtComplex NumericStepper::step(const std::vector<ExtComplex>& window,
                                const std::vector<ExtComplex>& params) const {
    ExtComplex den = ExtComplex::one();
    for (const auto& [j, m] : lhs_powers_) {
        const ExtComplex& v = window[static_cast<size_t>(j)];
        if (v.is_zero()) throw ZeroDivisionError("left-side monomial vanished", 0);
        den = den * v.pow(m);
    }
    ExtComplex num; // zero
    for (const auto& t : terms_) {
        ExtComplex prod = t.c;
        bool zero = false;
        for (const auto& [j, e] : t.powers) {
            const ExtComplex& v =
                j < order_ ? window[static_cast<size_t>(j)] : params[static_cast<size_t>(j - order_)];
            if (v.is_zero()) {
                zero = true;
                break;
            }
            prod = prod * v.pow(e);
        }
        if (!zero) num = num + prod;
    }
    return num / den;
}

NumericOrbit iterate_numeric(const RecurrenceDef& def, std::vector<ExtComplex> init, int n_max,
                             const std::vector<ExtComplex>& param_values) {
    check_sizes(def, init.size(), param_values.size());
    const int N = def.order;
    NumericStepper stepper(def);
    NumericOrbit orbit;
    orbit.values = std::move(init);
    if (n_max < static_cast<int>(orbit.values.size()))
        orbit.values.resize(static_cast<size_t>(std::max(n_max, 0)));
    std::vector<ExtComplex> window(static_cast<size_t>(N));
    for (int n = N; n < n_max; ++n) {
        for (int j = 0; j < N; ++j) window[static_cast<size_t>(j)] = orbit.values[static_cast<size_t>(n - N + j)];
        ExtComplex next;
        try {
            next = stepper.step(window, param_values);
        } catch (const ZeroDivisionError&) {
            orbit.truncated = true;
            orbit.reason = "zero divisor at step " + std::to_string(n + 1);
            break;
        }
        // The 128-bit exponent saturates near 1.7e38; stopping at 1e35 leaves
        // room for the additions and powers inside a step while still
        // covering every fitting window the estimators use.
        if (!next.is_zero() && std::abs(next.log2_abs()) > 1e35) {
            orbit.truncated = true;
            orbit.reason = "exponent overflow at step " + std::to_string(n + 1);
            break;
        }
        orbit.values.push_back(next);
    }
    return orbit;
}

// ---------------------------------------------------------------------------
// Reduced maps and first integrals
// ---------------------------------------------------------------------------

ExtComplex markoff_y_step(const ExtComplex& y1, const ExtComplex& y2) {
    if (y2.is_zero()) throw ZeroDivisionError("reduced map hit y = 0", 0);
    ExtComplex one = ExtComplex::one();
    return y1 * (y2 + one / y2);
}

ExtComplex somos4_y_step(const ExtComplex& y1, const ExtComplex& y2) {
    if (y1.is_zero() || y2.is_zero()) throw ZeroDivisionError("reduced map hit y = 0", 0);
    ExtComplex one = ExtComplex::one();
    return (y2 + one) / (y1 * y2 * y2);
}

Rat markoff_y_step(const Rat& y1, const Rat& y2) {
    if (y2 == 0) throw ZeroDivisionError("reduced map hit y = 0", 0);
    return y1 * (y2 + Rat(1) / y2);
}

Rat somos4_y_step(const Rat& y1, const Rat& y2) {
    if (y1 == 0 || y2 == 0) throw ZeroDivisionError("reduced map hit y = 0", 0);
    return (y2 + 1) / (y1 * y2 * y2);
}

LaurentPoly conserved_quantity(const std::string& name) {
    if (name == "rank2_K")
        return parse_poly("x1*x2^-1 + x2*x1^-1 + x1^-1*x2^-1", 2);
    if (name == "markoff_K")
        return parse_poly("x1*x2^-1*x3^-1 + x2*x1^-1*x3^-1 + x3*x1^-1*x2^-1", 3);
    throw SyntaxError("unknown conserved quantity '" + name + "'", 0);
}

// ---------------------------------------------------------------------------
// Tropical d-vector dynamics
// ---------------------------------------------------------------------------

std::vector<std::vector<Int>> tropical_dvector_sequence(const RecurrenceDef& def, int n_max) {
    const int N = def.order;
    const int nv = def.window_vars();
    std::vector<std::vector<Int>> d;
    d.reserve(static_cast<size_t>(std::max(n_max, 0)));
    for (int j = 0; j < N && j < std::max(n_max, 0); ++j) {
        std::vector<Int> dj(static_cast<size_t>(nv), Int(0));
        dj[static_cast<size_t>(j)] = -1;
        d.push_back(std::move(dj));
    }
    std::vector<Int> cand(static_cast<size_t>(nv));
    for (int n = N; n < n_max; ++n) {
        std::vector<Int> best;
        for (size_t t = 0; t < def.rhs.size(); ++t) {
            const Exp* e = def.rhs.exps(t);
            std::fill(cand.begin(), cand.end(), Int(0));
            for (int j = 0; j < N; ++j) {
                if (e[static_cast<size_t>(j)] == 0) continue;
                const auto& dj = d[static_cast<size_t>(n - N + j)];
                for (int k = 0; k < nv; ++k)
                    cand[static_cast<size_t>(k)] += Int(e[static_cast<size_t>(j)]) * dj[static_cast<size_t>(k)];
            }
            for (int p = N; p < nv; ++p)
                cand[static_cast<size_t>(p)] -= Int(e[static_cast<size_t>(p)]);
            if (best.empty()) {
                best = cand;
            } else {
                for (int k = 0; k < nv; ++k)
                    if (cand[static_cast<size_t>(k)] > best[static_cast<size_t>(k)])
                        best[static_cast<size_t>(k)] = cand[static_cast<size_t>(k)];
            }
        }
        for (int j = 0; j < N; ++j) {
            Exp m = def.lhs_exponents[static_cast<size_t>(j)];
            if (m == 0) continue;
            const auto& dj = d[static_cast<size_t>(n - N + j)];
            for (int k = 0; k < nv; ++k)
                best[static_cast<size_t>(k)] -= Int(m) * dj[static_cast<size_t>(k)];
        }
        d.push_back(std::move(best));
    }
    return d;
}

} // namespace lpdyn
