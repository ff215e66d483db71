#pragma once
#include <stdexcept>
#include <string>

namespace lpdyn {

// Root of the library's error hierarchy.  Everything thrown on purpose
// derives from Error, so callers can catch one type at the boundary.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Result of an exact-division attempt whose remainder is nonzero, or a
// substitution that leaves the Laurent ring.  This is an expected outcome
// for probes (e.g. falsifying a Laurent-property claim), hence its own type.
struct NotLaurentError : Error {
    explicit NotLaurentError(const std::string& what) : Error(what) {}
};

// Operands built over different variable counts.
struct DimensionMismatchError : Error {
    explicit DimensionMismatchError(const std::string& what) : Error(what) {}
};

// Evaluation at a point with a zero coordinate raised to a negative power,
// or an orbit step that divides by an exact zero.
struct ZeroDivisionError : Error {
    size_t step = 0;
    explicit ZeroDivisionError(const std::string& what, size_t at_step = 0)
        : Error(what), step(at_step) {}
};

// Text that does not match the recurrence / polynomial grammar.
struct SyntaxError : Error {
    size_t position = 0;
    SyntaxError(const std::string& what, size_t pos)
        : Error(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

// A computation exceeded its configured resource budget.  Callers that can
// return partial results set a truncation flag instead of throwing this.
struct BudgetExceededError : Error {
    explicit BudgetExceededError(const std::string& what) : Error(what) {}
};

} // namespace lpdyn
