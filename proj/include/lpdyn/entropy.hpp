#pragma once
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lpdyn/bigint.hpp"
#include "lpdyn/mahler.hpp"
#include "lpdyn/recurrence.hpp"

namespace lpdyn {

// Growth-law families a sequence S_1, S_2, ... may be fitted against.
//   exponential: log S_n = intercept + slope * n        (slope is the entropy)
//   linear:      S_n     = intercept + slope * n
//   quadratic:   S_n     = intercept + slope * n^2
//   loglog:      log S_n = intercept + slope * log n    (slope is the degree)
enum class FitKind { linear, exponential, quadratic, loglog };

std::string to_string(FitKind kind);

// Least-squares fit of one growth law over a window of a 1-based sequence.
struct SlopeFit {
    FitKind kind = FitKind::exponential;
    double slope = 0.0;
    double intercept = 0.0;
    int window_lo = 0;             // first index n used (1-based, inclusive)
    int window_hi = 0;             // last index n used (inclusive)
    double residual_rms = 0.0;     // in the fit's transformed coordinates
    std::optional<double> two_point; // endpoint-only slope, same units as slope
    int points_used = 0;
    int excluded = 0;              // window entries unusable for this kind
};

// Entropy a fit implies: the slope for the exponential kind, zero for the
// sub-exponential kinds.
double entropy_estimate(const SlopeFit& fit);

// Core fitter.  `series` is 1-based (series[0] holds S_1).  A window of
// (0, 0) selects the trailing half [len/2 + 1, len]; otherwise the window
// must satisfy 1 <= n_lo <= n_hi <= len.  Entries a kind cannot transform
// (nonpositive values under a log) are excluded and counted.  Throws Error
// when fewer than 5 usable points remain.
SlopeFit fit_sequence(const std::vector<double>& series, FitKind kind,
                      int n_lo = 0, int n_hi = 0);

// Picks the growth law for a sequence: whichever of the linear, quadratic,
// and exponential fits tracks the raw values with the smallest residual,
// with one guard — an exponential winner whose rate is under 0.2 is
// re-classified as polynomial growth, since a rate that small over these
// window lengths is indistinguishable from it and every positive-entropy
// system handled here sits well above the floor.
SlopeFit select_growth_fit(const std::vector<double>& series,
                           int n_lo = 0, int n_hi = 0);

// d-vectors d_1..d_{n_max} (n_max >= 3) of the rank-2 exchange relation,
// from the piecewise-linear recursion d_{n+2} + d_n = max(r * d_{n+1}, 0)
// with d_1 = (-1, 0), d_2 = (0, -1).
std::vector<std::vector<Int>> tropical_dvectors(int r, int n_max);

// Degree proxies for a d-vector sequence: the largest component, clamped
// to at least 1 so the initial variables count as degree one.
std::vector<double> dvector_degrees(const std::vector<std::vector<Int>>& dvectors);

// Rational degrees of the symbolic iterates x_1..x_n_max.  Throws
// BudgetExceededError if the orbit leaves the default term budget.
std::vector<double> symbolic_degrees(const RecurrenceDef& def, int n_max);

// Algebraic entropy of the rank-2 family: 0 for r <= 2, otherwise
// log((r + sqrt(r^2 - 4)) / 2).  Requires r >= 1.
double rank2_entropy_exact(int r);

// Fits a degree sequence, choosing the growth law via select_growth_fit.
SlopeFit algebraic_entropy_fit(const std::vector<double>& degrees,
                               int n_lo = 0, int n_hi = 0);

// Height of a rational number: H(p/q) = max(|p|, q) in lowest terms with
// q > 0, and H(0) = 1.  The companion log_height lives next to the Rat
// type itself.
Int rational_height(const Rat& v);

// log-heights h(x_1)..h(x_n_max) along the exact rational orbit.  A
// vanishing left-side monomial propagates as ZeroDivisionError carrying
// the 1-based step.
std::vector<double> diophantine_heights(const RecurrenceDef& def,
                                        const std::vector<Rat>& init, int n_max,
                                        const std::vector<Rat>& param_values = {});

// Exponential-kind fit of the log-height sequence.
SlopeFit diophantine_entropy_fit(const RecurrenceDef& def, const std::vector<Rat>& init,
                                 int n_max, const std::vector<Rat>& param_values = {},
                                 int n_lo = 0, int n_hi = 0);

// Per-n means of a sampled sequence, for feeding fits and residuals.
std::vector<double> mahler_values(const MahlerSequence& seq);

// Fit of a sampled measure sequence; the kind is caller-selectable.
SlopeFit mahler_entropy_fit(const MahlerSequence& seq, int n_lo = 0, int n_hi = 0,
                            FitKind kind = FitKind::exponential);

// Residuals S_{n+2} + S_n - r * S_{n+1} for n = 1..len-2.  When the
// sequence tracks the rank-2 map with the same r these stay bounded; a
// mismatched r makes them grow with the sequence.
std::vector<double> tropical_mahler_residuals(const MahlerSequence& seq, int r);

// Boundedness diagnostic: true when every residual stays within an
// allowance of max(2.0, 1e-9 * local sequence scale).  The relative part
// absorbs double-rounding cancellation once S_n passes 1e16 — far below
// any genuine growth trend, which tracks S_n itself.
bool residuals_bounded(const MahlerSequence& seq, int r);

// Budgets for compare_entropies.  Zero depth fields keep the per-system
// defaults.
struct EntropyBudgets {
    int algebraic_n = 0;
    int diophantine_n = 0;
    int mahler_n = 0;
    std::size_t mc_samples = 4096;
    std::uint64_t rng_seed = 20240801;
    int threads = 1;
};

// Side-by-side entropy estimates for one system.  A fit that fails leaves
// its field empty and records the reason in `errors`; the report is still
// produced.  ordering_ok checks the sampled-measure rate does not exceed
// the height rate by more than 5e-3.
struct EntropyReport {
    std::string system;
    std::optional<SlopeFit> algebraic;
    std::optional<SlopeFit> diophantine;
    std::optional<SlopeFit> mahler;
    std::optional<double> exact_reference;
    bool algebraic_from_tropical = false;
    bool ordering_ok = true;
    std::map<std::string, std::string> errors;
};

// Runs the three estimators on a built-in system name or a recurrence in
// the text grammar.  Name resolution failures throw; per-estimator
// failures are recorded in the report.
EntropyReport compare_entropies(const std::string& system,
                                const EntropyBudgets& budgets = {});

std::string to_json(const EntropyReport& report);

} // namespace lpdyn
