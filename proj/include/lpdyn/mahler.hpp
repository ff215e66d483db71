#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "lpdyn/laurent.hpp"
#include "lpdyn/recurrence.hpp"

namespace lpdyn {

// How torus averages are sampled.
struct SamplerConfig {
    enum class Mode { monte_carlo, lattice };
    Mode mode = Mode::monte_carlo;
    long sample_count = 10000;      // Monte-Carlo sample count |I|
    int lattice_m = 100;            // lattice grid is M^k points of M-th roots of unity
    std::uint64_t rng_seed = 1;     // seeds every Monte-Carlo stream
    int torus_dim = 2;              // k; orbit samplers need order + parameter count
    double zero_threshold = 1e-300; // |value| below this counts as a zero hit

    void validate() const; // throws Error on a bad field
};

struct MahlerEstimate {
    double value = 0.0;          // mean of log|.| in nats
    double standard_error = 0.0; // sample standard deviation / sqrt(samples_used); 0 for lattice
    long skipped = 0;            // zero/invalid hits, never imputed
    long samples_used = 0;       // samples_used + skipped = total samples
};

struct MahlerSequence {
    std::vector<MahlerEstimate> per_n; // S_1, S_2, ... (index i holds S_{i+1})
    std::string system;
    SamplerConfig config;
    bool truncated = false;
    std::string reason;
};

// log Mahler measure of a univariate Laurent polynomial, exactly via roots
// (monomial factors contribute zero).  Degree after shifting must be <= 1e4.
double jensen_univariate(const LaurentPoly& p);

// Mean of log|p| over Monte-Carlo samples of the unit torus, deterministic
// for a fixed seed and independent of the worker count.
MahlerEstimate mc_estimate(const LaurentPoly& p, const SamplerConfig& cfg, int threads = 1);

// Mean of log|p| over the M^k grid of M-th roots of unity.
MahlerEstimate lattice_estimate(const LaurentPoly& p, const SamplerConfig& cfg, int threads = 1);

// S_n = mean of log|x_n| across sampled numeric orbits of the recurrence,
// n = 1..n_max.  Initial coordinates and any parameters are sampled on the
// unit torus, so cfg.torus_dim must equal order + parameter count.  Stops
// early (with the truncation flag set) if a sample outgrows even the
// extended-range exponent or every sample has died.
MahlerSequence orbit_mahler_sequence(const RecurrenceDef& def, int n_max, const SamplerConfig& cfg,
                                     int threads = 1);

// S_n built from the reduced two-dimensional maps:
// Markoff accumulates m(x_{n+1}) = m(x_n) + m(y_n), Somos-4 accumulates
// m(x_{n+2}) = 2 m(x_{n+1}) - m(x_n) + m(y_n), with (y_1, y_2) sampled on T^2.
MahlerSequence markoff_recursion_sequence(int n_max, const SamplerConfig& cfg, int threads = 1);
MahlerSequence somos4_recursion_sequence(int n_max, const SamplerConfig& cfg, int threads = 1);

// Univariate Jensen values of p(t^{k_1}, ..., t^{k_N}) for each exponent
// tuple; these converge to the multivariate measure as min k_j grows.
std::vector<std::pair<std::vector<long>, double>> lawton_check(
    const LaurentPoly& p, const std::vector<std::vector<long>>& exponent_tuples);

} // namespace lpdyn
