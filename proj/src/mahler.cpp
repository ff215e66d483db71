#include "lpdyn/mahler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <thread>

#include "lpdyn/errors.hpp"
#include "lpdyn/roots.hpp"

namespace lpdyn {

namespace {

constexpr long kBlockSize = 4096;       // samples per RNG stream
constexpr double kOverflowLog2 = 1e35;  // matches the numeric-orbit cutoff

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// One deterministic RNG stream per fixed-size sample block: assignments never
// depend on the worker count, so neither do the results.
class BlockRng {
public:
    BlockRng(std::uint64_t seed, long block_id) {
        state_ = seed ^ (0xD1B54A32D192ED03ull * (static_cast<std::uint64_t>(block_id) + 1));
        (void)splitmix64(state_);
        (void)splitmix64(state_);
    }
    // Uniform angle in (-pi, pi]: 53 random bits mapped linearly.
    double angle() {
        const double u = static_cast<double>(splitmix64(state_) >> 11) * 0x1.0p-53; // [0, 1)
        return M_PI * (1.0 - 2.0 * u);
    }

private:
    std::uint64_t state_;
};

struct Accumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    long used = 0;
    long skipped = 0;

    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++used;
    }
    void merge(const Accumulator& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
        used += o.used;
        skipped += o.skipped;
    }
    MahlerEstimate estimate() const {
        MahlerEstimate e;
        e.samples_used = used;
        e.skipped = skipped;
        if (used > 0) {
            e.value = sum / static_cast<double>(used);
            if (used > 1) {
                const double var = std::max(0.0, (sum_sq - sum * sum / static_cast<double>(used))
                                                     / static_cast<double>(used - 1));
                e.standard_error = std::sqrt(var / static_cast<double>(used));
            }
        }
        return e;
    }
};

// Runs fn(block_id) for block_id in [0, blocks) across the requested worker
// count; every block writes only to its own slot, and the caller merges the
// slots in block order afterwards.
void run_blocks(long blocks, int threads, const std::function<void(long)>& fn) {
    if (threads <= 1 || blocks <= 1) {
        for (long b = 0; b < blocks; ++b) fn(b);
        return;
    }
    std::vector<std::thread> pool;
    const int workers = static_cast<int>(std::min<long>(threads, blocks));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (long b = w; b < blocks; b += workers) fn(b);
        });
    }
    for (std::thread& t : pool) t.join();
}

double log_zero_threshold(const SamplerConfig& cfg) { return std::log(cfg.zero_threshold); }

// log|value| of an extended-range complex, or NaN for a zero hit.
double sample_log(const ExtComplex& v, double log_thresh) {
    if (v.is_zero()) return std::numeric_limits<double>::quiet_NaN();
    const double l = v.log_abs();
    if (l < log_thresh) return std::numeric_limits<double>::quiet_NaN();
    return l;
}

struct SequenceAccumulator {
    std::vector<Accumulator> per_n;
    long overflow_at = -1; // earliest 1-based n where a sample overflowed

    explicit SequenceAccumulator(int n_max) : per_n(static_cast<size_t>(n_max)) {}
    void merge(const SequenceAccumulator& o) {
        for (size_t i = 0; i < per_n.size(); ++i) per_n[i].merge(o.per_n[i]);
        if (o.overflow_at >= 0 && (overflow_at < 0 || o.overflow_at < overflow_at)) {
            overflow_at = o.overflow_at;
        }
    }
};

// Assembles the shared parts of every sequence estimator: per-n estimates,
// truncation on overflow or on the first n where no sample survived.
MahlerSequence finish_sequence(std::string system, const SamplerConfig& cfg, int n_max,
                               SequenceAccumulator&& total) {
    MahlerSequence seq;
    seq.system = std::move(system);
    seq.config = cfg;
    int limit = n_max;
    if (total.overflow_at >= 0) {
        limit = static_cast<int>(total.overflow_at) - 1;
        seq.truncated = true;
        seq.reason = "extended-range overflow at n = " + std::to_string(total.overflow_at);
    }
    for (int n = 1; n <= limit; ++n) {
        const Accumulator& acc = total.per_n[static_cast<size_t>(n - 1)];
        if (acc.used == 0) {
            seq.truncated = true;
            seq.reason = "all samples invalid at n = " + std::to_string(n);
            break;
        }
        seq.per_n.push_back(acc.estimate());
    }
    return seq;
}

long block_count(long samples) { return (samples + kBlockSize - 1) / kBlockSize; }

long block_samples(long samples, long block_id) {
    return std::min(kBlockSize, samples - block_id * kBlockSize);
}

} // namespace

void SamplerConfig::validate() const {
    if (sample_count < 1) throw Error("sample_count must be at least 1");
    if (lattice_m < 2) throw Error("lattice_m must be at least 2");
    if (!(zero_threshold > 0.0)) throw Error("zero_threshold must be positive");
    if (torus_dim < 1) throw Error("torus_dim must be at least 1");
}

double jensen_univariate(const LaurentPoly& p) {
    if (p.num_vars() != 1) throw DimensionMismatchError("jensen_univariate needs a univariate polynomial");
    if (p.is_zero()) throw Error("log Mahler measure of the zero polynomial is undefined");
    Exp lo = p.exps(0)[0];
    Exp hi = lo;
    for (size_t i = 1; i < p.size(); ++i) {
        lo = std::min(lo, p.exps(i)[0]);
        hi = std::max(hi, p.exps(i)[0]);
    }
    if (hi - lo > 10000) throw Error("degree exceeds the root-finder cap of 10000");
    std::vector<Int> coeffs(static_cast<size_t>(hi - lo) + 1, Int(0));
    for (size_t i = 0; i < p.size(); ++i) coeffs[static_cast<size_t>(p.exps(i)[0] - lo)] = p.coeff(i);
    return jensen_univariate(coeffs);
}

MahlerEstimate mc_estimate(const LaurentPoly& p, const SamplerConfig& cfg, int threads) {
    cfg.validate();
    if (p.is_zero()) throw Error("cannot estimate the zero polynomial");
    const int k = p.num_vars();
    const double log_thresh = log_zero_threshold(cfg);
    const long blocks = block_count(cfg.sample_count);
    std::vector<Accumulator> partial(static_cast<size_t>(blocks));

    run_blocks(blocks, threads, [&](long b) {
        BlockRng rng(cfg.rng_seed, b);
        Accumulator& acc = partial[static_cast<size_t>(b)];
        std::vector<ExtComplex> point(static_cast<size_t>(k));
        const long count = block_samples(cfg.sample_count, b);
        for (long s = 0; s < count; ++s) {
            for (int j = 0; j < k; ++j) point[static_cast<size_t>(j)] = ExtComplex::from_polar_unit(rng.angle());
            const double l = sample_log(p.eval_complex(point), log_thresh);
            if (std::isnan(l)) {
                ++acc.skipped;
            } else {
                acc.add(l);
            }
        }
    });

    Accumulator total;
    for (const Accumulator& acc : partial) total.merge(acc);
    if (total.used == 0) throw Error("every sample hit a zero of the polynomial");
    return total.estimate();
}

MahlerEstimate lattice_estimate(const LaurentPoly& p, const SamplerConfig& cfg, int threads) {
    cfg.validate();
    if (p.is_zero()) throw Error("cannot estimate the zero polynomial");
    const int k = p.num_vars();
    const long M = cfg.lattice_m;
    double points = 1.0;
    for (int j = 0; j < k; ++j) points *= static_cast<double>(M);
    if (points > 2.5e7) throw Error("lattice of " + std::to_string(points) + " points is too large");
    const double log_thresh = log_zero_threshold(cfg);

    std::vector<ExtComplex> unit(static_cast<size_t>(M));
    for (long a = 0; a < M; ++a) {
        unit[static_cast<size_t>(a)] = ExtComplex::from_polar_unit(2.0 * M_PI * static_cast<double>(a)
                                                                   / static_cast<double>(M));
    }

    // Rows are indexed by the first coordinate; each row owns one slot.
    std::vector<Accumulator> rows(static_cast<size_t>(M));
    run_blocks(M, threads, [&](long a) {
        Accumulator& acc = rows[static_cast<size_t>(a)];
        std::vector<ExtComplex> point(static_cast<size_t>(k));
        point[0] = unit[static_cast<size_t>(a)];
        const long inner = static_cast<long>(std::llround(points / static_cast<double>(M)));
        for (long flat = 0; flat < inner; ++flat) {
            long rest = flat;
            for (int j = 1; j < k; ++j) {
                point[static_cast<size_t>(j)] = unit[static_cast<size_t>(rest % M)];
                rest /= M;
            }
            const double l = sample_log(p.eval_complex(point), log_thresh);
            if (std::isnan(l)) {
                ++acc.skipped;
            } else {
                acc.add(l);
            }
        }
    });

    Accumulator total;
    for (const Accumulator& acc : rows) total.merge(acc);
    if (total.used == 0) throw Error("every grid point hit a zero of the polynomial");
    MahlerEstimate est = total.estimate();
    est.standard_error = 0.0; // deterministic grid
    return est;
}

MahlerSequence orbit_mahler_sequence(const RecurrenceDef& def, int n_max, const SamplerConfig& cfg,
                                     int threads) {
    cfg.validate();
    if (n_max < 1) throw Error("n_max must be at least 1");
    const int N = def.order;
    const int P = static_cast<int>(def.params.size());
    if (cfg.torus_dim != N + P) {
        throw DimensionMismatchError("torus_dim must equal order + parameter count = "
                                     + std::to_string(N + P));
    }
    if (n_max < N) throw Error("n_max must cover the initial window");
    const double log_thresh = log_zero_threshold(cfg);
    const NumericStepper stepper(def);

    const long blocks = block_count(cfg.sample_count);
    std::vector<SequenceAccumulator> partial(static_cast<size_t>(blocks), SequenceAccumulator(n_max));

    run_blocks(blocks, threads, [&](long b) {
        BlockRng rng(cfg.rng_seed, b);
        SequenceAccumulator& acc = partial[static_cast<size_t>(b)];
        std::vector<ExtComplex> orbit(static_cast<size_t>(n_max));
        std::vector<ExtComplex> window(static_cast<size_t>(N));
        std::vector<ExtComplex> params(static_cast<size_t>(P));
        const long count = block_samples(cfg.sample_count, b);
        for (long s = 0; s < count; ++s) {
            for (int j = 0; j < N; ++j) orbit[static_cast<size_t>(j)] = ExtComplex::from_polar_unit(rng.angle());
            for (int j = 0; j < P; ++j) params[static_cast<size_t>(j)] = ExtComplex::from_polar_unit(rng.angle());
            // Initial coordinates sit on the unit torus: log|x_n| = 0 exactly.
            for (int n = 0; n < N; ++n) acc.per_n[static_cast<size_t>(n)].add(0.0);
            bool dead = false;
            for (int n = N; n < n_max; ++n) {
                if (!dead) {
                    for (int j = 0; j < N; ++j) window[static_cast<size_t>(j)] = orbit[static_cast<size_t>(n - N + j)];
                    try {
                        orbit[static_cast<size_t>(n)] = stepper.step(window, params);
                    } catch (const ZeroDivisionError&) {
                        dead = true;
                    }
                    if (!dead && !orbit[static_cast<size_t>(n)].is_zero()
                        && std::abs(orbit[static_cast<size_t>(n)].log2_abs()) > kOverflowLog2) {
                        if (acc.overflow_at < 0 || n + 1 < acc.overflow_at) acc.overflow_at = n + 1;
                        dead = true;
                    }
                }
                if (dead) {
                    ++acc.per_n[static_cast<size_t>(n)].skipped;
                    continue;
                }
                const double l = sample_log(orbit[static_cast<size_t>(n)], log_thresh);
                if (std::isnan(l)) {
                    // A zero value is a valid orbit point with log-measure
                    // contribution undefined; the sample cannot continue
                    // because the next window would divide by it.
                    dead = true;
                    ++acc.per_n[static_cast<size_t>(n)].skipped;
                } else {
                    acc.per_n[static_cast<size_t>(n)].add(l);
                }
            }
        }
    });

    SequenceAccumulator total(n_max);
    for (const SequenceAccumulator& acc : partial) total.merge(acc);
    return finish_sequence(def.name.empty() ? def.to_string() : def.name, cfg, n_max, std::move(total));
}

namespace {

// Shared driver for the two reduced-map accumulations.  step_fn advances the
// y-orbit; combine_fn produces the per-sample s_{n+1} from the trailing
// window of per-sample accumulations and log|y_n|.
template <typename StepFn, typename CombineFn>
MahlerSequence reduced_recursion_sequence(const std::string& system, int n_max, const SamplerConfig& cfg,
                                          int threads, int base, StepFn step_fn, CombineFn combine_fn) {
    cfg.validate();
    if (cfg.torus_dim != 2) throw DimensionMismatchError("reduced maps sample (y1, y2) on T^2");
    if (n_max < base) throw Error("n_max must be at least " + std::to_string(base));
    const double log_thresh = log_zero_threshold(cfg);

    const long blocks = block_count(cfg.sample_count);
    std::vector<SequenceAccumulator> partial(static_cast<size_t>(blocks), SequenceAccumulator(n_max));

    run_blocks(blocks, threads, [&](long b) {
        BlockRng rng(cfg.rng_seed, b);
        SequenceAccumulator& acc = partial[static_cast<size_t>(b)];
        const long count = block_samples(cfg.sample_count, b);
        std::vector<double> s(static_cast<size_t>(n_max), 0.0);
        for (long smp = 0; smp < count; ++smp) {
            ExtComplex y_prev = ExtComplex::from_polar_unit(rng.angle());
            ExtComplex y_cur = ExtComplex::from_polar_unit(rng.angle());
            // x_1..x_base start on the unit torus: their accumulations are 0.
            for (int n = 0; n < base; ++n) {
                s[static_cast<size_t>(n)] = 0.0;
                acc.per_n[static_cast<size_t>(n)].add(0.0);
            }
            bool dead = false;
            for (int n = base; n < n_max; ++n) {
                if (!dead) {
                    ExtComplex y_next;
                    try {
                        y_next = step_fn(y_prev, y_cur);
                    } catch (const ZeroDivisionError&) {
                        dead = true;
                    }
                    if (!dead) {
                        const double ly = sample_log(y_next, log_thresh);
                        if (std::isnan(ly)) {
                            dead = true;
                        } else if (std::abs(y_next.log2_abs()) > kOverflowLog2
                                   || std::abs(s[static_cast<size_t>(n - 1)]) > 1e300) {
                            if (acc.overflow_at < 0 || n + 1 < acc.overflow_at) acc.overflow_at = n + 1;
                            dead = true;
                        } else {
                            s[static_cast<size_t>(n)] = combine_fn(s, n, ly);
                            acc.per_n[static_cast<size_t>(n)].add(s[static_cast<size_t>(n)]);
                            y_prev = y_cur;
                            y_cur = y_next;
                        }
                    }
                }
                if (dead) ++acc.per_n[static_cast<size_t>(n)].skipped;
            }
        }
    });

    SequenceAccumulator total(n_max);
    for (const SequenceAccumulator& acc : partial) total.merge(acc);
    return finish_sequence(system, cfg, n_max, std::move(total));
}

} // namespace

MahlerSequence markoff_recursion_sequence(int n_max, const SamplerConfig& cfg, int threads) {
    // m(x_{n+1}) = m(x_n) + m(y_n) with m(x_1) = m(x_2) = m(x_3) = 0; the
    // first reduced value y_3 comes from the sampled (y_1, y_2).
    return reduced_recursion_sequence(
        "markoff-reduced", n_max, cfg, threads, /*base=*/3,
        [](const ExtComplex& y1, const ExtComplex& y2) { return markoff_y_step(y1, y2); },
        [](const std::vector<double>& s, int n, double ly) { return s[static_cast<size_t>(n - 1)] + ly; });
}

MahlerSequence somos4_recursion_sequence(int n_max, const SamplerConfig& cfg, int threads) {
    // m(x_{n+2}) = 2 m(x_{n+1}) - m(x_n) + m(y_n) with m(x_1..x_4) = 0; the
    // sampled (y_1, y_2) feed y_3, which produces x_5.
    return reduced_recursion_sequence(
        "somos4-reduced", n_max, cfg, threads, /*base=*/4,
        [](const ExtComplex& y1, const ExtComplex& y2) { return somos4_y_step(y1, y2); },
        [](const std::vector<double>& s, int n, double ly) {
            return 2.0 * s[static_cast<size_t>(n - 1)] - s[static_cast<size_t>(n - 2)] + ly;
        });
}

std::vector<std::pair<std::vector<long>, double>> lawton_check(
    const LaurentPoly& p, const std::vector<std::vector<long>>& exponent_tuples) {
    if (p.is_zero()) throw Error("cannot collapse the zero polynomial");
    const int k = p.num_vars();
    std::vector<std::pair<std::vector<long>, double>> out;
    out.reserve(exponent_tuples.size());
    for (const std::vector<long>& ks : exponent_tuples) {
        if (static_cast<int>(ks.size()) != k) {
            throw DimensionMismatchError("exponent tuple size must match the variable count");
        }
        for (const long v : ks) {
            if (v < 1) throw Error("substitution exponents must be positive");
        }
        // Collapse p(t^{k_1}, ..., t^{k_N}) to a univariate coefficient map.
        std::map<long, Int> collapsed;
        for (size_t i = 0; i < p.size(); ++i) {
            long e = 0;
            for (int j = 0; j < k; ++j) e += ks[static_cast<size_t>(j)] * static_cast<long>(p.exps(i)[j]);
            collapsed[e] += p.coeff(i);
        }
        while (!collapsed.empty() && collapsed.begin()->second == 0) collapsed.erase(collapsed.begin());
        while (!collapsed.empty() && collapsed.rbegin()->second == 0) {
            collapsed.erase(std::prev(collapsed.end()));
        }
        if (collapsed.empty()) throw Error("substitution collapsed the polynomial to zero");
        const long lo = collapsed.begin()->first;
        const long hi = collapsed.rbegin()->first;
        if (hi - lo > 10000) throw Error("collapsed degree exceeds the root-finder cap of 10000");
        std::vector<Int> coeffs(static_cast<size_t>(hi - lo) + 1, Int(0));
        for (const auto& [e, c] : collapsed) coeffs[static_cast<size_t>(e - lo)] = c;
        out.emplace_back(ks, jensen_univariate(coeffs));
    }
    return out;
}

} // namespace lpdyn
