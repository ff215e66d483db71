#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "lpdyn/entropy.hpp"
#include "lpdyn/errors.hpp"
#include "lpdyn/mahler.hpp"
#include "lpdyn/recurrence.hpp"

using lpdyn::algebraic_entropy_fit;
using lpdyn::builtin_recurrence;
using lpdyn::compare_entropies;
using lpdyn::diophantine_entropy_fit;
using lpdyn::dvector_degrees;
using lpdyn::entropy_estimate;
using lpdyn::EntropyBudgets;
using lpdyn::EntropyReport;
using lpdyn::fit_sequence;
using lpdyn::FitKind;
using lpdyn::Int;
using lpdyn::iterate_symbolic;
using lpdyn::log_height;
using lpdyn::MahlerEstimate;
using lpdyn::MahlerSequence;
using lpdyn::mahler_entropy_fit;
using lpdyn::orbit_mahler_sequence;
using lpdyn::rank2_entropy_exact;
using lpdyn::Rat;
using lpdyn::rational_height;
using lpdyn::residuals_bounded;
using lpdyn::SamplerConfig;
using lpdyn::SlopeFit;
using lpdyn::symbolic_degrees;
using lpdyn::to_json;
using lpdyn::tropical_dvectors;
using lpdyn::tropical_mahler_residuals;

namespace {

SamplerConfig seq_config(std::size_t samples, int torus_dim, std::uint64_t seed = 20240801) {
    SamplerConfig cfg;
    cfg.sample_count = samples;
    cfg.rng_seed = seed;
    cfg.torus_dim = torus_dim;
    return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("entropy");

TEST_CASE("tropical d-vectors match the exchange relation and hand values") {
    // Hand-iterated r = 3 values: d3 = max(3 d2, 0) - d1 and so on.
    const auto d3 = tropical_dvectors(3, 5);
    REQUIRE(d3.size() == 5);
    CHECK(d3[0] == std::vector<Int>{Int(-1), Int(0)});
    CHECK(d3[1] == std::vector<Int>{Int(0), Int(-1)});
    CHECK(d3[2] == std::vector<Int>{Int(1), Int(0)});
    CHECK(d3[3] == std::vector<Int>{Int(3), Int(1)});
    CHECK(d3[4] == std::vector<Int>{Int(8), Int(3)});

    // The defining relation, re-derived independently here: componentwise
    // d_{n+2} + d_n = max(r * d_{n+1}, 0).
    for (const int r : {2, 3, 5}) {
        const auto d = tropical_dvectors(r, 25);
        for (size_t n = 0; n + 2 < d.size(); ++n) {
            for (size_t k = 0; k < 2; ++k) {
                Int rhs = Int(r) * d[n + 1][k];
                if (rhs < 0) rhs = 0;
                CHECK(d[n + 2][k] + d[n][k] == rhs);
            }
        }
    }

    // r = 2 grows linearly: second differences vanish once both components
    // are nonnegative (from n = 3 on).
    const auto d2 = tropical_dvectors(2, 20);
    for (size_t n = 2; n + 2 < d2.size(); ++n) {
        for (size_t k = 0; k < 2; ++k) {
            CHECK(d2[n + 2][k] - Int(2) * d2[n + 1][k] + d2[n][k] == 0);
        }
    }

    CHECK_THROWS_AS(tropical_dvectors(3, 2), lpdyn::Error);
    CHECK_THROWS_AS(tropical_dvectors(0, 10), lpdyn::Error);
}

TEST_CASE("tropical and symbolic d-vectors agree") {
    // The d-vector of a symbolic iterate is minus its componentwise minimum
    // exponent vector.  Depth caps keep the symbolic side affordable; the
    // agreement is exact at every checked depth.
    const std::vector<std::pair<int, int>> caps = {{1, 15}, {2, 15}, {3, 8}, {4, 7}, {5, 6}};
    for (const auto& [r, n_max] : caps) {
        const auto trop = tropical_dvectors(r, n_max);
        const auto orbit = iterate_symbolic(builtin_recurrence("rank2(" + std::to_string(r) + ")"), n_max);
        REQUIRE_FALSE(orbit.truncated);
        for (int n = 0; n < n_max; ++n) {
            const auto lo = orbit.iterates[static_cast<size_t>(n)].min_exps();
            for (size_t k = 0; k < 2; ++k) {
                CHECK(trop[static_cast<size_t>(n)][k] == Int(-static_cast<long>(lo[k])));
            }
        }
    }
}

TEST_CASE("rank-2 entropy closed form") {
    CHECK(rank2_entropy_exact(1) == 0.0);
    CHECK(rank2_entropy_exact(2) == 0.0);
    CHECK(std::abs(rank2_entropy_exact(3) - 0.9624236498) <= 1e-9);
    CHECK(std::abs(rank2_entropy_exact(4) - 1.316957897) <= 1e-9);
    CHECK(std::abs(rank2_entropy_exact(5) - 1.566799237) <= 1e-9);
    // log((r + sqrt(r^2 - 4))/2) = acosh(r/2) gives an independent oracle.
    for (int r = 3; r <= 12; ++r) {
        CHECK(std::abs(rank2_entropy_exact(r) - std::acosh(r / 2.0)) <= 1e-14);
    }
    CHECK_THROWS_AS(rank2_entropy_exact(0), lpdyn::Error);
}

TEST_CASE("slope fits recover synthetic growth laws") {
    std::vector<double> expo, lin, quad, power;
    for (int n = 1; n <= 40; ++n) {
        expo.push_back(3.0 * std::exp(0.7 * n));
        lin.push_back(2.5 * n + 1.0);
        quad.push_back(0.04 * n * n + 0.3);
        power.push_back(5.0 * std::pow(n, 2.0));
    }

    const SlopeFit fe = fit_sequence(expo, FitKind::exponential);
    CHECK(fe.window_lo == 21);
    CHECK(fe.window_hi == 40);
    CHECK(fe.points_used == 20);
    CHECK(std::abs(fe.slope - 0.7) <= 1e-9);
    CHECK(std::abs(fe.intercept - std::log(3.0)) <= 1e-7);
    CHECK(fe.residual_rms <= 1e-9);
    REQUIRE(fe.two_point.has_value());
    CHECK(std::abs(*fe.two_point - 0.7) <= 1e-12);
    CHECK(entropy_estimate(fe) == fe.slope);

    const SlopeFit fl = fit_sequence(lin, FitKind::linear, 5, 40);
    CHECK(std::abs(fl.slope - 2.5) <= 1e-10);
    CHECK(std::abs(*fl.two_point - 2.5) <= 1e-12);
    CHECK(entropy_estimate(fl) == 0.0);

    const SlopeFit fq = fit_sequence(quad, FitKind::quadratic, 10, 40);
    CHECK(std::abs(fq.slope - 0.04) <= 1e-12);
    CHECK(std::abs(*fq.two_point - 0.04) <= 1e-13);
    CHECK(entropy_estimate(fq) == 0.0);

    const SlopeFit fp = fit_sequence(power, FitKind::loglog, 8, 40);
    CHECK(std::abs(fp.slope - 2.0) <= 1e-10);
    CHECK(std::abs(*fp.two_point - 2.0) <= 1e-12);
    CHECK(entropy_estimate(fp) == 0.0);
}

TEST_CASE("slope fit bookkeeping") {
    std::vector<double> s;
    for (int n = 1; n <= 12; ++n) s.push_back(std::exp(0.3 * n));
    s[5] = 0.0;
    s[7] = -2.0;
    const SlopeFit f = fit_sequence(s, FitKind::exponential, 1, 12);
    CHECK(f.excluded == 2);
    CHECK(f.points_used == 10);
    CHECK(std::abs(f.slope - 0.3) <= 1e-9);

    // A constant series fits with zero slope and zero residual.
    const std::vector<double> flat(10, 4.0);
    const SlopeFit fc = fit_sequence(flat, FitKind::exponential, 1, 10);
    CHECK(fc.slope == 0.0);
    CHECK(fc.residual_rms <= 1e-15);

    CHECK_THROWS_AS(fit_sequence(flat, FitKind::linear, 1, 11), lpdyn::Error);   // beyond data
    CHECK_THROWS_AS(fit_sequence(flat, FitKind::linear, 7, 10), lpdyn::Error);   // < 5 points
    std::vector<double> mostly_bad(10, -1.0);
    CHECK_THROWS_AS(fit_sequence(mostly_bad, FitKind::exponential, 1, 10), lpdyn::Error);
}

TEST_CASE("algebraic entropy from degree sequences") {
    // Tropical degrees for r = 3 follow d_{n+2} = 3 d_{n+1} - d_n once both
    // components are positive, so the fitted rate converges to the closed
    // form at machine precision over a deep window.
    const auto degs3 = dvector_degrees(tropical_dvectors(3, 30));
    const SlopeFit f3 = algebraic_entropy_fit(degs3);
    CHECK(f3.kind == FitKind::exponential);
    CHECK(std::abs(f3.slope - rank2_entropy_exact(3)) <= 1e-6);

    // Somos-4 degrees grow quadratically; the fit should say so explicitly
    // instead of reporting a spurious exponential rate.
    const auto degs_somos = symbolic_degrees(builtin_recurrence("somos4"), 18);
    const SlopeFit fs = algebraic_entropy_fit(degs_somos);
    CHECK(fs.kind == FitKind::quadratic);
    CHECK(entropy_estimate(fs) == 0.0);

    // Lyness degrees are periodic, hence bounded, hence entropy zero.
    const auto degs_lyness = symbolic_degrees(builtin_recurrence("lyness"), 15);
    const SlopeFit fy = algebraic_entropy_fit(degs_lyness);
    CHECK(entropy_estimate(fy) == 0.0);

    // Markoff degrees grow at the golden-ratio rate, but the symbolic
    // window affordable here (n <= 12) still carries a constant-term
    // transient of about 0.024; the tropical recursion reaches a window
    // deep enough to converge.
    const auto degs_markoff = symbolic_degrees(builtin_recurrence("markoff"), 12);
    const SlopeFit fm = algebraic_entropy_fit(degs_markoff);
    CHECK(fm.kind == FitKind::exponential);
    CHECK(std::abs(fm.slope - 0.4812118246) <= 3e-2);
    const auto trop_markoff =
        dvector_degrees(lpdyn::tropical_dvector_sequence(builtin_recurrence("markoff"), 40));
    const SlopeFit fmt = algebraic_entropy_fit(trop_markoff);
    CHECK(fmt.kind == FitKind::exponential);
    CHECK(std::abs(fmt.slope - 0.4812118246) <= 1e-3);
}

TEST_CASE("diophantine entropy fits") {
    const SlopeFit markoff = diophantine_entropy_fit(builtin_recurrence("markoff"),
                                                     {Rat(1), Rat(1), Rat(1)}, 30);
    CHECK(markoff.kind == FitKind::exponential);
    CHECK(std::abs(markoff.slope - 0.4812118246) <= 1e-2);
    REQUIRE(markoff.two_point.has_value());
    CHECK(std::abs(*markoff.two_point - markoff.slope) <= 2e-3);

    // Somos-4 heights grow like n^2, so the exponential-kind rate decays
    // toward zero like 2/n over the fit window.
    const SlopeFit somos = diophantine_entropy_fit(builtin_recurrence("somos4"),
                                                   {Rat(1), Rat(1), Rat(1), Rat(1)}, 40);
    CHECK(somos.slope >= 0.0);
    CHECK(somos.slope <= 0.1);

    // Periodic orbit: bounded heights, slope indistinguishable from zero,
    // with the zero-height entries excluded from the log fit.
    const SlopeFit lyness = diophantine_entropy_fit(builtin_recurrence("lyness"),
                                                    {Rat(1), Rat(1)}, 30);
    CHECK(std::abs(lyness.slope) <= 0.05);
    CHECK(lyness.excluded > 0);

    // A singular orbit reports the step at which the division failed.
    try {
        diophantine_entropy_fit(builtin_recurrence("lyness"), {Rat(1), Rat(-1)}, 30);
        FAIL("expected a zero-division error");
    } catch (const lpdyn::ZeroDivisionError& e) {
        CHECK(e.step == 5);
    }
}

TEST_CASE("height convention") {
    CHECK(rational_height(Rat(0)) == 1);
    CHECK(log_height(Rat(0)) == 0.0);
    CHECK(rational_height(Rat(22, 7)) == 22);
    CHECK(rational_height(Rat(-3, 7)) == 7);
    CHECK(rational_height(Rat(4)) == 4);
    CHECK(rational_height(Rat(1)) == 1);
    // Non-canonical input must be reduced before taking the max.
    Rat raw(2, 4);
    CHECK(rational_height(raw) == 2);

    // Property test against a naive reduce-then-max implementation.
    std::mt19937_64 gen(424242);
    std::uniform_int_distribution<long> num(-1000000, 1000000);
    std::uniform_int_distribution<long> den(1, 1000000);
    for (int rep = 0; rep < 1000; ++rep) {
        const long p = num(gen);
        const long q = den(gen);
        const long g = std::gcd(std::abs(p), q);
        const long rp = (g == 0) ? 0 : std::abs(p) / g;
        const long rq = (g == 0) ? 1 : q / g;
        const long naive = (p == 0) ? 1 : std::max(rp, rq);
        Rat v(p, q);
        v.canonicalize();
        CHECK(rational_height(v) == naive);
    }
}

TEST_CASE("mahler entropy fit on a synthetic sequence") {
    MahlerSequence seq;
    seq.system = "synthetic";
    for (int n = 1; n <= 24; ++n) {
        MahlerEstimate e;
        e.value = 2.0 * std::exp(0.96 * n);
        e.standard_error = 0.0;
        e.samples_used = 1;
        seq.per_n.push_back(e);
    }
    const SlopeFit f = mahler_entropy_fit(seq);
    CHECK(f.window_lo == 13);
    CHECK(f.window_hi == 24);
    CHECK(std::abs(f.slope - 0.96) <= 1e-9);
    CHECK(std::abs(*f.two_point - 0.96) <= 1e-12);

    // Kind is caller-selectable; a linear fit of an exponential series has
    // visible curvature, hence a larger residual.
    const SlopeFit fl = mahler_entropy_fit(seq, 13, 24, FitKind::linear);
    CHECK(fl.kind == FitKind::linear);
    CHECK(fl.residual_rms > f.residual_rms);

    // Nonpositive entries are excluded and counted.
    seq.per_n[15].value = -0.001;
    const SlopeFit fx = mahler_entropy_fit(seq, 13, 24);
    CHECK(fx.excluded == 1);
    CHECK(fx.points_used == 11);
}

TEST_CASE("tropical residual diagnostics") {
    // Period-5 sampled orbit: the residuals repeat exactly (per-sample
    // periodicity survives the averaging, up to rounding).
    const MahlerSequence p5 = orbit_mahler_sequence(builtin_recurrence("rank2(1)"), 17,
                                                    seq_config(2048, 2));
    const auto res1 = tropical_mahler_residuals(p5, 1);
    REQUIRE(res1.size() == 15);
    for (size_t n = 0; n + 5 < res1.size(); ++n) {
        CHECK(std::abs(res1[n + 5] - res1[n]) <= 1e-11);
    }
    CHECK(residuals_bounded(p5, 1));

    // r = 3: no growth trend over a deep window while the sequence itself
    // grows beyond e^40.  Early on, before double rounding of the huge
    // S_n values shows up, the residuals are small in absolute terms.
    const MahlerSequence s3 = orbit_mahler_sequence(builtin_recurrence("rank2(3)"), 47,
                                                    seq_config(2048, 2));
    REQUIRE_FALSE(s3.truncated);
    const auto res3 = tropical_mahler_residuals(s3, 3);
    double early = 0.0;
    for (size_t i = 0; i < 18; ++i) early = std::max(early, std::abs(res3[i]));
    CHECK(early <= 2.0);
    CHECK(residuals_bounded(s3, 3));

    // Feeding the wrong coefficient makes the residuals grow with the
    // sequence and the diagnostic must notice.
    CHECK_FALSE(residuals_bounded(s3, 2));

    // r = 2: linear growth of S_n means bounded second-difference residuals.
    const MahlerSequence s2 = orbit_mahler_sequence(builtin_recurrence("rank2(2)"), 40,
                                                    seq_config(2048, 2));
    const auto res2 = tropical_mahler_residuals(s2, 2);
    double worst2 = 0.0;
    for (const double v : res2) worst2 = std::max(worst2, std::abs(v));
    CHECK(worst2 <= 1.0);
    CHECK(residuals_bounded(s2, 2));
}

TEST_CASE("compare entropies across built-in systems") {
    const EntropyReport r3 = compare_entropies("rank2(3)");
    REQUIRE(r3.algebraic.has_value());
    REQUIRE(r3.diophantine.has_value());
    REQUIRE(r3.mahler.has_value());
    REQUIRE(r3.exact_reference.has_value());
    CHECK(r3.algebraic_from_tropical);
    CHECK(r3.errors.empty());
    CHECK(r3.ordering_ok);
    const double h3 = 0.9624236498;
    CHECK(std::abs(*r3.exact_reference - h3) <= 1e-9);
    CHECK(std::abs(entropy_estimate(*r3.algebraic) - h3) <= 1e-3);
    CHECK(std::abs(entropy_estimate(*r3.diophantine) - h3) <= 1e-3);
    CHECK(std::abs(entropy_estimate(*r3.mahler) - h3) <= 1e-3);

    const EntropyReport mk = compare_entropies("markoff");
    const double hm = 0.4812118246;
    CHECK(mk.algebraic_from_tropical);
    CHECK(std::abs(entropy_estimate(*mk.algebraic) - hm) <= 1e-2);
    CHECK(std::abs(entropy_estimate(*mk.diophantine) - hm) <= 1e-2);
    CHECK(std::abs(entropy_estimate(*mk.mahler) - hm) <= 1e-2);
    CHECK(std::abs(*mk.exact_reference - hm) <= 1e-9);
    CHECK(mk.ordering_ok);

    const EntropyReport so = compare_entropies("somos4");
    CHECK(entropy_estimate(*so.algebraic) == 0.0);
    CHECK(entropy_estimate(*so.diophantine) == 0.0);
    CHECK(entropy_estimate(*so.mahler) == 0.0);
    CHECK(so.mahler->kind == FitKind::quadratic);
    CHECK(so.mahler->slope >= 0.02);
    CHECK(so.mahler->slope <= 0.08);
    CHECK(*so.exact_reference == 0.0);
    CHECK(so.ordering_ok);

    const EntropyReport ly = compare_entropies("lyness");
    CHECK(entropy_estimate(*ly.algebraic) == 0.0);
    CHECK(entropy_estimate(*ly.diophantine) == 0.0);
    CHECK(entropy_estimate(*ly.mahler) == 0.0);
    CHECK(ly.ordering_ok);

    const EntropyReport r2 = compare_entropies("rank2(2)");
    CHECK(entropy_estimate(*r2.mahler) == 0.0);
    CHECK(r2.mahler->kind == FitKind::linear);
    CHECK(std::abs(r2.mahler->slope - 0.4837566998) <= 5e-3);
    CHECK(r2.ordering_ok);

    const EntropyReport hv = compare_entropies("hv");
    CHECK_FALSE(hv.exact_reference.has_value());
    REQUIRE(hv.diophantine.has_value());
    REQUIRE(hv.mahler.has_value());
    CHECK(std::abs(entropy_estimate(*hv.mahler) - entropy_estimate(*hv.diophantine)) <= 2e-2);
    CHECK(hv.ordering_ok);

    // Two-point and regression slopes stay close on the exponential fits.
    for (const EntropyReport* rep : {&r3, &mk}) {
        for (const auto* fit : {&rep->diophantine, &rep->mahler}) {
            if (fit->has_value() && (*fit)->kind == FitKind::exponential && (*fit)->two_point) {
                CHECK(std::abs(*(*fit)->two_point - (*fit)->slope) <= 2e-3);
            }
        }
    }

    CHECK_THROWS_AS(compare_entropies("noSuchSystem"), lpdyn::Error);

    // A recurrence given in the text grammar gets the generic budgets.
    const EntropyReport parsed = compare_entropies("x[n+2]*x[n] = x[n+1]^2 + 1");
    REQUIRE(parsed.mahler.has_value());
    CHECK(entropy_estimate(*parsed.mahler) == 0.0);
    CHECK_FALSE(parsed.exact_reference.has_value());
}

TEST_CASE("entropy report serializes to JSON") {
    const EntropyReport mk = compare_entropies("markoff");
    const std::string js = to_json(mk);
    CHECK(js.front() == '{');
    CHECK(js.back() == '}');
    CHECK(js.find("\"system\": \"markoff\"") != std::string::npos);
    CHECK(js.find("\"exponential\"") != std::string::npos);
    CHECK(js.find("\"exact_reference\": 0.4812118250") != std::string::npos);
    CHECK(js.find("\"ordering_ok\": true") != std::string::npos);

    const EntropyReport hv = compare_entropies("hv");
    CHECK(to_json(hv).find("\"exact_reference\": null") != std::string::npos);
}

TEST_SUITE_END();
