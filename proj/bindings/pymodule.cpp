// Python bindings for the Laurent-dynamics library.
//
// The surface mirrors the command-line tool: exact and symbolic orbits,
// Mahler-measure sequences, entropy reports (as JSON text), closed-form
// constants, and cluster-seed operations.  Values cross the boundary as
// native python types; exact rationals travel as strings ("p/q") so no
// precision is lost, and arbitrarily large integers become python ints.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "lpdyn/cluster.hpp"
#include "lpdyn/csvio.hpp"
#include "lpdyn/entropy.hpp"
#include "lpdyn/errors.hpp"
#include "lpdyn/mahler.hpp"
#include "lpdyn/recurrence.hpp"

namespace py = pybind11;
using namespace lpdyn;

namespace {

constexpr const char kVersion[] = "0.1.0";

RecurrenceDef resolve_system(const std::string& text) {
    if (text.find('=') != std::string::npos) return parse_recurrence(text);
    return builtin_recurrence(canonical_system_name(text));
}

// Exact big integer -> python int, via the decimal representation.
py::object py_int(const Int& v) {
    PyObject* obj = PyLong_FromString(v.get_str().c_str(), nullptr, 10);
    if (obj == nullptr) throw py::error_already_set();
    return py::reinterpret_steal<py::object>(obj);
}

std::vector<Rat> parse_rational_list(const std::vector<std::string>& texts) {
    std::vector<Rat> out;
    out.reserve(texts.size());
    for (const std::string& t : texts) out.push_back(parse_rational_text(t));
    return out;
}

std::vector<Rat> ordered_params(const RecurrenceDef& def,
                                const std::map<std::string, std::string>& given) {
    for (const auto& [name, value] : given) {
        (void)value;
        bool known = false;
        for (const std::string& p : def.params) known = known || (p == name);
        if (!known) throw Error("system '" + def.name + "' has no parameter named '" + name + "'");
    }
    std::vector<Rat> values;
    for (const std::string& p : def.params) {
        auto it = given.find(p);
        if (it == given.end()) throw Error("parameter '" + p + "' needs a value");
        values.push_back(parse_rational_text(it->second));
    }
    return values;
}

} // namespace

PYBIND11_MODULE(_lpdyn, m) {
    m.doc() = "Laurent dynamics: exact orbits, Mahler measures, entropy estimates";
    m.attr("__version__") = kVersion;

    py::register_exception<Error>(m, "Error");

    m.def("version", [] { return std::string(kVersion); }, "Library version string.");

    m.def(
        "system_text",
        [](const std::string& system) { return resolve_system(system).to_string(); },
        py::arg("system"),
        "Recurrence text for a built-in name (lyness, rank2(r) or rank2:r, markoff, somos4, hv) "
        "or for text in the recurrence grammar.");

    m.def(
        "iterate_rational",
        [](const std::string& system, int n, const std::vector<std::string>& init,
           const std::map<std::string, std::string>& params) {
            const RecurrenceDef def = resolve_system(system);
            std::vector<Rat> seeds;
            if (init.empty()) {
                seeds.assign(static_cast<std::size_t>(def.order), Rat(1));
            } else {
                seeds = parse_rational_list(init);
                if (static_cast<int>(seeds.size()) != def.order)
                    throw Error("init needs exactly " + std::to_string(def.order) + " values");
            }
            const std::vector<Rat> values = ordered_params(def, params);
            const std::vector<Rat> orbit = iterate_rational(def, seeds, n, values);
            std::vector<std::string> out;
            out.reserve(orbit.size());
            for (const Rat& q : orbit) out.push_back(q.get_str());
            return out;
        },
        py::arg("system"), py::arg("n"), py::arg("init") = std::vector<std::string>{},
        py::arg("params") = std::map<std::string, std::string>{},
        "Exact orbit x_1..x_n as rational strings ('p' or 'p/q'); init defaults to all ones.");

    m.def(
        "iterate_symbolic",
        [](const std::string& system, int n, std::size_t budget) {
            const RecurrenceDef def = resolve_system(system);
            const SymbolicOrbit orbit = iterate_symbolic(def, n, budget);
            const std::vector<std::string> names = def.window_names();
            std::vector<std::pair<std::size_t, std::string>> rows;
            rows.reserve(orbit.iterates.size());
            for (const LaurentPoly& p : orbit.iterates)
                rows.emplace_back(p.size(), p.to_string(names));
            return py::make_tuple(rows, orbit.truncated);
        },
        py::arg("system"), py::arg("n"), py::arg("budget") = std::size_t{5'000'000},
        "Symbolic orbit as ((terms, canonical text) per iterate, truncated flag).  The flag is "
        "true when the term budget stopped the iteration early.");

    m.def(
        "tropical_dvectors",
        [](const std::string& system, int n) {
            const RecurrenceDef def = resolve_system(system);
            const std::vector<std::vector<Int>> seq = tropical_dvector_sequence(def, n);
            py::list out;
            for (const auto& vec : seq) {
                py::list row;
                for (const Int& c : vec) row.append(py_int(c));
                out.append(row);
            }
            return out;
        },
        py::arg("system"), py::arg("n"),
        "Tropicalized d-vector sequence d_1..d_n (components as python ints).");

    m.def(
        "mahler_sequence",
        [](const std::string& system, int n, long samples, std::uint64_t seed, int threads,
           const std::string& method) {
            SamplerConfig cfg;
            cfg.sample_count = samples;
            cfg.rng_seed = seed;
            MahlerSequence seq;
            if (method == "direct") {
                const RecurrenceDef def = resolve_system(system);
                cfg.torus_dim = def.window_vars();
                cfg.validate();
                seq = orbit_mahler_sequence(def, n, cfg, threads);
            } else if (method == "reduced") {
                cfg.torus_dim = 2;
                cfg.validate();
                const std::string name = canonical_system_name(system);
                if (name == "markoff") {
                    seq = markoff_recursion_sequence(n, cfg, threads);
                } else if (name == "somos4") {
                    seq = somos4_recursion_sequence(n, cfg, threads);
                } else {
                    throw Error("method 'reduced' supports the systems markoff and somos4");
                }
            } else {
                throw Error("method must be 'direct' or 'reduced'");
            }
            std::vector<py::tuple> rows;
            rows.reserve(seq.per_n.size());
            for (const MahlerEstimate& e : seq.per_n)
                rows.push_back(py::make_tuple(e.value, e.standard_error, e.skipped, e.samples_used));
            return py::make_tuple(rows, seq.truncated);
        },
        py::arg("system"), py::arg("n"), py::arg("samples") = 10000L, py::arg("seed") = 1,
        py::arg("threads") = 1, py::arg("method") = std::string("direct"),
        "Mahler-measure sequence m(x_1)..m(x_n): ((value, stderr, skipped, samples_used) per n, "
        "truncated flag).  Deterministic for a given seed, independent of threads.");

    m.def("closed_form", &closed_form_value, py::arg("name"),
          "Closed-form constant by name: smyth, mx4:r, mx5:r, cstar:M, rank2-entropy:r, "
          "markoff-x5, somos-x6.");
    m.def("closed_form_names", &closed_form_names, "The recognized closed-form names.");

    m.def(
        "entropy_report_json",
        [](const std::string& system, long samples, std::uint64_t seed, int algebraic_n,
           int diophantine_n, int mahler_n, int threads) {
            EntropyBudgets budgets;
            budgets.mc_samples = static_cast<std::size_t>(samples);
            budgets.rng_seed = seed;
            budgets.algebraic_n = algebraic_n;
            budgets.diophantine_n = diophantine_n;
            budgets.mahler_n = mahler_n;
            budgets.threads = threads;
            const std::string name =
                system.find('=') != std::string::npos ? system : canonical_system_name(system);
            return to_json(compare_entropies(name, budgets));
        },
        py::arg("system"), py::arg("samples") = 4096L, py::arg("seed") = 20240801,
        py::arg("algebraic_n") = 0, py::arg("diophantine_n") = 0, py::arg("mahler_n") = 0,
        py::arg("threads") = 1,
        "Side-by-side algebraic / Diophantine / Mahler entropy report as a JSON string "
        "(0 for a length budget picks the per-system default).");

    m.def(
        "initial_seed_json",
        [](const std::string& matrix) {
            return seed_to_json(Seed::initial(builtin_matrix(canonical_system_name(matrix))));
        },
        py::arg("matrix"),
        "Initial seed for a built-in exchange matrix (a2, rank2(r) or rank2:r, markoff, somos4) "
        "as JSON.");

    m.def(
        "apply_mutations",
        [](const std::string& seed_json, const std::vector<int>& directions) {
            return seed_to_json(apply_sequence(parse_seed_json(seed_json), directions));
        },
        py::arg("seed_json"), py::arg("directions"),
        "Applies 0-based mutation directions left to right; returns the final seed as JSON.");

    m.def(
        "is_periodic",
        [](const std::string& seed_json, const std::vector<int>& directions) {
            const Seed start = parse_seed_json(seed_json);
            return seeds_equal_up_to_relabeling(start, apply_sequence(start, directions));
        },
        py::arg("seed_json"), py::arg("directions"),
        "True when the 0-based mutation sequence returns to the initial seed up to relabeling.");

    m.def(
        "explore",
        [](const std::string& seed_json, int depth, std::size_t max_seeds) {
            const Seed start = parse_seed_json(seed_json);
            const MutationTreeResult res = explore_mutation_tree(start.matrix, depth, max_seeds);
            return py::make_tuple(res.distinct_seeds, res.distinct_clusters,
                                  res.per_depth_max_degree, res.truncated);
        },
        py::arg("seed_json"), py::arg("depth"), py::arg("max_seeds") = std::size_t{100000},
        "Breadth-first exchange-graph statistics from a seed's matrix: (distinct seeds, distinct "
        "clusters, max degree per depth, truncated flag).");
}
