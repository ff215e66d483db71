// lpdyn — command-line front end for the Laurent-dynamics library.
//
// Subcommands
//   orbit        iterate a recurrence exactly (rational numbers), symbolically
//                (Laurent polynomials in the initial variables), or numerically
//                (extended-range complex floats), emitting CSV
//   mahler       Mahler-measure sequence along an orbit, sampled on the torus
//   entropy      side-by-side algebraic / Diophantine / Mahler entropy report
//                (human-readable table followed by a JSON document)
//   closed-form  evaluate a named closed-form constant to 12 significant digits
//   cluster      seed mutations, periodicity checks, exchange-graph statistics
//
// Every CSV output is accompanied by a metadata document holding the full
// configuration needed to reproduce the run byte for byte: it goes to stderr
// when the CSV goes to stdout, and to `<out>.meta.json` when `--out` is given.
//
// Exit codes: 0 success, 2 configuration error, 3 truncated output (partial
// rows were written; the metadata records the reason), 4 internal invariant
// failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lpdyn/cluster.hpp"
#include "lpdyn/csvio.hpp"
#include "lpdyn/entropy.hpp"
#include "lpdyn/errors.hpp"
#include "lpdyn/mahler.hpp"
#include "lpdyn/recurrence.hpp"

namespace {

using nlohmann::json;
using namespace lpdyn;

constexpr const char kVersion[] = "0.1.0";
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitTruncated = 3;
constexpr int kExitInternal = 4;

// Default worker count: LPDYN_THREADS when it holds a sane positive integer,
// otherwise 1.  A malformed value is ignored rather than fatal so that an
// unrelated environment never breaks scripted runs.
int default_threads() {
    const char* env = std::getenv("LPDYN_THREADS");
    if (env == nullptr || *env == '\0') return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 4096) return 1;
    return static_cast<int>(v);
}

// ---------------------------------------------------------------------------
// Small parsing helpers (all failures throw Error -> exit code 2).

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else if (c != ' ' && c != '\t') {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

Rat parse_rational_token(const std::string& text) { return parse_rational_text(text); }

double parse_double_token(const std::string& text) {
    if (text.find('/') != std::string::npos) return parse_rational_token(text).get_d();
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw Error("cannot parse '" + text + "' as a number");
    }
    if (pos != text.size()) throw Error("cannot parse '" + text + "' as a number");
    return v;
}

int parse_int_token(const std::string& text) {
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(text, &pos);
    } catch (const std::exception&) {
        throw Error("cannot parse '" + text + "' as an integer");
    }
    if (pos != text.size()) throw Error("cannot parse '" + text + "' as an integer");
    return v;
}

// "name=value" assignments from repeated --param flags.
std::map<std::string, std::string> parse_assignments(const std::vector<std::string>& kvs) {
    std::map<std::string, std::string> out;
    for (const std::string& kv : kvs) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw Error("--param expects name=value, got '" + kv + "'");
        const std::string name = kv.substr(0, eq);
        if (out.count(name)) throw Error("duplicate --param for '" + name + "'");
        out[name] = kv.substr(eq + 1);
    }
    return out;
}

// Values for every frozen parameter of `def`, in declaration order.  Unknown
// or missing names are configuration errors.
template <typename T, typename Parse>
std::vector<T> collect_params(const RecurrenceDef& def,
                              const std::map<std::string, std::string>& given, Parse parse) {
    for (const auto& [name, value] : given) {
        (void)value;
        bool known = false;
        for (const std::string& p : def.params) known = known || (p == name);
        if (!known) throw Error("system '" + def.name + "' has no parameter named '" + name + "'");
    }
    std::vector<T> values;
    for (const std::string& p : def.params) {
        auto it = given.find(p);
        if (it == given.end())
            throw Error("parameter '" + p + "' needs a value: pass --param " + p + "=VALUE");
        values.push_back(parse(it->second));
    }
    return values;
}

// Resolves --system: text containing '=' goes through the recurrence grammar;
// anything else is a built-in name (with rank2:r accepted for rank2(r)).
RecurrenceDef resolve_system(const std::string& text) {
    if (text.find('=') != std::string::npos) return parse_recurrence(text);
    return builtin_recurrence(canonical_system_name(text));
}

// ---------------------------------------------------------------------------
// Output plumbing.

struct OutputTarget {
    bool to_stdout = true;
    std::string path;
    std::ofstream file;
    std::ostream& stream() { return to_stdout ? std::cout : file; }
};

OutputTarget open_output(const std::string& path) {
    OutputTarget t;
    if (!path.empty()) {
        t.to_stdout = false;
        t.path = path;
        t.file.open(path, std::ios::binary);
        if (!t.file) throw Error("cannot open output file '" + path + "'");
    }
    return t;
}

// Metadata sidecar: stderr for stdout CSV, `<out>.meta.json` for file CSV.
void emit_metadata(OutputTarget& target, const json& meta) {
    const std::string text = meta.dump(2) + "\n";
    if (target.to_stdout) {
        std::cerr << text;
        return;
    }
    const std::string side = target.path + ".meta.json";
    std::ofstream m(side, std::ios::binary);
    if (!m) throw Error("cannot open metadata file '" + side + "'");
    m << text;
}

json base_meta(const std::string& command) {
    return json{{"schema_version", "1"},
                {"generator", std::string("lpdyn ") + kVersion},
                {"command", command}};
}

// ---------------------------------------------------------------------------
// orbit

struct OrbitOptions {
    std::string system;
    std::string mode = "rational";
    std::string init_csv;
    std::vector<std::string> param_kvs;
    int n = 10;
    std::string out_path;
    std::size_t budget = 5'000'000;
};

int run_orbit(const OrbitOptions& opt) {
    const RecurrenceDef def = resolve_system(opt.system);
    const auto assignments = parse_assignments(opt.param_kvs);

    OutputTarget target = open_output(opt.out_path);
    std::ostream& os = target.stream();

    json meta = base_meta("orbit");
    meta["system"] = opt.system;
    meta["recurrence"] = def.to_string();
    meta["mode"] = opt.mode;
    meta["n"] = opt.n;
    bool truncated = false;
    std::string reason;
    std::size_t rows = 0;

    if (opt.mode == "rational") {
        std::vector<Rat> init(static_cast<std::size_t>(def.order), Rat(1));
        if (!opt.init_csv.empty()) {
            init.clear();
            for (const std::string& tok : split_list(opt.init_csv)) init.push_back(parse_rational_token(tok));
            if (static_cast<int>(init.size()) != def.order)
                throw Error("--init needs exactly " + std::to_string(def.order) + " values for '" + def.name + "'");
        }
        const std::vector<Rat> params = collect_params<Rat>(def, assignments, parse_rational_token);

        std::vector<Rat> orbit;
        try {
            orbit = iterate_rational(def, init, opt.n, params);
        } catch (const ZeroDivisionError& e) {
            truncated = true;
            reason = std::string(e.what()) + " at step " + std::to_string(e.step);
            // The failing step is strictly beyond the valid prefix, so the
            // rerun below never reaches the vanishing divisor.
            orbit = iterate_rational(def, init, static_cast<int>(e.step) - 1, params);
        }
        json jinit = json::array();
        for (const Rat& q : init) jinit.push_back(q.get_str());
        meta["init"] = jinit;
        json jparams = json::object();
        for (std::size_t i = 0; i < def.params.size(); ++i) jparams[def.params[i]] = params[i].get_str();
        meta["params"] = jparams;

        os << csv_row({"n", "value"}) << "\n";
        for (std::size_t k = 0; k < orbit.size(); ++k, ++rows)
            os << csv_row({std::to_string(k + 1), orbit[k].get_str()}) << "\n";
    } else if (opt.mode == "symbolic") {
        if (!opt.init_csv.empty())
            throw Error("symbolic mode iterates from the initial variables; --init is not accepted");
        if (!assignments.empty())
            throw Error("symbolic mode keeps parameters as extra variables; --param is not accepted");
        meta["term_budget"] = opt.budget;

        SymbolicOrbit orbit;
        try {
            orbit = iterate_symbolic(def, opt.n, opt.budget);
        } catch (const NotLaurentError& e) {
            // A user-supplied recurrence may genuinely leave the Laurent
            // ring; that finding is reported as a truncation, not a crash.
            truncated = true;
            reason = e.what();
        }
        if (orbit.truncated) {
            truncated = true;
            reason = "term budget of " + std::to_string(opt.budget) + " exceeded";
        }
        const std::vector<std::string> names = def.window_names();
        os << csv_row({"n", "terms", "value"}) << "\n";
        for (std::size_t k = 0; k < orbit.iterates.size(); ++k, ++rows)
            os << csv_row({std::to_string(k + 1), std::to_string(orbit.iterates[k].size()),
                           orbit.iterates[k].to_string(names)})
               << "\n";
    } else { // numeric
        std::vector<ExtComplex> init(static_cast<std::size_t>(def.order), ExtComplex(1.0));
        if (!opt.init_csv.empty()) {
            init.clear();
            for (const std::string& tok : split_list(opt.init_csv))
                init.push_back(ExtComplex(parse_double_token(tok)));
            if (static_cast<int>(init.size()) != def.order)
                throw Error("--init needs exactly " + std::to_string(def.order) + " values for '" + def.name + "'");
        }
        std::vector<ExtComplex> params;
        {
            const std::vector<double> raw = collect_params<double>(def, assignments, parse_double_token);
            for (double v : raw) params.push_back(ExtComplex(v));
        }
        json jinit = json::array();
        for (const ExtComplex& z : init) jinit.push_back(format_double(z.to_complex().real()));
        meta["init"] = jinit;
        json jparams = json::object();
        for (std::size_t i = 0; i < def.params.size(); ++i)
            jparams[def.params[i]] = format_double(params[i].to_complex().real());
        meta["params"] = jparams;

        const NumericOrbit orbit = iterate_numeric(def, init, opt.n, params);
        truncated = orbit.truncated;
        reason = orbit.reason;
        os << csv_row({"n", "log_abs"}) << "\n";
        for (std::size_t k = 0; k < orbit.values.size(); ++k, ++rows)
            os << csv_row({std::to_string(k + 1), format_double(orbit.values[k].log_abs())}) << "\n";
    }

    meta["rows"] = rows;
    meta["truncated"] = truncated;
    if (truncated) meta["reason"] = reason;
    emit_metadata(target, meta);
    return truncated ? kExitTruncated : kExitOk;
}

// ---------------------------------------------------------------------------
// mahler

struct MahlerOptions {
    std::string system;
    std::string method = "direct";
    long samples = 10000;
    std::uint64_t seed = 1;
    int n = 50;
    int threads = 1;
    std::vector<std::string> param_kvs;
    std::string out_path;
};

int run_mahler(const MahlerOptions& opt) {
    const RecurrenceDef def = resolve_system(opt.system);

    // `--param name=torus` acknowledges the extra torus coordinate a frozen
    // parameter contributes; any other value (or an unknown name) is an error.
    const auto assignments = parse_assignments(opt.param_kvs);
    for (const auto& [name, value] : assignments) {
        bool known = false;
        for (const std::string& p : def.params) known = known || (p == name);
        if (!known) throw Error("system '" + def.name + "' has no parameter named '" + name + "'");
        if (value != "torus")
            throw Error("parameter '" + name + "' is integrated over its own torus coordinate; "
                        "the only accepted assignment is --param " + name + "=torus");
    }

    SamplerConfig cfg;
    cfg.mode = SamplerConfig::Mode::monte_carlo;
    cfg.sample_count = opt.samples;
    cfg.rng_seed = opt.seed;

    MahlerSequence seq;
    if (opt.method == "direct") {
        cfg.torus_dim = def.window_vars();
        cfg.validate();
        seq = orbit_mahler_sequence(def, opt.n, cfg, opt.threads);
    } else { // reduced
        if (!assignments.empty()) throw Error("the reduced maps have no frozen parameters");
        cfg.torus_dim = 2;
        cfg.validate();
        if (def.name == "markoff") {
            seq = markoff_recursion_sequence(opt.n, cfg, opt.threads);
        } else if (def.name == "somos4") {
            seq = somos4_recursion_sequence(opt.n, cfg, opt.threads);
        } else {
            throw Error("--method reduced supports the systems markoff and somos4");
        }
    }

    OutputTarget target = open_output(opt.out_path);
    std::ostream& os = target.stream();
    os << csv_row({"n", "value", "stderr", "skipped", "samples_used"}) << "\n";
    for (std::size_t i = 0; i < seq.per_n.size(); ++i) {
        const MahlerEstimate& e = seq.per_n[i];
        os << csv_row({std::to_string(i + 1), format_double(e.value), format_double(e.standard_error),
                       std::to_string(e.skipped), std::to_string(e.samples_used)})
           << "\n";
    }

    json meta = base_meta("mahler");
    meta["system"] = opt.system;
    meta["recurrence"] = def.to_string();
    meta["method"] = opt.method;
    meta["n"] = opt.n;
    meta["samples"] = opt.samples;
    meta["rng_seed"] = opt.seed;
    meta["torus_dim"] = cfg.torus_dim;
    meta["threads"] = opt.threads;
    meta["rows"] = seq.per_n.size();
    meta["truncated"] = seq.truncated;
    if (seq.truncated) meta["reason"] = seq.reason;
    emit_metadata(target, meta);
    return seq.truncated ? kExitTruncated : kExitOk;
}

// ---------------------------------------------------------------------------
// entropy

struct EntropyOptions {
    std::string system;
    long samples = 4096;
    std::uint64_t seed = 20240801;
    int algebraic_n = 0;
    int diophantine_n = 0;
    int mahler_n = 0;
    int threads = 1;
    std::string json_path;
};

void print_fit_line(std::ostream& os, const std::string& label, const char* key,
                    const std::optional<SlopeFit>& fit,
                    const std::map<std::string, std::string>& errors) {
    os << "  " << label << ": ";
    if (!fit) {
        auto it = errors.find(key);
        os << "unavailable" << (it != errors.end() ? " (" + it->second + ")" : std::string()) << "\n";
        return;
    }
    os << "kind=" << to_string(fit->kind) << " entropy=" << format_double(entropy_estimate(*fit))
       << " slope=" << format_double(fit->slope) << " window=[" << fit->window_lo << ","
       << fit->window_hi << "]" << " rms=" << format_double(fit->residual_rms)
       << " points=" << fit->points_used;
    if (fit->two_point) os << " two_point=" << format_double(*fit->two_point);
    os << "\n";
}

int run_entropy(const EntropyOptions& opt) {
    EntropyBudgets budgets;
    budgets.algebraic_n = opt.algebraic_n;
    budgets.diophantine_n = opt.diophantine_n;
    budgets.mahler_n = opt.mahler_n;
    budgets.mc_samples = static_cast<std::size_t>(opt.samples);
    budgets.rng_seed = opt.seed;
    budgets.threads = opt.threads;

    const std::string system = opt.system.find('=') != std::string::npos
                                   ? opt.system
                                   : canonical_system_name(opt.system);
    const EntropyReport rep = compare_entropies(system, budgets);

    std::ostream& os = std::cout;
    os << "system: " << rep.system << "\n";
    os << "  exact reference: "
       << (rep.exact_reference ? format_double(*rep.exact_reference) : std::string("none")) << "\n";
    print_fit_line(os,
                   rep.algebraic_from_tropical ? "algebraic (tropical degrees)"
                                               : "algebraic (symbolic degrees)",
                   "algebraic", rep.algebraic, rep.errors);
    print_fit_line(os, "diophantine (heights from the all-ones seed)", "diophantine",
                   rep.diophantine, rep.errors);
    print_fit_line(os, "mahler (measure sequence)", "mahler", rep.mahler, rep.errors);
    os << "  ordering (mahler <= diophantine + 5e-3): " << (rep.ordering_ok ? "ok" : "violated")
       << "\n";

    const std::string js = to_json(rep);
    os << js << "\n";
    if (!opt.json_path.empty()) {
        std::ofstream f(opt.json_path, std::ios::binary);
        if (!f) throw Error("cannot open JSON output file '" + opt.json_path + "'");
        f << js << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// closed-form

int run_closed_form(const std::string& name) {
    const double v = closed_form_value(name);
    std::cout << format_significant(v, 12) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// cluster

struct ClusterOptions {
    std::string seed_path;
    std::string matrix_name;
    std::string sequence;
    bool check_period = false;
    int explore_depth = 0;
};

int run_cluster(const ClusterOptions& opt) {
    if (opt.seed_path.empty() == opt.matrix_name.empty())
        throw Error("provide exactly one of --seed FILE or --matrix NAME");
    const Seed start = opt.seed_path.empty()
                           ? Seed::initial(builtin_matrix(canonical_system_name(opt.matrix_name)))
                           : read_seed_json(opt.seed_path);

    std::vector<int> directions;
    if (!opt.sequence.empty()) {
        for (const std::string& tok : split_list(opt.sequence)) {
            const int v = parse_int_token(tok);
            if (v < 1 || v > start.matrix.rank())
                throw Error("mutation direction " + std::to_string(v) + " is outside 1.." +
                            std::to_string(start.matrix.rank()));
            directions.push_back(v - 1);
        }
    }

    // Laurentness of every mutation is a library guarantee for valid exchange
    // matrices; a NotLaurentError here escapes to the internal-error handler.
    const Seed finish = apply_sequence(start, directions);

    if (opt.check_period) {
        const bool periodic = seeds_equal_up_to_relabeling(start, finish);
        std::cout << "mutation sequence of length " << directions.size() << ": "
                  << (periodic ? "periodic — the final seed equals the initial seed up to relabeling"
                               : "not periodic — the final seed differs from the initial seed")
                  << "\n";
    } else {
        std::cout << seed_to_json(finish) << "\n";
    }

    if (opt.explore_depth > 0) {
        const MutationTreeResult res = explore_mutation_tree(start.matrix, opt.explore_depth);
        std::cout << "exchange graph to depth " << opt.explore_depth
                  << (res.truncated ? " (truncated)" : "") << "\n";
        std::cout << "  distinct seeds: " << res.distinct_seeds << "\n";
        std::cout << "  distinct clusters: " << res.distinct_clusters << "\n";
        for (std::size_t d = 0; d < res.per_depth_max_degree.size(); ++d)
            std::cout << "  max degree at depth " << (d + 1) << ": " << res.per_depth_max_degree[d]
                      << "\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Laurent dynamics toolkit: exact orbits, Mahler-measure sequences, entropy reports"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("lpdyn ") + kVersion);

    const int env_threads = default_threads();

    OrbitOptions orbit_opt;
    CLI::App* orbit = app.add_subcommand("orbit", "Iterate a recurrence and write the orbit as CSV");
    orbit->add_option("--system", orbit_opt.system,
                      "built-in name (lyness, rank2:r, markoff, somos4, hv) or recurrence text "
                      "\"x[n+N]*x[n] = ...\"")
        ->required();
    orbit->add_option("--mode", orbit_opt.mode, "rational | symbolic | numeric")
        ->check(CLI::IsMember({"rational", "symbolic", "numeric"}));
    orbit->add_option("--init", orbit_opt.init_csv,
                      "comma-separated initial values x_1..x_N (default: all ones)");
    orbit->add_option("--param", orbit_opt.param_kvs,
                      "frozen parameter assignment name=value (repeatable)");
    orbit->add_option("--n", orbit_opt.n, "emit iterates x_1..x_n")
        ->required()
        ->check(CLI::PositiveNumber);
    orbit->add_option("--out", orbit_opt.out_path,
                      "CSV file (default stdout; metadata then goes to <out>.meta.json)");
    orbit->add_option("--budget", orbit_opt.budget, "symbolic term budget per polynomial");

    MahlerOptions mahler_opt;
    mahler_opt.threads = env_threads;
    CLI::App* mahler = app.add_subcommand("mahler", "Mahler-measure sequence along an orbit (CSV)");
    mahler->add_option("--system", mahler_opt.system, "built-in name or recurrence text")->required();
    mahler->add_option("--method", mahler_opt.method,
                       "direct (torus-sampled orbit) | reduced (two-dimensional y-map; markoff "
                       "and somos4 only)")
        ->check(CLI::IsMember({"direct", "reduced"}));
    mahler->add_option("--samples", mahler_opt.samples, "Monte-Carlo samples per n")
        ->check(CLI::PositiveNumber);
    mahler->add_option("--seed", mahler_opt.seed, "RNG seed (sequences are deterministic given it)");
    mahler->add_option("--n", mahler_opt.n, "estimate m(x_1)..m(x_n)")->check(CLI::PositiveNumber);
    mahler->add_option("--threads", mahler_opt.threads,
                       "worker cap (default: LPDYN_THREADS or 1; never changes the output bytes)")
        ->check(CLI::PositiveNumber);
    mahler->add_option("--param", mahler_opt.param_kvs,
                       "name=torus acknowledges the extra torus coordinate of a frozen parameter");
    mahler->add_option("--out", mahler_opt.out_path, "CSV file (default stdout)");

    EntropyOptions entropy_opt;
    entropy_opt.threads = env_threads;
    CLI::App* entropy = app.add_subcommand(
        "entropy", "Algebraic / Diophantine / Mahler entropy report (table + JSON)");
    entropy->add_option("--system", entropy_opt.system, "built-in name or recurrence text")->required();
    entropy->add_option("--samples", entropy_opt.samples, "Monte-Carlo samples per Mahler point")
        ->check(CLI::PositiveNumber);
    entropy->add_option("--seed", entropy_opt.seed, "RNG seed for the Mahler estimator");
    entropy->add_option("--algebraic-n", entropy_opt.algebraic_n,
                        "degree-sequence length (0 = per-system default)")
        ->check(CLI::NonNegativeNumber);
    entropy->add_option("--diophantine-n", entropy_opt.diophantine_n,
                        "height-sequence length (0 = per-system default)")
        ->check(CLI::NonNegativeNumber);
    entropy->add_option("--mahler-n", entropy_opt.mahler_n,
                        "Mahler-sequence length (0 = per-system default)")
        ->check(CLI::NonNegativeNumber);
    entropy->add_option("--threads", entropy_opt.threads, "worker cap for the Mahler estimator")
        ->check(CLI::PositiveNumber);
    entropy->add_option("--json", entropy_opt.json_path, "also write the JSON report to this file");

    std::string closed_form_name;
    CLI::App* closed_form =
        app.add_subcommand("closed-form", "Print a named constant to 12 significant digits");
    closed_form
        ->add_option("name", closed_form_name,
                     "one of: smyth, mx4:r, mx5:r, cstar:M, rank2-entropy:r, markoff-x5, somos-x6")
        ->required();

    ClusterOptions cluster_opt;
    CLI::App* cluster =
        app.add_subcommand("cluster", "Mutate cluster seeds and query the exchange graph");
    cluster->add_option("--seed", cluster_opt.seed_path,
                        "seed JSON file: {\"n\": N, \"matrix\": [row-major], \"cluster\": [terms]?}");
    cluster->add_option("--matrix", cluster_opt.matrix_name,
                        "built-in exchange matrix: a2, rank2:r, markoff, somos4");
    cluster->add_option("--sequence", cluster_opt.sequence,
                        "comma-separated 1-based mutation directions, applied left to right");
    cluster->add_flag("--check-period", cluster_opt.check_period,
                      "report whether the sequence returns to the initial seed (up to relabeling)");
    cluster->add_option("--explore-depth", cluster_opt.explore_depth,
                        "print exchange-graph statistics to this depth")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*orbit) return run_orbit(orbit_opt);
        if (*mahler) return run_mahler(mahler_opt);
        if (*entropy) return run_entropy(entropy_opt);
        if (*closed_form) return run_closed_form(closed_form_name);
        if (*cluster) return run_cluster(cluster_opt);
        std::cerr << "error: no subcommand selected\n";
        return kExitConfig;
    } catch (const NotLaurentError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
