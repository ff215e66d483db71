#include "lpdyn/cluster.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lpdyn/errors.hpp"

namespace lpdyn {

namespace {

long long llabs_checked(long long v) { return v < 0 ? -v : v; }

} // namespace

ExchangeMatrix::ExchangeMatrix(int n, std::vector<long long> row_major)
    : n_(n), b_(std::move(row_major)) {
    if (n_ < 1) throw DimensionMismatchError("exchange matrix rank must be positive");
    if (b_.size() != static_cast<size_t>(n_) * static_cast<size_t>(n_))
        throw DimensionMismatchError("exchange matrix needs n*n entries");
    for (long long v : b_)
        if (llabs_checked(v) > 1000000)
            throw NotLaurentError("exchange matrix entry out of range");
    for (int i = 0; i < n_; ++i) {
        if ((*this)(i, i) != 0)
            throw NotLaurentError("exchange matrix must have zero diagonal");
        for (int j = 0; j < n_; ++j) {
            long long bij = (*this)(i, j), bji = (*this)(j, i);
            if ((bij == 0) != (bji == 0) || bij * bji > 0)
                throw NotLaurentError("exchange matrix entries b_ij, b_ji must strictly oppose");
        }
    }
    // Positive rational symmetrizer by ratio propagation, then per-component
    // integer scaling: d_i b_ij = -d_j b_ji.
    std::vector<Rat> ratio(static_cast<size_t>(n_), Rat(0));
    std::vector<int> comp(static_cast<size_t>(n_), -1);
    int ncomp = 0;
    for (int s = 0; s < n_; ++s) {
        if (comp[static_cast<size_t>(s)] != -1) continue;
        comp[static_cast<size_t>(s)] = ncomp;
        ratio[static_cast<size_t>(s)] = 1;
        std::deque<int> queue{s};
        while (!queue.empty()) {
            int i = queue.front();
            queue.pop_front();
            for (int j = 0; j < n_; ++j) {
                long long bij = (*this)(i, j);
                if (bij == 0) continue;
                long long bji = (*this)(j, i);
                Rat want = ratio[static_cast<size_t>(i)] * Rat(static_cast<long>(llabs_checked(bij))) /
                           Rat(static_cast<long>(llabs_checked(bji)));
                if (comp[static_cast<size_t>(j)] == -1) {
                    comp[static_cast<size_t>(j)] = ncomp;
                    ratio[static_cast<size_t>(j)] = want;
                    queue.push_back(j);
                } else if (ratio[static_cast<size_t>(j)] != want) {
                    throw NotLaurentError("exchange matrix is not skew-symmetrizable");
                }
            }
        }
        ++ncomp;
    }
    d_.assign(static_cast<size_t>(n_), 1);
    for (int c = 0; c < ncomp; ++c) {
        Int lcm_den = 1;
        for (int i = 0; i < n_; ++i)
            if (comp[static_cast<size_t>(i)] == c)
                mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(),
                        ratio[static_cast<size_t>(i)].get_den().get_mpz_t());
        Int gcd_num = 0;
        for (int i = 0; i < n_; ++i)
            if (comp[static_cast<size_t>(i)] == c) {
                Int scaled = ratio[static_cast<size_t>(i)].get_num() *
                             (lcm_den / ratio[static_cast<size_t>(i)].get_den());
                mpz_gcd(gcd_num.get_mpz_t(), gcd_num.get_mpz_t(), scaled.get_mpz_t());
            }
        for (int i = 0; i < n_; ++i) {
            if (comp[static_cast<size_t>(i)] != c) continue;
            Int scaled = ratio[static_cast<size_t>(i)].get_num() *
                         (lcm_den / ratio[static_cast<size_t>(i)].get_den()) / gcd_num;
            if (scaled > static_cast<long>(kMaxSymmetrizerEntry))
                throw NotLaurentError("skew-symmetrizer entry exceeds bound");
            d_[static_cast<size_t>(i)] = scaled.get_si();
        }
    }
}

bool ExchangeMatrix::is_skew_symmetric() const {
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if ((*this)(i, j) != -(*this)(j, i)) return false;
    return true;
}

ExchangeMatrix mutate_matrix(const ExchangeMatrix& B, int k) {
    const int n = B.rank();
    if (k < 0 || k >= n) throw DimensionMismatchError("mutation direction out of range");
    std::vector<long long> out(static_cast<size_t>(n) * static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            long long v;
            if (i == k || j == k) {
                v = -B(i, j);
            } else {
                long long prod = B(i, k) * B(k, j);
                long long pos = prod > 0 ? prod : 0;
                long long sg = B(i, k) > 0 ? 1 : (B(i, k) < 0 ? -1 : 0);
                v = B(i, j) + sg * pos;
            }
            out[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)] = v;
        }
    }
    return ExchangeMatrix(n, std::move(out));
}

Seed Seed::initial(const ExchangeMatrix& B) {
    Seed s;
    s.matrix = B;
    s.cluster.reserve(static_cast<size_t>(B.rank()));
    for (int j = 0; j < B.rank(); ++j) s.cluster.push_back(LaurentPoly::variable(B.rank(), j));
    return s;
}

LaurentPoly exchange_numerator(const Seed& seed, int k) {
    const int n = seed.matrix.rank();
    if (k < 0 || k >= n) throw DimensionMismatchError("mutation direction out of range");
    if (static_cast<int>(seed.cluster.size()) != n)
        throw DimensionMismatchError("seed cluster size does not match the matrix rank");
    const int nv = seed.cluster.empty() ? n : seed.cluster[0].num_vars();
    LaurentPoly plus = LaurentPoly::constant(nv, 1);
    LaurentPoly minus = LaurentPoly::constant(nv, 1);
    for (int j = 0; j < n; ++j) {
        long long b = seed.matrix(k, j);
        if (b > 0)
            plus = plus * seed.cluster[static_cast<size_t>(j)].pow(static_cast<unsigned long>(b));
        else if (b < 0)
            minus = minus * seed.cluster[static_cast<size_t>(j)].pow(static_cast<unsigned long>(-b));
    }
    return plus + minus;
}

Seed mutate_seed(const Seed& seed, int k) {
    Seed out;
    out.matrix = mutate_matrix(seed.matrix, k);
    out.cluster = seed.cluster;
    LaurentPoly num = exchange_numerator(seed, k);
    auto q = try_div_exact(num, seed.cluster[static_cast<size_t>(k)]);
    if (!q)
        throw NotLaurentError("exchange relation failed to divide exactly in direction " +
                              std::to_string(k + 1) + "; offending numerator: " + num.to_string());
    out.cluster[static_cast<size_t>(k)] = std::move(*q);
    return out;
}

Seed apply_sequence(Seed seed, const std::vector<int>& directions) {
    for (int k : directions) seed = mutate_seed(seed, k);
    return seed;
}

// ---------------------------------------------------------------------------
// JSON seed I/O
// ---------------------------------------------------------------------------

Seed parse_seed_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SyntaxError(std::string("invalid seed JSON: ") + e.what(), 0);
    }
    if (!j.is_object() || !j.contains("n") || !j.contains("matrix"))
        throw SyntaxError("seed JSON needs fields 'n' and 'matrix'", 0);
    if (!j["n"].is_number_integer()) throw SyntaxError("seed field 'n' must be an integer", 0);
    int n = j["n"].get<int>();
    if (n < 1 || n > 64) throw SyntaxError("seed rank out of range", 0);
    if (!j["matrix"].is_array() || j["matrix"].size() != static_cast<size_t>(n) * static_cast<size_t>(n))
        throw SyntaxError("seed field 'matrix' must hold n*n integers (row-major)", 0);
    std::vector<long long> entries;
    entries.reserve(j["matrix"].size());
    for (const auto& v : j["matrix"]) {
        if (!v.is_number_integer()) throw SyntaxError("matrix entries must be integers", 0);
        entries.push_back(v.get<long long>());
    }
    Seed seed = Seed::initial(ExchangeMatrix(n, std::move(entries)));
    if (j.contains("cluster")) {
        if (!j["cluster"].is_array() || j["cluster"].size() != static_cast<size_t>(n))
            throw SyntaxError("seed field 'cluster' must hold n expressions", 0);
        for (int i = 0; i < n; ++i) {
            if (!j["cluster"][static_cast<size_t>(i)].is_string())
                throw SyntaxError("cluster entries must be strings", 0);
            seed.cluster[static_cast<size_t>(i)] =
                parse_poly(j["cluster"][static_cast<size_t>(i)].get<std::string>(), n);
        }
    }
    return seed;
}

Seed read_seed_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SyntaxError("cannot open seed file '" + path + "'", 0);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_seed_json(buf.str());
}

std::string seed_to_json(const Seed& seed) {
    nlohmann::json j;
    j["n"] = seed.matrix.rank();
    j["matrix"] = seed.matrix.row_major();
    std::vector<std::string> cluster;
    cluster.reserve(seed.cluster.size());
    for (const auto& x : seed.cluster) cluster.push_back(x.to_string());
    j["cluster"] = cluster;
    return j.dump();
}

ExchangeMatrix builtin_matrix(const std::string& name) {
    if (name == "a2") return ExchangeMatrix(2, {0, 1, -1, 0});
    if (name.rfind("rank2(", 0) == 0 && name.back() == ')') {
        long long r = 0;
        try {
            r = std::stoll(name.substr(6, name.size() - 7));
        } catch (const std::exception&) {
            throw SyntaxError("invalid rank2 matrix parameter", 6);
        }
        if (r < 1 || r > 1000) throw SyntaxError("rank2 matrix parameter out of range", 6);
        return ExchangeMatrix(2, {0, r, -r, 0});
    }
    if (name == "markoff") return ExchangeMatrix(3, {0, 2, -2, -2, 0, 2, 2, -2, 0});
    if (name == "somos4")
        return ExchangeMatrix(4, {0, 1, -2, 1, -1, 0, 3, -2, 2, -3, 0, 1, -1, 2, -1, 0});
    throw SyntaxError("unknown built-in matrix '" + name + "'", 0);
}

// ---------------------------------------------------------------------------
// Exchange-graph exploration
// ---------------------------------------------------------------------------

namespace {

// Canonical key: cluster variables sorted by their printed form, matrix
// conjugated by the sorting permutation.  Seeds equal up to relabeling the
// cluster positions collide.
std::string canonical_key(const Seed& seed) {
    const int n = seed.matrix.rank();
    std::vector<std::pair<std::string, int>> order;
    order.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) order.emplace_back(seed.cluster[static_cast<size_t>(i)].to_string(), i);
    std::sort(order.begin(), order.end());
    std::string key;
    for (const auto& [text, idx] : order) {
        key += text;
        key += '|';
    }
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            key += std::to_string(seed.matrix(order[static_cast<size_t>(p)].second,
                                              order[static_cast<size_t>(q)].second));
            key += ',';
        }
    return key;
}

std::string cluster_key(const Seed& seed) {
    std::vector<std::string> texts;
    texts.reserve(seed.cluster.size());
    for (const auto& x : seed.cluster) texts.push_back(x.to_string());
    std::sort(texts.begin(), texts.end());
    std::string key;
    for (const auto& t : texts) {
        key += t;
        key += '|';
    }
    return key;
}

long long max_rational_degree(const Seed& seed) {
    long long best = 0;
    for (const auto& x : seed.cluster)
        best = std::max<long long>(best, x.degree_profile().rational_degree);
    return best;
}

} // namespace

bool seeds_equal_up_to_relabeling(const Seed& a, const Seed& b) {
    if (a.matrix.rank() != b.matrix.rank()) return false;
    return canonical_key(a) == canonical_key(b);
}

MutationTreeResult explore_mutation_tree(const ExchangeMatrix& B, int depth, size_t max_seeds,
                                         size_t term_budget) {
    MutationTreeResult result;
    result.per_depth_max_degree.assign(static_cast<size_t>(std::max(depth, 0)), 0);
    Seed root = Seed::initial(B);
    std::set<std::string> seen{canonical_key(root)};
    std::set<std::string> clusters{cluster_key(root)};
    struct Node {
        Seed seed;
        int last = -1;
    };
    std::vector<Node> frontier{{root, -1}};
    result.distinct_seeds = 1;
    try {
        TermBudgetGuard guard(term_budget);
        for (int d = 1; d <= depth && !frontier.empty(); ++d) {
            std::vector<Node> next;
            for (const Node& node : frontier) {
                for (int k = 0; k < B.rank(); ++k) {
                    if (k == node.last) continue; // mutation is involutive
                    Seed child = mutate_seed(node.seed, k);
                    clusters.insert(cluster_key(child));
                    if (!seen.insert(canonical_key(child)).second) continue;
                    if (seen.size() > max_seeds) {
                        result.truncated = true;
                        break;
                    }
                    auto& slot = result.per_depth_max_degree[static_cast<size_t>(d - 1)];
                    slot = std::max(slot, max_rational_degree(child));
                    next.push_back({std::move(child), k});
                }
                if (result.truncated) break;
            }
            frontier = std::move(next);
            if (result.truncated) break;
        }
    } catch (const BudgetExceededError&) {
        result.truncated = true;
    }
    result.distinct_seeds = seen.size();
    result.distinct_clusters = clusters.size();
    return result;
}

} // namespace lpdyn
