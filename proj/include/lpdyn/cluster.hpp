#pragma once
#include <optional>
#include <string>
#include <vector>

#include "lpdyn/laurent.hpp"

namespace lpdyn {

// Integer exchange matrix.  Construction validates the structure: square,
// zero diagonal, strict sign opposition (b_ij != 0 implies b_ij * b_ji < 0),
// and the existence of a positive integer diagonal D with D B skew-symmetric
// whose entries stay within the stated bound.
class ExchangeMatrix {
public:
    ExchangeMatrix() = default;
    ExchangeMatrix(int n, std::vector<long long> row_major);

    int rank() const { return n_; }
    long long operator()(int i, int j) const {
        return b_[static_cast<size_t>(i) * static_cast<size_t>(n_) + static_cast<size_t>(j)];
    }
    bool is_skew_symmetric() const;
    const std::vector<long long>& skew_symmetrizer() const { return d_; }
    const std::vector<long long>& row_major() const { return b_; }

    friend bool operator==(const ExchangeMatrix& a, const ExchangeMatrix& b) {
        return a.n_ == b.n_ && a.b_ == b.b_;
    }
    friend bool operator!=(const ExchangeMatrix& a, const ExchangeMatrix& b) {
        return !(a == b);
    }

    static constexpr long long kMaxSymmetrizerEntry = 720;

private:
    int n_ = 0;
    std::vector<long long> b_;
    std::vector<long long> d_;
};

// Matrix mutation in direction k (0-based):
//   b'_ij = -b_ij                      if i == k or j == k,
//   b'_ij = b_ij + sgn(b_ik) [b_ik b_kj]_+   otherwise.
ExchangeMatrix mutate_matrix(const ExchangeMatrix& B, int k);

struct Seed {
    ExchangeMatrix matrix;
    std::vector<LaurentPoly> cluster; // Laurent polynomials in the initial cluster

    static Seed initial(const ExchangeMatrix& B);
    friend bool operator==(const Seed& a, const Seed& b) {
        return a.matrix == b.matrix && a.cluster == b.cluster;
    }
};

// The exchange binomial numerator prod x_j^{[b_jk... row-k positive part} +
// prod of the negative part, i.e. the numerator of x_k x'_k.
LaurentPoly exchange_numerator(const Seed& seed, int k);

// Seed mutation in direction k: replaces x_k by exchange_numerator / x_k
// (exact Laurent division; a failure is a counterexample to the Laurent
// property and raises NotLaurentError naming the direction) and mutates the
// matrix.  Involutive.
Seed mutate_seed(const Seed& seed, int k);

// Applies directions left to right.
Seed apply_sequence(Seed seed, const std::vector<int>& directions);

// Seed JSON shape: {"n": 3, "matrix": [row-major ints], "cluster": [optional
// strings in variables x1..xn]}.
Seed parse_seed_json(const std::string& text);
Seed read_seed_json(const std::string& path);
std::string seed_to_json(const Seed& seed);

// Built-in matrices: "a2", "rank2(r)", "markoff", "somos4".
ExchangeMatrix builtin_matrix(const std::string& name);

// Seeds compared up to a simultaneous relabeling of the cluster variables:
// sort each cluster by canonical text and conjugate the matrices by the same
// permutations.  This is the equality used for periodicity checks, where a
// mutation cycle may return the initial seed with its variables permuted.
bool seeds_equal_up_to_relabeling(const Seed& a, const Seed& b);

struct MutationTreeResult {
    // max over seeds first reached at depth d (index d-1) of the maximal
    // rational degree of a cluster variable in that seed.
    std::vector<long long> per_depth_max_degree;
    size_t distinct_seeds = 0;    // canonical (cluster sorted, matrix conjugated)
    size_t distinct_clusters = 0; // unordered variable sets
    bool truncated = false;
};

// Breadth-first exploration of the exchange graph from the initial seed,
// skipping immediate backtracking and deduplicating seeds up to relabeling.
MutationTreeResult explore_mutation_tree(const ExchangeMatrix& B, int depth,
                                         size_t max_seeds = 100000,
                                         size_t term_budget = 5'000'000);

} // namespace lpdyn
