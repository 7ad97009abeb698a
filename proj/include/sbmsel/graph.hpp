#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sbmsel/errors.hpp"

namespace sbmsel {

// Undirected simple graph: sorted set of unordered pairs plus per-node
// neighbor lists. Node ids are 0-based.
class Graph {
public:
    Graph() = default;

    Graph(int n, std::vector<std::pair<int, int>> edges) : n_(n) {
        if (n < 0) throw std::invalid_argument("Graph: negative node count");
        for (auto& [u, v] : edges) {
            if (u == v) throw std::invalid_argument("Graph: self-loop");
            if (u < 0 || v < 0 || u >= n || v >= n)
                throw std::invalid_argument("Graph: node id out of range");
            if (u > v) std::swap(u, v);
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        edges_ = std::move(edges);
        adj_.assign(n_, {});
        for (auto [u, v] : edges_) {
            adj_[u].push_back(v);
            adj_[v].push_back(u);
        }
    }

    int num_nodes() const { return n_; }
    std::int64_t num_edges() const { return static_cast<std::int64_t>(edges_.size()); }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<int>& neighbors(int i) const { return adj_[i]; }
    int degree(int i) const { return static_cast<int>(adj_[i].size()); }

    bool has_edge(int u, int v) const {
        if (u > v) std::swap(u, v);
        return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(u, v));
    }

private:
    int n_ = 0;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adj_;
};

// Block assignment z_i in [1..K']; empty blocks are allowed.
struct Labeling {
    std::vector<int> z;   // 1-based block ids
    int num_blocks = 0;   // K'

    Labeling() = default;
    Labeling(std::vector<int> labels, int K) : z(std::move(labels)), num_blocks(K) {
        for (int zi : z)
            if (zi < 1 || zi > K) throw std::invalid_argument("Labeling: label out of [1..K']");
    }

    int size() const { return static_cast<int>(z.size()); }
};

// theta = (pi, H), optionally factored H = rho * S.
struct BlockParams {
    int K = 0;
    std::vector<double> pi;              // strictly positive, sums to 1
    std::vector<std::vector<double>> H;  // symmetric, entries in (0,1)
    double rho = 0.0;                    // 0 means "not factored"

    BlockParams() = default;
    BlockParams(std::vector<double> pi_in, std::vector<std::vector<double>> H_in,
                double rho_in = 0.0)
        : K(static_cast<int>(pi_in.size())), pi(std::move(pi_in)), H(std::move(H_in)),
          rho(rho_in) {
        validate();
    }

    void validate() const {
        if (K < 1 || static_cast<int>(H.size()) != K)
            throw std::invalid_argument("BlockParams: dimension mismatch");
        double s = 0.0;
        for (double p : pi) {
            if (!(p > 0.0)) throw std::invalid_argument("BlockParams: pi must be positive");
            s += p;
        }
        if (std::abs(s - 1.0) > 1e-12)
            throw std::invalid_argument("BlockParams: pi must sum to 1");
        for (int a = 0; a < K; ++a) {
            if (static_cast<int>(H[a].size()) != K)
                throw std::invalid_argument("BlockParams: H not square");
            for (int b = 0; b < K; ++b) {
                if (!(H[a][b] > 0.0 && H[a][b] < 1.0))
                    throw std::invalid_argument("BlockParams: H entries must be in (0,1)");
                if (std::abs(H[a][b] - H[b][a]) > 1e-12)
                    throw std::invalid_argument("BlockParams: H not symmetric");
            }
        }
    }

    // S = H / rho; falls back to the grand mean density when rho is unset,
    // so the sparse-regime scaling is always well defined.
    double effective_rho() const {
        if (rho > 0.0) return rho;
        double m = 0.0;
        for (int a = 0; a < K; ++a)
            for (int b = 0; b < K; ++b) m += pi[a] * pi[b] * H[a][b];
        return m;
    }
};

// Ordered-pair convention throughout: n_ab and O_ab count ordered pairs,
// so O_aa is twice the within-block edge count and sum(O) = 2L.
struct CountStats {
    int num_blocks = 0;                       // K'
    int n = 0;                                // total node count
    std::vector<std::int64_t> n_a;            // block sizes
    std::vector<std::vector<std::int64_t>> n_ab;
    std::vector<std::vector<std::int64_t>> O_ab;
};

struct ConfusionMatrix {
    std::vector<std::vector<double>> R;  // K' x K, entries sum to 1

    // True iff each row has at most one nonzero entry, i.e. the candidate
    // labeling only splits blocks of the reference.
    bool is_refinement() const {
        for (const auto& row : R) {
            int nonzero = 0;
            for (double v : row)
                if (v > 0.0) ++nonzero;
            if (nonzero > 1) return false;
        }
        return true;
    }
};

// Per-node degree parameters omega; block sums equal block sizes.
struct DegreeParams {
    std::vector<double> omega;
};

inline CountStats count_stats(const Graph& g, const Labeling& lab) {
    if (lab.size() != g.num_nodes())
        throw std::invalid_argument("count_stats: labeling length mismatch");
    const int K = lab.num_blocks;
    CountStats cs;
    cs.num_blocks = K;
    cs.n = g.num_nodes();
    cs.n_a.assign(K, 0);
    cs.n_ab.assign(K, std::vector<std::int64_t>(K, 0));
    cs.O_ab.assign(K, std::vector<std::int64_t>(K, 0));
    for (int zi : lab.z) ++cs.n_a[zi - 1];
    for (int a = 0; a < K; ++a)
        for (int b = 0; b < K; ++b)
            cs.n_ab[a][b] = (a == b) ? cs.n_a[a] * (cs.n_a[a] - 1) : cs.n_a[a] * cs.n_a[b];
    for (auto [u, v] : g.edges()) {
        const int a = lab.z[u] - 1, b = lab.z[v] - 1;
        cs.O_ab[a][b] += 1;
        cs.O_ab[b][a] += 1;
    }
    return cs;
}

inline ConfusionMatrix confusion(const Labeling& z, const Labeling& Z) {
    if (z.size() != Z.size())
        throw std::invalid_argument("confusion: labeling length mismatch");
    const int n = z.size();
    ConfusionMatrix cm;
    cm.R.assign(z.num_blocks, std::vector<double>(Z.num_blocks, 0.0));
    const double inv_n = 1.0 / static_cast<double>(n);
    for (int i = 0; i < n; ++i) cm.R[z.z[i] - 1][Z.z[i] - 1] += inv_n;
    return cm;
}

// Fraction of nodes whose labels agree with the reference under the best
// block permutation (exhaustive over permutations; fine for small K).
inline double best_permutation_agreement(const Labeling& z, const Labeling& Z) {
    if (z.size() != Z.size())
        throw std::invalid_argument("agreement: labeling length mismatch");
    const int K = std::max(z.num_blocks, Z.num_blocks);
    std::vector<std::vector<int>> counts(K, std::vector<int>(K, 0));
    for (int i = 0; i < z.size(); ++i) ++counts[z.z[i] - 1][Z.z[i] - 1];
    std::vector<int> perm(K);
    for (int k = 0; k < K; ++k) perm[k] = k;
    int best = 0;
    do {
        int agree = 0;
        for (int k = 0; k < K; ++k) agree += counts[k][perm[k]];
        best = std::max(best, agree);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(z.size());
}

} // namespace sbmsel
