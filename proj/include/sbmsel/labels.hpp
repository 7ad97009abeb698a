#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sbmsel/graph.hpp"
#include "sbmsel/likelihood.hpp"
#include "sbmsel/spectral.hpp"

namespace sbmsel {

namespace detail {

// One synchronous pseudo-likelihood relabeling pass: every node moves to
// the block maximizing its conditional contribution given the current
// block degree profiles. Returns true if any label changed.
inline bool pseudo_lik_sweep(const Graph& g, Labeling& lab, ModelKind model,
                             double eps = kClampEps) {
    const int n = g.num_nodes();
    const int K = lab.num_blocks;
    std::vector<double> n_k(K, 0.0);
    for (int zi : lab.z) n_k[zi - 1] += 1.0;
    std::vector<std::vector<double>> O(K, std::vector<double>(K, 0.0));
    for (auto [u, v] : g.edges()) {
        O[lab.z[u] - 1][lab.z[v] - 1] += 1.0;
        O[lab.z[v] - 1][lab.z[u] - 1] += 1.0;
    }

    // Per-block score tables. sbm: Bernoulli conditional; dcsbm: multinomial
    // profile over neighbor blocks (degree parameters cancel).
    std::vector<std::vector<double>> w_edge(K, std::vector<double>(K, 0.0));
    std::vector<double> base(K, 0.0);
    for (int k = 0; k < K; ++k) {
        base[k] = std::log(std::max(n_k[k] / n, eps));
        if (model == ModelKind::sbm) {
            for (int l = 0; l < K; ++l) {
                const double pairs = (k == l) ? n_k[k] * (n_k[k] - 1.0) : n_k[k] * n_k[l];
                const double h = clamp_prob(pairs > 0.0 ? O[k][l] / pairs : eps, eps);
                w_edge[k][l] = std::log(h) - std::log(1.0 - h);
                base[k] += n_k[l] * std::log(1.0 - h);
            }
        } else {
            double row = 0.0;
            std::vector<double> rate(K);
            for (int l = 0; l < K; ++l) {
                const double pairs = n_k[k] * n_k[l];
                rate[l] = std::max(pairs > 0.0 ? O[k][l] / pairs : eps, eps) * n_k[l];
                row += rate[l];
            }
            for (int l = 0; l < K; ++l)
                w_edge[k][l] = std::log(std::max(rate[l] / std::max(row, eps), eps));
        }
    }

    bool changed = false;
    std::vector<int> next(n);
    std::vector<double> d(K);
    for (int i = 0; i < n; ++i) {
        std::fill(d.begin(), d.end(), 0.0);
        for (int j : g.neighbors(i)) d[lab.z[j] - 1] += 1.0;
        int best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < K; ++k) {
            double score = base[k];
            for (int l = 0; l < K; ++l) score += d[l] * w_edge[k][l];
            if (score > best_score + 1e-12) { best_score = score; best = k; }
        }
        next[i] = best + 1;
        changed = changed || next[i] != lab.z[i];
    }
    lab.z = std::move(next);
    return changed;
}

} // namespace detail

// Spectral initialization followed by pseudo-likelihood label refinement,
// stopping at a label fixed point or the sweep cap.
inline Labeling estimate_labels(const Graph& g, int Kp, ModelKind model,
                                std::uint64_t seed,
                                const SpectralEmbedding* embedding = nullptr,
                                int max_sweeps = 100) {
    if (Kp < 1) throw std::invalid_argument("estimate_labels: Kp must be >= 1");
    Labeling lab = embedding
        ? spectral_init_with_embedding(*embedding, g, Kp, seed, model).labels
        : spectral_init(g, Kp, seed, model);
    for (int sweep = 0; sweep < max_sweeps; ++sweep)
        if (!detail::pseudo_lik_sweep(g, lab, model)) break;
    return lab;
}

// Single refinement pass, exposed for fixed-point tests.
inline Labeling refine_labels_once(const Graph& g, const Labeling& lab, ModelKind model) {
    Labeling out = lab;
    detail::pseudo_lik_sweep(g, out, model);
    return out;
}

} // namespace sbmsel
