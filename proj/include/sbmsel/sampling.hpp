#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "sbmsel/graph.hpp"
#include "sbmsel/rng.hpp"

namespace sbmsel {

inline Labeling sample_labels(const std::vector<double>& pi, int n, std::uint64_t seed) {
    if (n <= 0) throw std::invalid_argument("sample_labels: n must be positive");
    const int K = static_cast<int>(pi.size());
    if (K < 1) throw std::invalid_argument("sample_labels: empty pi");
    Rng rng(seed);
    std::discrete_distribution<int> dist(pi.begin(), pi.end());
    std::vector<int> z(n);
    for (int i = 0; i < n; ++i) z[i] = dist(rng) + 1;
    return Labeling(std::move(z), K);
}

inline std::pair<Graph, Labeling> sample_sbm(const BlockParams& theta, int n,
                                             std::uint64_t seed) {
    theta.validate();
    Labeling lab = sample_labels(theta.pi, n, substream_seed(seed, 0));
    Rng rng(substream_seed(seed, 1));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (unif(rng) < theta.H[lab.z[i] - 1][lab.z[j] - 1]) edges.emplace_back(i, j);
    return {Graph(n, std::move(edges)), std::move(lab)};
}

enum class DegreeScheme {
    uniform,    // omega ~ Unif(0.2, 1), renormalized per block
    dirichlet,  // omega | block ~ n_k * Dirichlet(1)
};

// Poisson-mean DCSBM draw. With binary=true the Poisson counts are
// thresholded at >= 1, giving a simple binary adjacency.
inline std::tuple<Graph, Labeling, DegreeParams>
sample_dcsbm(const BlockParams& theta, int n, bool binary, std::uint64_t seed,
             DegreeScheme scheme = DegreeScheme::uniform) {
    theta.validate();
    Labeling lab = sample_labels(theta.pi, n, substream_seed(seed, 0));
    Rng rng(substream_seed(seed, 1));

    std::vector<double> omega(n);
    if (scheme == DegreeScheme::uniform) {
        std::uniform_real_distribution<double> unif(0.2, 1.0);
        for (int i = 0; i < n; ++i) omega[i] = unif(rng);
    } else {
        std::exponential_distribution<double> expo(1.0);
        for (int i = 0; i < n; ++i) omega[i] = expo(rng);
    }
    // Renormalize so omega sums to n_k within each block.
    std::vector<double> block_sum(theta.K, 0.0);
    std::vector<std::int64_t> block_count(theta.K, 0);
    for (int i = 0; i < n; ++i) {
        block_sum[lab.z[i] - 1] += omega[i];
        ++block_count[lab.z[i] - 1];
    }
    for (int i = 0; i < n; ++i) {
        const int k = lab.z[i] - 1;
        omega[i] *= static_cast<double>(block_count[k]) / block_sum[k];
    }

    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double mean = omega[i] * omega[j] * theta.H[lab.z[i] - 1][lab.z[j] - 1];
            std::poisson_distribution<int> pois(mean);
            // The stored graph is simple either way; binary=false keeps the
            // Poisson draw semantics but multiplicities are not persisted.
            if (pois(rng) >= 1) edges.emplace_back(i, j);
        }
    }
    return {Graph(n, std::move(edges)), std::move(lab), DegreeParams{std::move(omega)}};
}

} // namespace sbmsel
