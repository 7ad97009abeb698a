#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sbmsel/errors.hpp"
#include "sbmsel/graph.hpp"

namespace sbmsel {

enum class ModelKind { sbm, dcsbm };

inline constexpr double kClampEps = 1e-9;

inline double clamp_prob(double p, double eps = kClampEps) {
    return std::min(std::max(p, eps), 1.0 - eps);
}

// Complete log likelihood log f(z, A; theta):
//   sum_a n_a log pi_a + 1/2 sum_{a,b} [O_ab log H_ab + (n_ab - O_ab) log(1 - H_ab)]
// with the ordered-pair convention of CountStats.
inline double complete_log_lik(const CountStats& cs, const BlockParams& theta) {
    if (cs.num_blocks != theta.K)
        throw std::invalid_argument("complete_log_lik: block count mismatch");
    double ll = 0.0;
    for (int a = 0; a < theta.K; ++a)
        ll += static_cast<double>(cs.n_a[a]) * std::log(theta.pi[a]);
    for (int a = 0; a < theta.K; ++a) {
        for (int b = 0; b < theta.K; ++b) {
            const double h = theta.H[a][b];
            const double O = static_cast<double>(cs.O_ab[a][b]);
            const double nab = static_cast<double>(cs.n_ab[a][b]);
            ll += 0.5 * (O * std::log(h) + (nab - O) * std::log(1.0 - h));
        }
    }
    return ll;
}

// Profile MLE for fixed labels: pi_a = n_a/n, H_ab = O_ab/n_ab, clamped
// into [eps, 1-eps]; empty-block entries pinned at eps.
inline BlockParams profile_mle(const CountStats& cs, double eps = kClampEps) {
    const int K = cs.num_blocks;
    BlockParams theta;
    theta.K = K;
    theta.pi.resize(K);
    theta.H.assign(K, std::vector<double>(K, eps));
    for (int a = 0; a < K; ++a)
        theta.pi[a] = std::max(static_cast<double>(cs.n_a[a]) / cs.n, eps);
    // Renormalize after clamping so pi stays a probability vector.
    double s = 0.0;
    for (double p : theta.pi) s += p;
    for (double& p : theta.pi) p /= s;
    for (int a = 0; a < K; ++a) {
        for (int b = 0; b < K; ++b) {
            if (cs.n_ab[a][b] > 0)
                theta.H[a][b] = clamp_prob(
                    static_cast<double>(cs.O_ab[a][b]) / static_cast<double>(cs.n_ab[a][b]),
                    eps);
        }
    }
    return theta;
}

// log g(A; theta) = log sum over all labelings z in [Kp]^n of f(z, A; theta).
// Exhaustive enumeration with log-sum-exp; test-scale oracle only.
inline double exhaustive_log_g(const Graph& g, const BlockParams& theta, int Kp) {
    if (Kp != theta.K) throw std::invalid_argument("exhaustive_log_g: K mismatch");
    const int n = g.num_nodes();
    double total = std::pow(static_cast<double>(Kp), n);
    if (total > 1e7)
        throw resource_limit_error("exhaustive_log_g: Kp^n exceeds oracle scale");

    std::vector<int> z(n, 1);
    Labeling lab(z, Kp);
    double max_ll = -std::numeric_limits<double>::infinity();
    std::vector<double> lls;
    lls.reserve(static_cast<std::size_t>(total));
    while (true) {
        lls.push_back(complete_log_lik(count_stats(g, lab), theta));
        max_ll = std::max(max_ll, lls.back());
        int pos = n - 1;
        while (pos >= 0 && lab.z[pos] == Kp) lab.z[pos--] = 1;
        if (pos < 0) break;
        ++lab.z[pos];
    }
    double acc = 0.0;
    for (double ll : lls) acc += std::exp(ll - max_ll);
    return max_ll + std::log(acc);
}

// DCSBM Poisson profile log likelihood at labels z:
//   sum_i d_i log omega_i + 1/2 sum_{kl} [O_kl log H_kl - n_k n_l H_kl]
// with plug-in omega_i = n_{z_i} d_i / D_{z_i} and H_kl = O_kl / (n_k n_l).
inline double dcsbm_profile_log_lik(const Graph& g, const Labeling& lab,
                                    double eps = kClampEps) {
    if (lab.size() != g.num_nodes())
        throw std::invalid_argument("dcsbm_profile_log_lik: labeling length mismatch");
    const int K = lab.num_blocks;
    const int n = g.num_nodes();
    std::vector<std::int64_t> n_k(K, 0);
    std::vector<double> D_k(K, 0.0);
    for (int i = 0; i < n; ++i) {
        n_k[lab.z[i] - 1] += 1;
        D_k[lab.z[i] - 1] += g.degree(i);
    }
    std::vector<std::vector<double>> O(K, std::vector<double>(K, 0.0));
    for (auto [u, v] : g.edges()) {
        const int a = lab.z[u] - 1, b = lab.z[v] - 1;
        O[a][b] += 1.0;
        O[b][a] += 1.0;
    }
    double ll = 0.0;
    for (int i = 0; i < n; ++i) {
        const int k = lab.z[i] - 1;
        const double d = g.degree(i);
        if (d == 0.0) continue;  // 0*log(.) term vanishes
        const double omega = std::max(static_cast<double>(n_k[k]) * d / std::max(D_k[k], eps), eps);
        ll += d * std::log(omega);
    }
    for (int k = 0; k < K; ++k) {
        for (int l = 0; l < K; ++l) {
            const double pairs = static_cast<double>(n_k[k]) * static_cast<double>(n_k[l]);
            if (pairs == 0.0) continue;
            const double h = std::max(O[k][l] / pairs, eps);
            ll += 0.5 * (O[k][l] * std::log(h) - pairs * h);
        }
    }
    return ll;
}

} // namespace sbmsel
