#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbmsel/asymptotics.hpp"
#include "sbmsel/graph.hpp"
#include "sbmsel/labels.hpp"
#include "sbmsel/likelihood.hpp"
#include "sbmsel/variational.hpp"

namespace sbmsel {

// lambda * K'(K'+1)/2 * n log n (natural log).
inline double penalty(int Kp, int n, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("penalty: lambda must be >= 0");
    return lambda * (static_cast<double>(Kp) * (Kp + 1) / 2.0) * n * std::log(static_cast<double>(n));
}

inline std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 300; ++i) grid.push_back(i * 1e-3);
    return grid;
}

struct SelectionResult {
    std::vector<int> K_range;
    std::vector<double> loglik;       // per-K' objective (lambda-independent)
    std::vector<double> penalty_vals; // at lambda_star
    std::vector<double> beta;         // loglik - penalty at lambda_star
    double lambda_star = 0.0;
    std::vector<double> entropy_curve;
    int K_hat = 1;
    std::string backend;
    std::string model;
    std::uint64_t seed = 0;
    bool degenerate_profile = false;  // all-equal beta at every lambda
    std::vector<Labeling> labels;     // per-K' fitted labels
};

// Objective values for K' = 1..K_max. Fits are lambda-independent, so the
// lambda scan never refits.
inline SelectionResult beta_profile(const Graph& g, int K_max, double lambda,
                                    LikBackend backend, ModelKind model,
                                    std::uint64_t seed) {
    if (K_max < 1) throw std::invalid_argument("beta_profile: K_max must be >= 1");
    if (backend == LikBackend::variational && model == ModelKind::dcsbm)
        throw std::invalid_argument("beta_profile: variational backend does not support dcsbm");
    if (backend == LikBackend::exhaustive)
        throw std::invalid_argument("beta_profile: exhaustive backend is a test oracle only");

    SelectionResult res;
    res.backend = backend == LikBackend::variational ? "variational" : "plugin";
    res.model = model == ModelKind::sbm ? "sbm" : "dcsbm";
    res.seed = seed;
    res.lambda_star = lambda;

    SpectralEmbedding emb(g);
    for (int k = 1; k <= K_max; ++k) {
        res.K_range.push_back(k);
        double objective;
        Labeling lab;
        if (backend == LikBackend::variational) {
            FitResult fit = variational_em(g, k, substream_seed(seed, k), {}, nullptr, &emb);
            objective = fit.objective;
            lab = fit.labels;
        } else {
            lab = estimate_labels(g, k, model, substream_seed(seed, k), &emb);
            objective = model == ModelKind::sbm
                ? complete_log_lik(count_stats(g, lab), profile_mle(count_stats(g, lab)))
                : dcsbm_profile_log_lik(g, lab);
        }
        res.loglik.push_back(objective);
        res.labels.push_back(std::move(lab));
        res.penalty_vals.push_back(penalty(k, g.num_nodes(), lambda));
        res.beta.push_back(res.loglik.back() - res.penalty_vals.back());
    }
    res.K_hat = 1;
    for (int k = 1; k < K_max; ++k)
        if (res.beta[k] > res.beta[res.K_hat - 1]) res.K_hat = k + 1;
    return res;
}

// Shannon entropy of the normalized negated beta profile. Normalization:
// shift -beta by its minimum plus a 1e-8*range floor so every weight is
// strictly positive, then divide by the sum; an all-equal profile maps to
// uniform weights.
inline double profile_entropy(const std::vector<double>& neg_beta) {
    const int K = static_cast<int>(neg_beta.size());
    double lo = neg_beta[0], hi = neg_beta[0];
    for (double v : neg_beta) { lo = std::min(lo, v); hi = std::max(hi, v); }
    const double range = hi - lo;
    if (range <= 0.0) return std::log(static_cast<double>(K));  // uniform
    std::vector<double> w(K);
    double sum = 0.0;
    for (int k = 0; k < K; ++k) {
        w[k] = neg_beta[k] - lo + 1e-8 * range;
        sum += w[k];
    }
    double H = 0.0;
    for (int k = 0; k < K; ++k) {
        const double p = w[k] / sum;
        if (p > 0.0) H -= p * std::log(p);
    }
    return H;
}

struct LambdaChoice {
    double lambda_star = 0.0;
    std::vector<double> entropy_curve;
    bool degenerate = false;
};

// Entropy heuristic over the lambda grid; ties resolved toward the largest
// lambda (tolerance 1e-12).
inline LambdaChoice entropy_select_lambda(const std::vector<double>& objectives,
                                          const std::vector<double>& lambda_grid, int n) {
    if (lambda_grid.empty())
        throw std::invalid_argument("entropy_select_lambda: empty lambda grid");
    const int K_max = static_cast<int>(objectives.size());
    LambdaChoice choice;
    choice.entropy_curve.reserve(lambda_grid.size());
    double best_entropy = -std::numeric_limits<double>::infinity();
    bool any_spread = false;
    for (double lambda : lambda_grid) {
        std::vector<double> neg_beta(K_max);
        for (int k = 0; k < K_max; ++k)
            neg_beta[k] = -(objectives[k] - penalty(k + 1, n, lambda));
        double lo = neg_beta[0], hi = neg_beta[0];
        for (double v : neg_beta) { lo = std::min(lo, v); hi = std::max(hi, v); }
        if (hi - lo > 0.0) any_spread = true;
        const double H = profile_entropy(neg_beta);
        choice.entropy_curve.push_back(H);
        if (H >= best_entropy - 1e-12) {  // ties go to the largest lambda
            if (H > best_entropy) best_entropy = H;
            choice.lambda_star = lambda;
        }
    }
    choice.degenerate = !any_spread;
    return choice;
}

// Full selector: fit once per K', scan lambda, argmax beta at lambda_star
// (smallest K' on ties).
inline SelectionResult select_K(const Graph& g, int K_max, LikBackend backend,
                                ModelKind model, const std::vector<double>& lambda_grid,
                                std::uint64_t seed) {
    SelectionResult res = beta_profile(g, K_max, 0.0, backend, model, seed);
    LambdaChoice choice = entropy_select_lambda(res.loglik, lambda_grid, g.num_nodes());
    res.lambda_star = choice.lambda_star;
    res.entropy_curve = std::move(choice.entropy_curve);
    res.degenerate_profile = choice.degenerate;
    for (int k = 1; k <= K_max; ++k) {
        res.penalty_vals[k - 1] = penalty(k, g.num_nodes(), res.lambda_star);
        res.beta[k - 1] = res.loglik[k - 1] - res.penalty_vals[k - 1];
    }
    res.K_hat = 1;
    for (int k = 1; k < K_max; ++k)
        if (res.beta[k] > res.beta[res.K_hat - 1]) res.K_hat = k + 1;
    return res;
}

inline SelectionResult select_K(const Graph& g, int K_max, LikBackend backend,
                                ModelKind model, std::uint64_t seed) {
    return select_K(g, K_max, backend, model, default_lambda_grid(), seed);
}

} // namespace sbmsel
