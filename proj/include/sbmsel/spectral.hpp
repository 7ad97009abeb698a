#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "sbmsel/graph.hpp"
#include "sbmsel/likelihood.hpp"
#include "sbmsel/rng.hpp"

namespace sbmsel {

// Eigenpairs of the regularized adjacency A + (tau/n) 11^T, tau = mean
// degree, ordered by |eigenvalue| descending. Computed once per graph and
// reused across candidate block counts.
class SpectralEmbedding {
public:
    SpectralEmbedding() = default;

    explicit SpectralEmbedding(const Graph& g) {
        const int n = g.num_nodes();
        const double tau = n > 0 ? 2.0 * static_cast<double>(g.num_edges()) / n : 0.0;
        Eigen::MatrixXd M = Eigen::MatrixXd::Constant(n, n, tau / std::max(n, 1));
        for (auto [u, v] : g.edges()) {
            M(u, v) += 1.0;
            M(v, u) += 1.0;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M);
        ok_ = (solver.info() == Eigen::Success);
        if (!ok_) return;
        // Sort indices by |eigenvalue| descending.
        const Eigen::VectorXd& vals = solver.eigenvalues();
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return std::abs(vals(a)) > std::abs(vals(b));
        });
        vectors_.resize(n, n);
        values_.resize(n);
        for (int c = 0; c < n; ++c) {
            vectors_.col(c) = solver.eigenvectors().col(order[c]);
            values_(c) = vals(order[c]);
        }
    }

    bool ok() const { return ok_; }

    // Columns scaled by sqrt(|eigenvalue|) so weak (noise-level) directions
    // do not dominate the clustering distances.
    Eigen::MatrixXd embedding(int dims) const {
        const int d = std::min<int>(dims, static_cast<int>(vectors_.cols()));
        Eigen::MatrixXd X = vectors_.leftCols(d);
        for (int c = 0; c < d; ++c) X.col(c) *= std::sqrt(std::abs(values_(c)));
        return X;
    }

private:
    bool ok_ = false;
    Eigen::MatrixXd vectors_;
    Eigen::VectorXd values_;
};

namespace detail {

// Lloyd's k-means with k-means++ seeding; returns 1-based labels.
inline std::vector<int> kmeans(const Eigen::MatrixXd& X, int K, Rng& rng,
                               int max_iter = 50) {
    const int n = static_cast<int>(X.rows());
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, n - 1);

    Eigen::MatrixXd centers(K, X.cols());
    centers.row(0) = X.row(pick(rng));
    Eigen::VectorXd d2 = (X.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int k = 1; k < K; ++k) {
        const double total = d2.sum();
        int chosen = 0;
        if (total > 0.0) {
            double r = unif(rng) * total, acc = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += d2(i);
                if (acc >= r) { chosen = i; break; }
            }
        } else {
            chosen = pick(rng);
        }
        centers.row(k) = X.row(chosen);
        d2 = d2.cwiseMin((X.rowwise() - centers.row(k)).rowwise().squaredNorm());
    }

    std::vector<int> assign(n, 0);
    for (int it = 0; it < max_iter; ++it) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int k = 0; k < K; ++k) {
                const double d = (X.row(i) - centers.row(k)).squaredNorm();
                if (d < best_d) { best_d = d; best = k; }
            }
            if (best != assign[i]) { assign[i] = best; changed = true; }
        }
        if (!changed && it > 0) break;
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(K, X.cols());
        std::vector<int> counts(K, 0);
        for (int i = 0; i < n; ++i) {
            sums.row(assign[i]) += X.row(i);
            ++counts[assign[i]];
        }
        for (int k = 0; k < K; ++k) {
            if (counts[k] > 0) centers.row(k) = sums.row(k) / counts[k];
            else centers.row(k) = X.row(pick(rng));  // re-seed empty cluster
        }
    }

    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = assign[i] + 1;
    return labels;
}

inline double kmeans_cost(const Eigen::MatrixXd& X, const std::vector<int>& labels, int K) {
    Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(K, X.cols());
    std::vector<int> counts(K, 0);
    for (int i = 0; i < X.rows(); ++i) {
        centers.row(labels[i] - 1) += X.row(i);
        ++counts[labels[i] - 1];
    }
    for (int k = 0; k < K; ++k)
        if (counts[k] > 0) centers.row(k) /= counts[k];
    double cost = 0.0;
    for (int i = 0; i < X.rows(); ++i)
        cost += (X.row(i) - centers.row(labels[i] - 1)).squaredNorm();
    return cost;
}

} // namespace detail

struct SpectralInitResult {
    Labeling labels;
    bool eigensolver_failed = false;
};

inline SpectralInitResult spectral_init_with_embedding(const SpectralEmbedding& emb,
                                                       const Graph& g, int Kp,
                                                       std::uint64_t seed,
                                                       ModelKind model = ModelKind::sbm,
                                                       int kmeans_starts = 10) {
    const int n = g.num_nodes();
    if (Kp < 1) throw std::invalid_argument("spectral_init: Kp must be >= 1");
    if (Kp == 1) return {Labeling(std::vector<int>(n, 1), 1), false};
    if (!emb.ok()) {
        // Fall back to a random labeling.
        Rng rng(substream_seed(seed, 0));
        std::uniform_int_distribution<int> pick(1, Kp);
        std::vector<int> z(n);
        for (int& zi : z) zi = pick(rng);
        return {Labeling(std::move(z), Kp), true};
    }
    // Some informative models hide one or more block directions below the
    // spectral noise floor, so cluster every leading-dimension subset and
    // let the profile likelihood arbitrate.
    Eigen::MatrixXd X = emb.embedding(Kp);
    if (model == ModelKind::dcsbm) {
        // Project onto the sphere so per-node degree scale cancels.
        for (int i = 0; i < n; ++i) {
            const double nr = X.row(i).norm();
            if (nr > 1e-12) X.row(i) /= nr;
        }
    }
    Labeling best(std::vector<int>(n, 1), Kp);
    double best_ll = -std::numeric_limits<double>::infinity();
    for (int dims = 1; dims <= X.cols(); ++dims) {
        const Eigen::MatrixXd Y = X.leftCols(dims);
        std::vector<int> z;
        double cost = std::numeric_limits<double>::infinity();
        for (int s = 0; s < kmeans_starts; ++s) {
            Rng rng(substream_seed(seed, static_cast<std::uint64_t>(dims * 1000 + s)));
            std::vector<int> labels = detail::kmeans(Y, Kp, rng);
            const double c = detail::kmeans_cost(Y, labels, Kp);
            if (c < cost) { cost = c; z = std::move(labels); }
        }
        Labeling cand(std::move(z), Kp);
        double ll;
        if (model == ModelKind::dcsbm) {
            ll = dcsbm_profile_log_lik(g, cand);
        } else {
            const CountStats cs = count_stats(g, cand);
            ll = complete_log_lik(cs, profile_mle(cs));
        }
        if (ll > best_ll) { best_ll = ll; best = std::move(cand); }
    }
    return {std::move(best), false};
}

inline Labeling spectral_init(const Graph& g, int Kp, std::uint64_t seed,
                              ModelKind model = ModelKind::sbm) {
    SpectralEmbedding emb(g);
    return spectral_init_with_embedding(emb, g, Kp, seed, model).labels;
}

} // namespace sbmsel
