#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbmsel/graph.hpp"
#include "sbmsel/likelihood.hpp"
#include "sbmsel/rng.hpp"
#include "sbmsel/spectral.hpp"

namespace sbmsel {

// Mean-field posterior over node labels: n x K' row-stochastic matrix.
struct MeanFieldPosterior {
    Eigen::MatrixXd q;

    void validate() const {
        for (int i = 0; i < q.rows(); ++i) {
            double s = 0.0;
            for (int k = 0; k < q.cols(); ++k) {
                if (q(i, k) < 0.0 || q(i, k) > 1.0)
                    throw std::invalid_argument("MeanFieldPosterior: entry outside [0,1]");
                s += q(i, k);
            }
            if (std::abs(s - 1.0) > 1e-10)
                throw std::invalid_argument("MeanFieldPosterior: row does not sum to 1");
        }
    }

    static MeanFieldPosterior point_mass(const Labeling& lab) {
        MeanFieldPosterior mf;
        mf.q = Eigen::MatrixXd::Zero(lab.size(), lab.num_blocks);
        for (int i = 0; i < lab.size(); ++i) mf.q(i, lab.z[i] - 1) = 1.0;
        return mf;
    }

    Labeling hard_labels() const {
        std::vector<int> z(q.rows());
        for (int i = 0; i < q.rows(); ++i) {
            int best = 0;
            for (int k = 1; k < q.cols(); ++k)
                if (q(i, k) > q(i, best)) best = k;
            z[i] = best + 1;
        }
        return Labeling(std::move(z), static_cast<int>(q.cols()));
    }
};

struct FitResult {
    int num_blocks = 0;
    BlockParams theta_hat;
    MeanFieldPosterior posterior;
    Labeling labels;
    double objective = 0.0;
    std::string backend;
    int iterations = 0;
    bool converged = false;
    std::vector<double> elbo_trace;  // per-iteration ELBO of the winning restart
};

namespace detail {

inline void log_h_tables(const BlockParams& theta, Eigen::MatrixXd& lg0,
                         Eigen::MatrixXd& lg1) {
    const int K = theta.K;
    lg0.resize(K, K);
    lg1.resize(K, K);
    for (int k = 0; k < K; ++k) {
        for (int l = 0; l < K; ++l) {
            lg0(k, l) = std::log(1.0 - theta.H[k][l]);
            lg1(k, l) = std::log(theta.H[k][l]) - lg0(k, l);
        }
    }
}

} // namespace detail

// Variational lower bound J(q, theta; A):
//   sum_i sum_k q_i(k) (log pi_k - log q_i(k))
//   + sum_{i<j} sum_{kl} q_i(k) q_j(l) [A_ij log H_kl + (1-A_ij) log(1-H_kl)]
inline double mean_field_elbo(const Graph& g, const MeanFieldPosterior& mf,
                              const BlockParams& theta) {
    const int n = g.num_nodes();
    const int K = theta.K;
    if (mf.q.rows() != n || mf.q.cols() != K)
        throw std::invalid_argument("mean_field_elbo: dimension mismatch");

    double elbo = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < K; ++k) {
            const double qik = mf.q(i, k);
            if (qik > 0.0) elbo += qik * (std::log(theta.pi[k]) - std::log(qik));
        }
    }

    Eigen::MatrixXd lg0, lg1;
    detail::log_h_tables(theta, lg0, lg1);

    // Non-edge baseline over all unordered pairs, then edge corrections.
    Eigen::VectorXd s = mf.q.colwise().sum();
    Eigen::MatrixXd gram = mf.q.transpose() * mf.q;
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l)
            elbo += 0.5 * (s(k) * s(l) - gram(k, l)) * lg0(k, l);
    for (auto [u, v] : g.edges())
        elbo += mf.q.row(u) * lg1 * mf.q.row(v).transpose();
    return elbo;
}

struct EmOptions {
    double tol = 1e-6;
    int max_iter = 500;
    int restarts = 5;      // 1 spectral + (restarts-1) perturbed
    double damping = 0.5;  // log-scale E-step damping
    double init_smoothing = 1e-3;
};

namespace detail {

inline BlockParams m_step(const Graph& g, const Eigen::MatrixXd& q, double eps = kClampEps) {
    const int n = static_cast<int>(q.rows());
    const int K = static_cast<int>(q.cols());
    BlockParams theta;
    theta.K = K;
    theta.pi.resize(K);
    Eigen::VectorXd s = q.colwise().sum();
    double pi_sum = 0.0;
    for (int k = 0; k < K; ++k) {
        theta.pi[k] = std::max(s(k) / n, eps);
        pi_sum += theta.pi[k];
    }
    for (double& p : theta.pi) p /= pi_sum;

    Eigen::MatrixXd gram = q.transpose() * q;
    Eigen::MatrixXd num = Eigen::MatrixXd::Zero(K, K);
    for (auto [u, v] : g.edges())
        num += q.row(u).transpose() * q.row(v) + q.row(v).transpose() * q.row(u);
    theta.H.assign(K, std::vector<double>(K, eps));
    for (int k = 0; k < K; ++k) {
        for (int l = 0; l < K; ++l) {
            const double denom = s(k) * s(l) - gram(k, l);
            double h = denom > 0.0 ? num(k, l) / denom : eps;
            theta.H[k][l] = clamp_prob(h);
        }
    }
    // Symmetrize against roundoff.
    for (int k = 0; k < K; ++k)
        for (int l = k + 1; l < K; ++l) {
            const double h = 0.5 * (theta.H[k][l] + theta.H[l][k]);
            theta.H[k][l] = theta.H[l][k] = h;
        }
    return theta;
}

// One sequential damped sweep of the mean-field fixed-point updates.
inline void e_step_sweep(const Graph& g, const BlockParams& theta, Eigen::MatrixXd& q,
                         double damping) {
    const int n = static_cast<int>(q.rows());
    const int K = static_cast<int>(q.cols());
    Eigen::MatrixXd lg0, lg1;
    log_h_tables(theta, lg0, lg1);
    Eigen::VectorXd log_pi(K);
    for (int k = 0; k < K; ++k) log_pi(k) = std::log(theta.pi[k]);

    Eigen::VectorXd s = q.colwise().sum();
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd t = Eigen::VectorXd::Zero(K);
        for (int j : g.neighbors(i)) t += q.row(j).transpose();
        Eigen::VectorXd other = s - q.row(i).transpose();

        Eigen::VectorXd logit(K);
        for (int k = 0; k < K; ++k) {
            double v = log_pi(k);
            for (int l = 0; l < K; ++l) v += other(l) * lg0(k, l) + t(l) * lg1(k, l);
            logit(k) = v;
        }
        // Geometric interpolation with the current row keeps the sweep a
        // proper ascent step on symmetric instances.
        Eigen::VectorXd old_log(K);
        for (int k = 0; k < K; ++k) old_log(k) = std::log(std::max(q(i, k), 1e-300));
        Eigen::VectorXd mixed = damping * old_log + (1.0 - damping) * logit;
        const double m = mixed.maxCoeff();
        Eigen::VectorXd w = (mixed.array() - m).exp();
        w /= w.sum();
        s -= q.row(i).transpose();
        q.row(i) = w.transpose();
        s += w;
    }
}

} // namespace detail

// Mean-field variational EM for the Bernoulli SBM. Restart 0 starts from
// spectral labels; later restarts perturb them. Best ELBO wins, ties going
// to the lowest restart index.
inline FitResult variational_em(const Graph& g, int Kp, std::uint64_t seed,
                                const EmOptions& opts = {},
                                const Labeling* init = nullptr,
                                const SpectralEmbedding* embedding = nullptr) {
    if (Kp < 1) throw std::invalid_argument("variational_em: Kp must be >= 1");
    const int n = g.num_nodes();

    SpectralEmbedding local_emb;
    if (!embedding && !init && Kp > 1) {
        local_emb = SpectralEmbedding(g);
        embedding = &local_emb;
    }

    FitResult best;
    best.objective = -std::numeric_limits<double>::infinity();
    const int restarts = (Kp == 1 || init) ? 1 : opts.restarts;

    for (int r = 0; r < restarts; ++r) {
        const std::uint64_t rseed = substream_seed(seed, static_cast<std::uint64_t>(r));
        Labeling start(std::vector<int>(n, 1), 1);
        if (init) {
            start = *init;
        } else if (Kp > 1) {
            start = spectral_init_with_embedding(*embedding, g, Kp, substream_seed(seed, 1000)).labels;
            if (r > 0) {
                // Perturb: reassign ~15% of nodes uniformly.
                Rng rng(rseed);
                std::uniform_real_distribution<double> unif(0.0, 1.0);
                std::uniform_int_distribution<int> pick(1, Kp);
                for (int& zi : start.z)
                    if (unif(rng) < 0.15) zi = pick(rng);
            }
        }
        if (start.num_blocks != Kp)
            throw std::invalid_argument("variational_em: init block count mismatch");

        // Smoothed point-mass start.
        Eigen::MatrixXd q(n, Kp);
        const double d = Kp > 1 ? opts.init_smoothing : 0.0;
        q.setConstant(Kp > 1 ? d / (Kp - 1) : 1.0);
        for (int i = 0; i < n; ++i) q(i, start.z[i] - 1) = 1.0 - d;

        BlockParams theta = detail::m_step(g, q);
        MeanFieldPosterior mf{q};
        double elbo = mean_field_elbo(g, mf, theta);
        std::vector<double> trace{elbo};
        int iter = 0;
        bool converged = false;
        for (; iter < opts.max_iter; ++iter) {
            detail::e_step_sweep(g, theta, mf.q, opts.damping);
            theta = detail::m_step(g, mf.q);
            const double new_elbo = mean_field_elbo(g, mf, theta);
            trace.push_back(new_elbo);
            const bool done = std::abs(new_elbo - elbo) < opts.tol;
            elbo = new_elbo;
            if (done || Kp == 1) { converged = true; ++iter; break; }
        }

        if (elbo > best.objective) {
            best.num_blocks = Kp;
            best.theta_hat = theta;
            best.labels = mf.hard_labels();
            best.posterior = std::move(mf);
            best.objective = elbo;
            best.backend = "variational";
            best.iterations = iter;
            best.converged = converged;
            best.elbo_trace = std::move(trace);
        }
    }
    return best;
}

} // namespace sbmsel
