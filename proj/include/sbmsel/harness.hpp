#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "sbmsel/asymptotics.hpp"
#include "sbmsel/edge_list.hpp"
#include "sbmsel/parallel.hpp"
#include "sbmsel/sampling.hpp"
#include "sbmsel/selection.hpp"

namespace sbmsel {

// Built-in generative settings: the two goodness-of-fit scenarios plus the
// sweep families (S* with diagonal 2 and off-diagonal 1, H* = rho S*).
inline BlockParams make_scenario(const std::string& id, double rho = 0.0) {
    if (id == "a") {
        return BlockParams({0.4, 0.6}, {{0.15, 0.05}, {0.05, 0.01}});
    }
    if (id == "b") {
        return BlockParams({0.4, 0.3, 0.3},
                           {{0.2, 0.1, 0.1}, {0.1, 0.2, 0.03}, {0.1, 0.03, 0.1}});
    }
    if (id == "sweep-k2" || id == "sweep-k3" || id == "sweep-k4") {
        if (!(rho > 0.0)) throw std::invalid_argument("scenario " + id + " needs rho > 0");
        int K = id == "sweep-k2" ? 2 : (id == "sweep-k3" ? 3 : 4);
        std::vector<double> pi;
        if (K == 2) pi = {0.4, 0.6};
        else if (K == 3) pi = {0.3, 0.3, 0.4};
        else pi = {0.25, 0.25, 0.25, 0.25};
        std::vector<std::vector<double>> H(K, std::vector<double>(K, rho));
        for (int k = 0; k < K; ++k) H[k][k] = 2.0 * rho;
        return BlockParams(std::move(pi), std::move(H), rho);
    }
    throw std::invalid_argument("unknown scenario id: " + id);
}

struct ExperimentConfig {
    std::string scenario = "a";
    double rho = 0.0;  // only for sweep families
    int n = 500;
    int replications = 20;
    Regime regime = Regime::sparse;
    LikBackend backend = LikBackend::variational;
    ModelKind model = ModelKind::sbm;
    std::uint64_t seed = 1;
    int K_max = 10;
    std::vector<double> lambda_grid = default_lambda_grid();
    int threads = 0;  // 0 = hardware default
};

struct GofReport {
    std::vector<double> statistics;  // limit-law scaled, one per replication
    LimitLaw law;
    double empirical_mean = 0.0;
    double empirical_sd = 0.0;
    double ks_distance = 0.0;
};

inline double normal_cdf(double x, double mean, double sd) {
    if (sd <= 0.0) return x < mean ? 0.0 : 1.0;
    return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

inline double ks_distance(std::vector<double> samples, double mean, double sd) {
    std::sort(samples.begin(), samples.end());
    const int n = static_cast<int>(samples.size());
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
        const double F = normal_cdf(samples[i], mean, sd);
        d = std::max(d, std::abs(F - static_cast<double>(i) / n));
        d = std::max(d, std::abs(F - static_cast<double>(i + 1) / n));
    }
    return d;
}

// Samples the scenario, computes the underfitting statistic L_{K,K-1} per
// replication, scales it per the regime convention and compares against the
// predicted normal.
inline GofReport run_gof(const ExperimentConfig& cfg) {
    const BlockParams theta = make_scenario(cfg.scenario, cfg.rho);
    if (theta.K < 2) throw std::invalid_argument("run_gof: scenario must have K >= 2");
    GofReport rep;
    rep.law = limit_law(theta, cfg.n, cfg.regime);
    const double rho = theta.effective_rho();
    const double scale = cfg.regime == Regime::sparse
        ? 1.0 / (rho * std::pow(static_cast<double>(cfg.n), 1.5))
        : 1.0 / std::pow(static_cast<double>(cfg.n), 1.5);

    rep.statistics.assign(cfg.replications, 0.0);
    parallel_for(cfg.replications, [&](int r) {
        const std::uint64_t rseed = substream_seed(cfg.seed, static_cast<std::uint64_t>(r));
        auto [g, labels] = sample_sbm(theta, cfg.n, rseed);
        SpectralEmbedding emb(g);
        const double L = log_lik_ratio(g, theta.K, theta.K - 1, cfg.backend,
                                       substream_seed(rseed, 77), cfg.model, &emb);
        rep.statistics[r] = L * scale;
    }, cfg.threads);

    double mean = 0.0;
    for (double s : rep.statistics) mean += s;
    mean /= cfg.replications;
    double var = 0.0;
    for (double s : rep.statistics) var += (s - mean) * (s - mean);
    var /= std::max(cfg.replications - 1, 1);
    rep.empirical_mean = mean;
    rep.empirical_sd = std::sqrt(var);
    rep.ks_distance =
        ks_distance(rep.statistics, rep.law.centering, std::sqrt(rep.law.sigma2_fs));
    return rep;
}

struct SweepCell {
    std::string family = "sbm";  // "sbm" or "dcsbm"
    int K = 2;
    double rho = 0.08;
    int n = 500;
};

struct SweepRow {
    SweepCell cell;
    int replications = 0;
    int successes = 0;
    double success_rate = 0.0;
};

struct SweepReport {
    std::vector<SweepRow> rows;
};

// One model-selection run per (cell, replication); success means the
// selector recovers the generative block count.
inline SweepReport run_sweep(const std::vector<SweepCell>& cells, const ExperimentConfig& cfg) {
    if (cells.empty()) throw std::invalid_argument("run_sweep: empty grid");
    SweepReport report;
    report.rows.resize(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const SweepCell& cell = cells[c];
        const BlockParams theta = make_scenario("sweep-k" + std::to_string(cell.K), cell.rho);
        std::vector<int> outcome(cfg.replications, 0);
        parallel_for(cfg.replications, [&](int r) {
            const std::uint64_t rseed =
                substream_seed(cfg.seed, static_cast<std::uint64_t>(c * 100003 + r));
            Graph g;
            if (cell.family == "dcsbm") {
                auto [graph, labels, omega] = sample_dcsbm(theta, cell.n, true, rseed);
                g = std::move(graph);
            } else {
                auto [graph, labels] = sample_sbm(theta, cell.n, rseed);
                g = std::move(graph);
            }
            const LikBackend backend =
                cell.family == "dcsbm" ? LikBackend::plugin : cfg.backend;
            const ModelKind model =
                cell.family == "dcsbm" ? ModelKind::dcsbm : ModelKind::sbm;
            SelectionResult sel = select_K(g, cfg.K_max, backend, model, cfg.lambda_grid,
                                           substream_seed(rseed, 7));
            outcome[r] = sel.K_hat == cell.K ? 1 : 0;
        }, cfg.threads);
        SweepRow row;
        row.cell = cell;
        row.replications = cfg.replications;
        for (int o : outcome) row.successes += o;
        row.success_rate = static_cast<double>(row.successes) / cfg.replications;
        report.rows[c] = row;
    }
    return report;
}

struct NetworkAnalysis {
    EdgeListReport ingest;
    SelectionResult selection;
};

inline NetworkAnalysis analyze_network(const std::string& path, ModelKind model, int K_max,
                                       LikBackend backend,
                                       const std::vector<double>& lambda_grid,
                                       std::uint64_t seed) {
    NetworkAnalysis out;
    out.ingest = read_edge_list_report(path);
    out.selection = select_K(out.ingest.graph, K_max, backend, model, lambda_grid, seed);
    return out;
}

// ---- plot-ready CSV emitters ----

inline std::string gof_to_csv(const GofReport& rep) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "replication,scaled_statistic\n";
    for (std::size_t i = 0; i < rep.statistics.size(); ++i)
        os << i << ',' << rep.statistics[i] << '\n';
    return os.str();
}

inline std::string sweep_to_csv(const SweepReport& rep) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "family,K,rho,n,replications,successes,success_rate\n";
    for (const SweepRow& row : rep.rows)
        os << row.cell.family << ',' << row.cell.K << ',' << row.cell.rho << ','
           << row.cell.n << ',' << row.replications << ',' << row.successes << ','
           << row.success_rate << '\n';
    return os.str();
}

inline std::string labels_to_csv(const Labeling& lab, const std::vector<int>& original_ids) {
    std::ostringstream os;
    os << "node,label\n";
    for (int i = 0; i < lab.size(); ++i) {
        const int id = original_ids.empty() ? i : original_ids[i];
        os << id << ',' << lab.z[i] << '\n';
    }
    return os.str();
}

} // namespace sbmsel
