#include <doctest.h>

#include <cmath>
#include <random>

#include "sbmsel/graph.hpp"
#include "sbmsel/likelihood.hpp"
#include "sbmsel/sampling.hpp"

using namespace sbmsel;

namespace {

Graph random_graph(int n, double p, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (unif(rng) < p) edges.emplace_back(i, j);
    return Graph(n, std::move(edges));
}

BlockParams random_theta(int K, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.05, 0.95);
    std::vector<double> pi(K);
    double s = 0.0;
    for (double& p : pi) { p = unif(rng); s += p; }
    for (double& p : pi) p /= s;
    std::vector<std::vector<double>> H(K, std::vector<double>(K));
    for (int a = 0; a < K; ++a)
        for (int b = a; b < K; ++b) H[a][b] = H[b][a] = unif(rng);
    return BlockParams(std::move(pi), std::move(H));
}

// Independent per-pair oracle for log f(z, A; theta).
double pairwise_log_f(const Graph& g, const Labeling& lab, const BlockParams& theta) {
    double ll = 0.0;
    for (int i = 0; i < g.num_nodes(); ++i) ll += std::log(theta.pi[lab.z[i] - 1]);
    for (int i = 0; i < g.num_nodes(); ++i) {
        for (int j = 0; j < g.num_nodes(); ++j) {
            if (i == j) continue;
            const double h = theta.H[lab.z[i] - 1][lab.z[j] - 1];
            ll += 0.5 * (g.has_edge(i, j) ? std::log(h) : std::log(1.0 - h));
        }
    }
    return ll;
}

} // namespace

TEST_CASE("complete_log_lik: two nodes, one edge, single block") {
    Graph g(2, {{0, 1}});
    Labeling lab({1, 1}, 1);
    BlockParams theta({1.0}, {{0.5}});
    CHECK(complete_log_lik(count_stats(g, lab), theta) ==
          doctest::Approx(std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("complete_log_lik is invariant under simultaneous permutation") {
    Graph g = random_graph(9, 0.4, 3);
    Labeling lab = sample_labels({0.3, 0.3, 0.4}, 9, 4);
    BlockParams theta = random_theta(3, 5);

    std::vector<int> tau = {2, 3, 1};
    std::vector<int> z_perm(lab.z.size());
    for (std::size_t i = 0; i < z_perm.size(); ++i) z_perm[i] = tau[lab.z[i] - 1];
    BlockParams theta_perm = theta;
    for (int a = 0; a < 3; ++a) {
        theta_perm.pi[tau[a] - 1] = theta.pi[a];
        for (int b = 0; b < 3; ++b) theta_perm.H[tau[a] - 1][tau[b] - 1] = theta.H[a][b];
    }
    CHECK(complete_log_lik(count_stats(g, lab), theta) ==
          doctest::Approx(complete_log_lik(count_stats(g, Labeling(z_perm, 3)), theta_perm))
              .epsilon(1e-12));
}

TEST_CASE("complete_log_lik matches the per-pair product oracle") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Graph g = random_graph(6, 0.5, seed);
        Labeling lab = sample_labels({0.5, 0.5}, 6, seed + 50);
        BlockParams theta = random_theta(2, seed + 99);
        CHECK(complete_log_lik(count_stats(g, lab), theta) ==
              doctest::Approx(pairwise_log_f(g, lab, theta)).epsilon(1e-10));
    }
}

TEST_CASE("profile_mle: saturated and block-diagonal structures clamp") {
    // Complete graph, single block.
    std::vector<std::pair<int, int>> all;
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) all.emplace_back(i, j);
    Graph complete(5, all);
    BlockParams mle1 = profile_mle(count_stats(complete, Labeling({1, 1, 1, 1, 1}, 1)));
    CHECK(mle1.H[0][0] == doctest::Approx(1.0 - kClampEps));

    // Two disconnected 4-cliques with correct labels.
    std::vector<std::pair<int, int>> cliques;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            cliques.emplace_back(i, j);
            cliques.emplace_back(i + 4, j + 4);
        }
    Graph two(8, cliques);
    Labeling lab({1, 1, 1, 1, 2, 2, 2, 2}, 2);
    BlockParams mle2 = profile_mle(count_stats(two, lab));
    CHECK(mle2.H[0][0] == doctest::Approx(1.0 - kClampEps));
    CHECK(mle2.H[1][1] == doctest::Approx(1.0 - kClampEps));
    CHECK(mle2.H[0][1] == doctest::Approx(kClampEps));
}

TEST_CASE("profile_mle dominates random parameter draws") {
    Graph g = random_graph(8, 0.5, 11);
    Labeling lab = sample_labels({0.5, 0.5}, 8, 12);
    CountStats cs = count_stats(g, lab);
    const double at_mle = complete_log_lik(cs, profile_mle(cs));
    for (std::uint64_t s = 0; s < 100; ++s)
        CHECK(at_mle >= complete_log_lik(cs, random_theta(2, 1000 + s)) - 1e-9);
}

TEST_CASE("exhaustive_log_g: single-block case is the complete likelihood") {
    Graph g = random_graph(5, 0.5, 20);
    BlockParams theta({1.0}, {{0.4}});
    CHECK(exhaustive_log_g(g, theta, 1) ==
          doctest::Approx(complete_log_lik(count_stats(g, Labeling({1, 1, 1, 1, 1}, 1)), theta))
              .epsilon(1e-12));
}

TEST_CASE("exhaustive_log_g: n=2 symmetric model enumerates 4 equal labelings") {
    Graph g(2, {{0, 1}});
    BlockParams theta({0.5, 0.5}, {{0.3, 0.3}, {0.3, 0.3}});
    const double f = complete_log_lik(count_stats(g, Labeling({1, 1}, 2)), theta);
    // All 4 labelings give identical f, so log g = log 4 + log f.
    CHECK(exhaustive_log_g(g, theta, 2) == doctest::Approx(std::log(4.0) + f).epsilon(1e-12));
}

TEST_CASE("exhaustive_log_g: duplicating a block never decreases g") {
    Graph g = random_graph(5, 0.5, 33);
    BlockParams theta({1.0}, {{0.35}});
    BlockParams extended({0.5, 0.5}, {{0.35, 0.35}, {0.35, 0.35}});
    CHECK(exhaustive_log_g(g, extended, 2) >= exhaustive_log_g(g, theta, 1) - 1e-12);
}

TEST_CASE("exhaustive_log_g rejects instances beyond oracle scale") {
    Graph g = random_graph(30, 0.2, 1);
    BlockParams theta = random_theta(3, 2);
    CHECK_THROWS_AS(exhaustive_log_g(g, theta, 3), resource_limit_error);
}

TEST_CASE("dcsbm_profile_log_lik: star graph plug-in degree parameters") {
    Graph star(4, {{0, 1}, {0, 2}, {0, 3}});
    Labeling lab({1, 1, 1, 1}, 1);
    // omega = (2, 2/3, 2/3, 2/3); H_11 = 6/16.
    const double h = 6.0 / 16.0;
    double expected = 3.0 * std::log(2.0) + 3.0 * std::log(2.0 / 3.0);
    expected += 0.5 * (6.0 * std::log(h) - 16.0 * h);
    CHECK(dcsbm_profile_log_lik(star, lab) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("dcsbm_profile_log_lik: within-block-regular graph reduces to omega = 1") {
    // 6-cycle: every node has degree 2.
    Graph cycle(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}});
    Labeling lab({1, 1, 1, 1, 1, 1}, 1);
    const double h = 12.0 / 36.0;
    const double poisson_part = 0.5 * (12.0 * std::log(h) - 36.0 * h);
    CHECK(dcsbm_profile_log_lik(cycle, lab) == doctest::Approx(poisson_part).epsilon(1e-12));
}

TEST_CASE("dcsbm_profile_log_lik at true labels beats random labelings") {
    BlockParams theta({0.5, 0.5}, {{0.4, 0.02}, {0.02, 0.4}});  // strong signal
    auto [g, lab, deg] = sample_dcsbm(theta, 120, true, 8);
    const double at_truth = dcsbm_profile_log_lik(g, lab);
    Rng rng(99);
    std::uniform_int_distribution<int> pick(1, 2);
    for (int t = 0; t < 50; ++t) {
        std::vector<int> z(120);
        for (int& zi : z) zi = pick(rng);
        CHECK(at_truth >= dcsbm_profile_log_lik(g, Labeling(z, 2)));
    }
}
