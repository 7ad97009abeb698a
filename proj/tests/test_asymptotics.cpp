#include <doctest.h>

#include <cmath>
#include <random>

#include "sbmsel/asymptotics.hpp"
#include "sbmsel/sampling.hpp"

using namespace sbmsel;

namespace {

BlockParams scenario_a() {
    return BlockParams({0.4, 0.6}, {{0.15, 0.05}, {0.05, 0.01}});
}

BlockParams scenario_b() {
    return BlockParams({0.4, 0.3, 0.3},
                       {{0.2, 0.1, 0.1}, {0.1, 0.2, 0.03}, {0.1, 0.03, 0.1}});
}

BlockParams random_theta(int K, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.05, 0.6);
    std::vector<double> pi(K);
    double s = 0.0;
    for (double& p : pi) { p = unif(rng); s += p; }
    for (double& p : pi) p /= s;
    std::vector<std::vector<double>> H(K, std::vector<double>(K));
    for (int a = 0; a < K; ++a)
        for (int b = a; b < K; ++b) H[a][b] = H[b][a] = unif(rng);
    return BlockParams(std::move(pi), std::move(H));
}

double bernoulli_kl(double p, double q) {
    return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

} // namespace

TEST_CASE("gamma function values") {
    CHECK(gamma_fn(0.5, 1) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
    CHECK(gamma_fn(1.0, 2) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(gamma_fn(0.15, 1) ==
          doctest::Approx(0.15 * std::log(0.15) + 0.85 * std::log(0.85)).epsilon(1e-12));
    CHECK(gamma_fn(0.15, 1) == doctest::Approx(-0.422709).epsilon(1e-5));
    CHECK_THROWS_AS(gamma_fn(0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(gamma_fn(1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(gamma_fn(0.0, 2), std::invalid_argument);
}

TEST_CASE("merge_params: equal-weight symmetric 2x2 pools to the mean") {
    auto [H, p] = merge_params({{0.3, 0.1}, {0.1, 0.3}}, {0.5, 0.5}, MergeSpec(1, 2));
    REQUIRE(p.size() == 1);
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(H[0][0] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("merge_params: scenario (a) merges to 0.0516") {
    BlockParams theta = scenario_a();
    auto [H, p] = merge_params(theta.H, theta.pi, MergeSpec(1, 2));
    CHECK(H[0][0] == doctest::Approx(0.0516).epsilon(1e-12));
}

TEST_CASE("merge_params preserves the grand mean") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        BlockParams theta = random_theta(4, seed);
        for (int a = 1; a <= 4; ++a) {
            for (int b = a + 1; b <= 4; ++b) {
                auto [H, p] = merge_params(theta.H, theta.pi, MergeSpec(a, b));
                double before = 0.0, after = 0.0;
                for (int c = 0; c < 4; ++c)
                    for (int d = 0; d < 4; ++d)
                        before += theta.pi[c] * theta.pi[d] * theta.H[c][d];
                for (std::size_t c = 0; c < p.size(); ++c)
                    for (std::size_t d = 0; d < p.size(); ++d)
                        after += p[c] * p[d] * H[c][d];
                CHECK(after == doctest::Approx(before).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("merge_labels relabeling rules") {
    Labeling Z({1, 2, 3}, 3);
    CHECK(merge_labels(Z, MergeSpec(2, 3)).z == std::vector<int>{1, 2, 2});
    CHECK(merge_labels(Z, MergeSpec(1, 2)).z == std::vector<int>{1, 1, 2});

    Labeling big = sample_labels({0.3, 0.3, 0.4}, 60, 5);
    Labeling merged = merge_labels(big, MergeSpec(1, 3));
    int n1 = 0, n_merged = 0;
    for (int zi : big.z)
        if (zi == 1 || zi == 3) ++n1;
    for (int zi : merged.z)
        if (zi == 1) ++n_merged;
    CHECK(n_merged == n1);
}

TEST_CASE("D_value: K=2 collapses to gamma of the merged scalar") {
    BlockParams theta = scenario_a();
    for (int variant : {1, 2}) {
        const double rho = variant == 2 ? theta.effective_rho() : 1.0;
        CHECK(D_value(theta, MergeSpec(1, 2), variant) ==
              doctest::Approx(gamma_fn(0.0516 / rho, variant)).epsilon(1e-12));
    }
}

TEST_CASE("D_value equals gamma evaluated on merge_params output") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        BlockParams theta = random_theta(3, 40 + seed);
        auto [H, p] = merge_params(theta.H, theta.pi, MergeSpec(1, 3));
        double expected = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k)
            for (std::size_t l = 0; l < p.size(); ++l)
                expected += p[k] * p[l] * gamma_fn(H[k][l], 1);
        CHECK(D_value(theta, MergeSpec(1, 3), 1) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("D_value is invariant under simultaneous block permutation") {
    BlockParams theta = scenario_b();
    // Swap blocks 1 and 3; merging (1,2) before equals merging (2,3) after.
    BlockParams perm({0.3, 0.3, 0.4},
                     {{0.1, 0.03, 0.1}, {0.03, 0.2, 0.1}, {0.1, 0.1, 0.2}});
    CHECK(D_value(theta, MergeSpec(1, 2), 1) ==
          doctest::Approx(D_value(perm, MergeSpec(2, 3), 1)).epsilon(1e-12));
}

TEST_CASE("optimal_merge: K=2 and brute-force fixture for scenario (b)") {
    CHECK(optimal_merge(scenario_a(), 2).spec.a == 1);
    CHECK(optimal_merge(scenario_a(), 2).unique);

    BlockParams theta = scenario_b();
    for (int variant : {1, 2}) {
        OptimalMerge om = optimal_merge(theta, variant);
        // Brute-force argmax over the three pairs.
        MergeSpec best(1, 2);
        double best_val = -1e300;
        for (int a = 1; a <= 3; ++a)
            for (int b = a + 1; b <= 3; ++b)
                if (D_value(theta, MergeSpec(a, b), variant) > best_val) {
                    best_val = D_value(theta, MergeSpec(a, b), variant);
                    best = MergeSpec(a, b);
                }
        CHECK(om.spec.a == best.a);
        CHECK(om.spec.b == best.b);
        CHECK(om.unique);
        CHECK(om.identifiable);
    }
}

TEST_CASE("optimal_merge flags identical merged columns") {
    // Merging the two identical blocks of a 3-block model leaves a 2x2 S'
    // with identical columns.
    BlockParams theta({0.25, 0.25, 0.5},
                      {{0.2, 0.2, 0.2}, {0.2, 0.2, 0.2}, {0.2, 0.2, 0.2}});
    OptimalMerge om = optimal_merge(theta, 1);
    CHECK_FALSE(om.identifiable);
}

TEST_CASE("kl_merge_leading: merging identical blocks loses nothing") {
    BlockParams theta({0.3, 0.3, 0.4},
                      {{0.2, 0.2, 0.05}, {0.2, 0.2, 0.05}, {0.05, 0.05, 0.3}});
    CHECK(kl_merge_leading(theta, 100, MergeSpec(1, 2), 1) ==
          doctest::Approx(0.0).epsilon(1e-9));
    CHECK(kl_merge_leading(scenario_a(), 500, MergeSpec(1, 2), 1) > 0.0);
}

TEST_CASE("kl_merge_leading vs the exact pairwise-KL oracle grows linearly") {
    BlockParams theta = scenario_a();
    for (int n : {50, 100, 200}) {
        // Fixed labels with exact proportions p = (0.4, 0.6).
        std::vector<int> z(n);
        for (int i = 0; i < n; ++i) z[i] = i < static_cast<int>(0.4 * n) ? 1 : 2;
        Labeling Z(z, 2);
        auto [H_merged, p_merged] = merge_params(theta.H, theta.pi, MergeSpec(1, 2));
        Labeling Zp = merge_labels(Z, MergeSpec(1, 2));
        double exact = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                exact += bernoulli_kl(theta.H[Z.z[i] - 1][Z.z[j] - 1],
                                      H_merged[Zp.z[i] - 1][Zp.z[j] - 1]);
        const double leading = kl_merge_leading(theta, n, MergeSpec(1, 2), 1);
        CHECK(std::abs(exact - leading) / n < 1.0);
    }
}

TEST_CASE("limit_law: fully symmetric case has zero variance") {
    BlockParams theta({0.5, 0.5}, {{0.2, 0.05}, {0.05, 0.2}});
    for (Regime regime : {Regime::dense, Regime::sparse}) {
        LimitLaw law = limit_law(theta, 500, regime);
        CHECK(law.sigma2 == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("limit_law: homogeneous model zeroes J on untouched blocks") {
    BlockParams theta({0.25, 0.25, 0.25, 0.25},
                      {{0.2, 0.05, 0.05, 0.05},
                       {0.05, 0.2, 0.05, 0.05},
                       {0.05, 0.05, 0.2, 0.05},
                       {0.05, 0.05, 0.05, 0.2}});
    // All merges tie in a homogeneous model, so fix the canonical one.
    LimitLaw law = limit_law_for_merge(theta, 500, Regime::dense, MergeSpec(3, 4));
    CHECK(std::abs(law.J[0]) < 1e-12);
    CHECK(std::abs(law.J[1]) < 1e-12);
}

TEST_CASE("limit_law throws on assumption violations") {
    const double third = 1.0 / 3.0;
    BlockParams homogeneous({third, third, third},
                            {{0.2, 0.05, 0.05}, {0.05, 0.2, 0.05}, {0.05, 0.05, 0.2}});
    // All blocks are exchangeable, so every merge ties for the optimum.
    CHECK_THROWS_AS(limit_law(homogeneous, 500, Regime::dense), assumption_violation);
}

TEST_CASE("limit_law sign and variance properties over a random grid") {
    int checked = 0;
    for (std::uint64_t seed = 0; checked < 50; ++seed) {
        BlockParams theta = random_theta(2 + static_cast<int>(seed % 3), seed);
        OptimalMerge om = optimal_merge(theta, 2);
        if (!om.unique || !om.identifiable) continue;
        ++checked;
        LimitLaw sparse_law = limit_law(theta, 400, Regime::sparse);
        CHECK(sparse_law.sigma2 >= 0.0);
        // Same merge, both regimes: mu_1 < 0 by strict convexity of gamma_1,
        // and the O(1/n) proportion-entropy correction is nonnegative by
        // superadditivity of x log x, so mu_2 >= mu_1.
        LimitLaw dense_law = limit_law_for_merge(theta, 400, Regime::dense, om.spec);
        CHECK(dense_law.sigma2 >= 0.0);
        CHECK(dense_law.mu < 0.0);
        CHECK(sparse_law.mu >= dense_law.mu);
    }
}

namespace {

// Population value of the scaled statistic as a function of the block
// proportions: 0.5 * (D_i(p) - grand_i(p)) with the connectivity fixed.
double merge_gap_fn(const std::vector<double>& p, const std::vector<std::vector<double>>& M,
                    const MergeSpec& spec, int variant) {
    auto [Mm, pm] = merge_params(M, p, spec);
    double D = 0.0;
    for (std::size_t k = 0; k < pm.size(); ++k)
        for (std::size_t l = 0; l < pm.size(); ++l)
            D += pm[k] * pm[l] * gamma_fn(Mm[k][l], variant);
    double G = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c)
        for (std::size_t d = 0; d < p.size(); ++d)
            G += p[c] * p[d] * gamma_fn(M[c][d], variant);
    return 0.5 * (D - G);
}

} // namespace

TEST_CASE("limit_law: J matches finite differences of the merge gap") {
    // Within-simplex directional derivatives along e_b - e_c must agree with
    // J_b - J_c; the off-simplex extension is irrelevant because the
    // multinomial covariance annihilates constant shifts.
    for (std::uint64_t seed : {3u, 11u, 27u}) {
        BlockParams theta = random_theta(3, 500 + seed);
        for (Regime regime : {Regime::dense, Regime::sparse}) {
            const int variant = regime == Regime::sparse ? 2 : 1;
            std::vector<std::vector<double>> M = theta.H;
            if (variant == 2) {
                const double rho = theta.effective_rho();
                for (auto& row : M)
                    for (double& v : row) v /= rho;
            }
            const MergeSpec spec(1, 2);
            LimitLaw law = limit_law_for_merge(theta, 400, regime, spec);
            const double h = 1e-6;
            for (int b = 0; b < 3; ++b) {
                for (int c = b + 1; c < 3; ++c) {
                    auto up = theta.pi, dn = theta.pi;
                    up[b] += h; up[c] -= h;
                    dn[b] -= h; dn[c] += h;
                    const double fd = (merge_gap_fn(up, M, spec, variant) -
                                       merge_gap_fn(dn, M, spec, variant)) / (2.0 * h);
                    CHECK(law.J[b] - law.J[c] == doctest::Approx(fd).epsilon(1e-4));
                }
            }
        }
    }
}

TEST_CASE("limit_law: finite-sample variance dominates and decays") {
    BlockParams theta = scenario_a();
    LimitLaw small = limit_law(theta, 200, Regime::sparse);
    LimitLaw big = limit_law(theta, 3200, Regime::sparse);
    CHECK(small.sigma2_fs > small.sigma2);
    CHECK(big.sigma2_fs > big.sigma2);
    CHECK(big.sigma2_fs - big.sigma2 ==
          doctest::Approx((small.sigma2_fs - small.sigma2) / 16.0).epsilon(1e-12));
}

TEST_CASE("log_lik_ratio: identical models give exactly zero") {
    BlockParams theta({0.5, 0.5}, {{0.2, 0.05}, {0.05, 0.2}});
    auto [g, lab] = sample_sbm(theta, 60, 3);
    CHECK(log_lik_ratio(g, 2, 2, LikBackend::variational, 1) == 0.0);
    CHECK(log_lik_ratio(g, 2, 2, LikBackend::plugin, 1) == 0.0);
}

TEST_CASE("log_lik_ratio: underfitting statistic is negative") {
    BlockParams theta = scenario_a();
    int negative = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto [g, lab] = sample_sbm(theta, 300, 600 + seed);
        if (log_lik_ratio(g, 2, 1, LikBackend::variational, seed) < 0.0) ++negative;
    }
    CHECK(negative >= 9);
}

TEST_CASE("log_lik_ratio: exhaustive backend at oracle scale") {
    BlockParams theta({0.5, 0.5}, {{0.6, 0.1}, {0.1, 0.6}});
    auto [g, lab] = sample_sbm(theta, 8, 4);
    // K=1 vs K'=2: more blocks can only help the exhaustive likelihood here.
    const double L = log_lik_ratio(g, 1, 2, LikBackend::exhaustive, 1);
    CHECK(std::isfinite(L));
    Graph big(30, {{0, 1}});
    CHECK_THROWS_AS(log_lik_ratio(big, 1, 2, LikBackend::exhaustive, 1),
                    resource_limit_error);
}
