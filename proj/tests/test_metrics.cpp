// ---------------------------------------------------------------
// Metrics: MSE/R^2, precision-recall area, clustering agreement,
// assignment. Frozen values plus brute-force cross-checks.
// ---------------------------------------------------------------

#include "oracles.hpp"
#include "sgmtl/metrics.hpp"
#include "sgmtl/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace sgmtl;

TEST_CASE("mse_r2 at specific points") {
  Eigen::VectorXd targets(4);
  targets << 1.0, 2.0, 3.0, 4.0;

  SUBCASE("perfect predictions") {
    const auto [mse, r2] = mse_r2(targets, targets);
    CHECK(mse == 0.0);
    CHECK(r2 == doctest::Approx(1.0));
  }
  SUBCASE("the mean predictor has zero R^2") {
    Eigen::VectorXd mean = Eigen::VectorXd::Constant(4, 2.5);
    const auto [mse, r2] = mse_r2(mean, targets);
    CHECK(mse == doctest::Approx(1.25));  // ((1.5^2 + 0.5^2) * 2) / 4
    CHECK(r2 == doctest::Approx(0.0));
  }
  SUBCASE("hand-computed case") {
    Eigen::VectorXd preds(2), tgts(2);
    preds << 0.0, 0.0;
    tgts << 1.0, -1.0;
    const auto [mse, r2] = mse_r2(preds, tgts);
    CHECK(mse == doctest::Approx(1.0));
    CHECK(r2 == doctest::Approx(0.0));  // SSE = SST = 2
  }
  SUBCASE("worse than the mean goes negative") {
    Eigen::VectorXd bad(4);
    bad << 4.0, 3.0, 2.0, 1.0;
    const auto [mse, r2] = mse_r2(bad, targets);
    CHECK(r2 < 0.0);
  }
  SUBCASE("degenerate targets") {
    Eigen::VectorXd flat = Eigen::VectorXd::Constant(4, 3.0);
    CHECK_THROWS_AS(mse_r2(targets, flat), DegenerateTargets);
  }
  SUBCASE("length mismatch and tiny input") {
    Eigen::VectorXd three(3);
    three << 1, 2, 3;
    CHECK_THROWS_AS(mse_r2(three, targets), DimensionMismatch);
    Eigen::VectorXd one(1);
    one << 1;
    CHECK_THROWS_AS(mse_r2(one, one), TooFewExamples);
  }
}

TEST_CASE("auc_pr at specific points") {
  SUBCASE("perfect ranking") {
    Eigen::VectorXd scores(4), labels(4);
    scores << 0.9, 0.8, 0.2, 0.1;
    labels << 1, 1, -1, -1;
    CHECK(auc_pr(scores, labels) == doctest::Approx(1.0));
  }
  SUBCASE("all scores tied gives the prevalence") {
    Eigen::VectorXd scores = Eigen::VectorXd::Constant(4, 0.5);
    Eigen::VectorXd labels(4);
    labels << 1, -1, -1, -1;
    CHECK(auc_pr(scores, labels) == doctest::Approx(0.25));
  }
  SUBCASE("hand-computed interleaved case") {
    // Descending scores with labels +, -, +, -:
    //   threshold 1: P = 1,   R = 0.5 -> area 0.5
    //   threshold 3: P = 2/3, R = 1.0 -> area + 0.5 * 2/3 = 5/6.
    Eigen::VectorXd scores(4), labels(4);
    scores << 4, 3, 2, 1;
    labels << 1, -1, 1, -1;
    CHECK(auc_pr(scores, labels) == doctest::Approx(5.0 / 6.0));
  }
  SUBCASE("errors") {
    Eigen::VectorXd scores(2), labels(2);
    scores << 1, 2;
    labels << -1, -1;
    CHECK_THROWS_AS(auc_pr(scores, labels), NoPositives);
    labels << 0.5, 1;
    CHECK_THROWS_AS(auc_pr(scores, labels), BadLabels);
    Eigen::VectorXd one(1);
    one << 1;
    CHECK_THROWS_AS(auc_pr(scores, one), DimensionMismatch);
  }
}

TEST_CASE("auc_pr matches the brute-force area on random cases with ties") {
  Rng rng(2024);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 5 + static_cast<int>(rng.uniform_index(40));
    Eigen::VectorXd scores(n), labels(n);
    bool has_positive = false;
    for (int i = 0; i < n; ++i) {
      // Quantized scores so ties actually occur.
      scores[i] = std::round(rng.normal() * 4.0) / 4.0;
      labels[i] = rng.uniform() < 0.4 ? 1.0 : -1.0;
      has_positive |= labels[i] == 1.0;
    }
    if (!has_positive) labels[0] = 1.0;
    CHECK(auc_pr(scores, labels) ==
          doctest::Approx(oracles::auc_pr_brute(scores, labels)).epsilon(1e-12));
  }
}

TEST_CASE("group_recovery at specific points") {
  SUBCASE("identical labelings") {
    const std::vector<int> a = {0, 0, 1, 1, 2, 2};
    const GroupRecovery rec = group_recovery(a, a);
    CHECK(rec.ari == doctest::Approx(1.0));
    CHECK(rec.best_perm_accuracy == doctest::Approx(1.0));
  }
  SUBCASE("relabeled partitions are still perfect") {
    const std::vector<int> a = {0, 0, 1, 1, 2, 2};
    const std::vector<int> b = {5, 5, 9, 9, 1, 1};
    const GroupRecovery rec = group_recovery(a, b);
    CHECK(rec.ari == doctest::Approx(1.0));
    CHECK(rec.best_perm_accuracy == doctest::Approx(1.0));
  }
  SUBCASE("one big cluster against a split") {
    const std::vector<int> a = {0, 0, 0, 0};
    const std::vector<int> b = {0, 0, 1, 1};
    const GroupRecovery rec = group_recovery(a, b);
    CHECK(rec.ari == doctest::Approx(0.0));
    CHECK(rec.best_perm_accuracy == doctest::Approx(0.5));
  }
  SUBCASE("single pair disagreement, hand-counted") {
    const std::vector<int> a = {0, 0, 1, 1};
    const std::vector<int> b = {0, 0, 0, 1};
    const GroupRecovery rec = group_recovery(a, b);
    CHECK(rec.ari == doctest::Approx(oracles::ari_pairs(a, b)).epsilon(1e-12));
    CHECK(rec.best_perm_accuracy == doctest::Approx(0.75));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(group_recovery({0, 1}, {0}), DimensionMismatch);
    CHECK_THROWS_AS(group_recovery({}, {}), DimensionMismatch);
  }
}

TEST_CASE("group_recovery matches brute force on random labelings") {
  Rng rng(909);
  for (int rep = 0; rep < 120; ++rep) {
    const int n = 4 + static_cast<int>(rng.uniform_index(12));
    const int ka = 1 + static_cast<int>(rng.uniform_index(4));
    const int kb = 1 + static_cast<int>(rng.uniform_index(4));
    std::vector<int> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      a[static_cast<std::size_t>(i)] = static_cast<int>(rng.uniform_index(ka));
      b[static_cast<std::size_t>(i)] = static_cast<int>(rng.uniform_index(kb));
    }
    const GroupRecovery rec = group_recovery(a, b);
    CHECK(rec.ari == doctest::Approx(oracles::ari_pairs(a, b)).epsilon(1e-12));

    // Best-permutation accuracy by enumerating label matchings directly.
    std::vector<int> labels_a(a), labels_b(b);
    std::sort(labels_a.begin(), labels_a.end());
    labels_a.erase(std::unique(labels_a.begin(), labels_a.end()), labels_a.end());
    std::sort(labels_b.begin(), labels_b.end());
    labels_b.erase(std::unique(labels_b.begin(), labels_b.end()), labels_b.end());
    const std::size_t k = std::max(labels_a.size(), labels_b.size());
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    int best_hits = 0;
    do {
      int hits = 0;
      for (int i = 0; i < n; ++i) {
        const auto ai = static_cast<std::size_t>(
            std::find(labels_a.begin(), labels_a.end(), a[static_cast<std::size_t>(i)]) -
            labels_a.begin());
        const auto bi = static_cast<std::size_t>(
            std::find(labels_b.begin(), labels_b.end(), b[static_cast<std::size_t>(i)]) -
            labels_b.begin());
        if (perm[ai] == static_cast<int>(bi)) ++hits;
      }
      best_hits = std::max(best_hits, hits);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(rec.best_perm_accuracy ==
          doctest::Approx(static_cast<double>(best_hits) / n).epsilon(1e-12));
  }
}

TEST_CASE("min_cost_assignment at a hand-checked point") {
  Eigen::MatrixXd cost(3, 3);
  cost << 4, 1, 3,  //
      2, 0, 5,      //
      3, 2, 2;
  const std::vector<int> cols = min_cost_assignment(cost);
  double total = 0.0;
  for (int i = 0; i < 3; ++i) total += cost(i, cols[static_cast<std::size_t>(i)]);
  CHECK(total == doctest::Approx(5.0));  // 1 + 2 + 2
}

TEST_CASE("min_cost_assignment matches exhaustive search") {
  Rng rng(112);
  for (int rep = 0; rep < 60; ++rep) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.uniform_index(7));
    Eigen::MatrixXd cost(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = rng.normal();
    const std::vector<int> cols = min_cost_assignment(cost);

    // Valid permutation.
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = cols[static_cast<std::size_t>(i)];
      REQUIRE(c >= 0);
      REQUIRE(c < n);
      CHECK(!used[static_cast<std::size_t>(c)]);
      used[static_cast<std::size_t>(c)] = true;
      total += cost(i, c);
    }
    CHECK(total == doctest::Approx(oracles::assignment_brute(cost)).epsilon(1e-9));
  }
}
