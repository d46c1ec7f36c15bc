#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "degtest/binary_tests.hpp"
#include "degtest/permutation_tests.hpp"
#include "degtest/rng.hpp"

using namespace degtest;

namespace {

// Binary paired data as a diff vector: +1 x b, -1 x c, 0 x agreements.
DiffVector binary_diffs(const std::string& task, long long b, long long c, long long agree) {
  DiffVector dv;
  dv.task = task;
  dv.diffs.assign(static_cast<size_t>(b), 1.0);
  dv.diffs.insert(dv.diffs.end(), static_cast<size_t>(c), -1.0);
  dv.diffs.insert(dv.diffs.end(), static_cast<size_t>(agree), 0.0);
  return dv;
}

}  // namespace

TEST_CASE("perm_pooled degenerate all-zero diffs") {
  PermOptions opts;
  opts.permutations = 1000;
  const std::vector<double> zeros(50, 0.0);
  const auto r = perm_pooled(zeros, opts);
  CHECK(r.p_value == 1.0);
  CHECK(r.degenerate);
}

TEST_CASE("perm_pooled agrees with exact binomial test on binary data") {
  PermOptions opts;
  opts.permutations = 100000;
  opts.seed = 21;
  RngStream rng(8, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const long long flips = 60 + rng.uniform_int(0, 200);
    const long long b = rng.fair_binomial(flips);
    const auto dv = binary_diffs("t", b, flips - b, 500);
    const double exact = mcnemar_exact(b, flips - b).p_value;
    const double perm = perm_pooled(dv.diffs, opts).p_value;
    CHECK(std::fabs(perm - exact) <= 0.005);
  }
}

TEST_CASE("perm_pooled deterministic and bounded below") {
  PermOptions opts;
  opts.permutations = 2000;
  opts.seed = 4;
  std::vector<double> diffs(100, 0.05);  // every doc degraded
  const auto r1 = perm_pooled(diffs, opts);
  const auto r2 = perm_pooled(diffs, opts);
  CHECK(r1.p_value == r2.p_value);
  CHECK(r1.p_value == doctest::Approx(1.0 / (opts.permutations + 1)));

  PermOptions threaded = opts;
  threaded.threads = 4;
  CHECK(perm_pooled(diffs, threaded).p_value == r1.p_value);
}

TEST_CASE("perm_fisher T=1 df=2 identity") {
  PermOptions opts;
  opts.permutations = 20000;
  opts.seed = 6;
  std::vector<DiffVector> tasks = {binary_diffs("only", 40, 25, 100)};
  const auto fisher = perm_fisher(tasks, opts);
  // chi2_sf(-2 ln p, 2) = p exactly, so the combined p equals the per-task p;
  // the per-task stream is keyed by the task name
  CHECK(fisher.p_value > 0.0);
  CHECK(fisher.p_value < 1.0);
  const double per_task_chi2 = fisher.statistic;
  CHECK(std::exp(-0.5 * per_task_chi2) == doctest::Approx(fisher.p_value).epsilon(1e-10));
}

TEST_CASE("perm_fisher all-zero tasks give p = 1") {
  PermOptions opts;
  opts.permutations = 500;
  std::vector<DiffVector> tasks = {{"a", std::vector<double>(10, 0.0)},
                                   {"b", std::vector<double>(20, 0.0)}};
  const auto r = perm_fisher(tasks, opts);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == 1.0);
}

TEST_CASE("perm_fisher task order invariance") {
  PermOptions opts;
  opts.permutations = 5000;
  opts.seed = 12;
  std::vector<DiffVector> ab = {binary_diffs("alpha", 30, 20, 50),
                                binary_diffs("beta", 10, 14, 40)};
  std::vector<DiffVector> ba = {ab[1], ab[0]};
  CHECK(perm_fisher(ab, opts).p_value == perm_fisher(ba, opts).p_value);
}

TEST_CASE("perm_max_drop epsilon floor path") {
  PermOptions opts;
  opts.permutations = 3000;
  opts.seed = 2;
  std::vector<DiffVector> tasks = {{"t", std::vector<double>(20, 0.1)}};
  const auto r = perm_max_drop(tasks, opts);
  CHECK(r.p_value == doctest::Approx(1.0 / (opts.permutations + 1)));
  CHECK(r.statistic > 1e6);  // sigma collapsed to the epsilon floor
}

TEST_CASE("perm_max_drop rejects single-document tasks") {
  PermOptions opts;
  std::vector<DiffVector> tasks = {{"tiny", {0.3}}};
  CHECK_THROWS_AS(perm_max_drop(tasks, opts), TaskTooSmallError);
}

TEST_CASE("perm_max_drop close to binary max_drop on binary data") {
  PermOptions opts;
  opts.permutations = 100000;
  opts.seed = 31;
  const long long b = 55;
  const long long c = 45;
  std::vector<DiffVector> tasks = {binary_diffs("t", b, c, 400)};
  const auto perm = perm_max_drop(tasks, opts);

  MaxDropOptions md;
  md.rounds = 100000;
  md.seed = 31;
  const std::vector<ContingencyTable> tables = {{0, b, c, 400}};
  const auto binary = max_drop_test(tables, md);
  CHECK(std::fabs(perm.p_value - binary.p_value) <= 0.005);
}

TEST_CASE("perm_max_drop spotlights the degraded task") {
  PermOptions opts;
  opts.permutations = 20000;
  opts.seed = 9;
  RngStream rng(14, 3);
  // one clearly degraded task plus one pure-noise task
  DiffVector degraded{"bad", {}};
  DiffVector noise{"noise", {}};
  for (int i = 0; i < 300; ++i) {
    degraded.diffs.push_back(0.02 + 0.3 * (rng.uniform() - 0.5));
    noise.diffs.push_back(0.5 * (rng.uniform() - 0.5));
  }
  for (int i = 0; i < 2000; ++i) noise.diffs.push_back(0.5 * (rng.uniform() - 0.5));
  std::vector<DiffVector> tasks = {degraded, noise};
  const double p_max = perm_max_drop(tasks, opts).p_value;
  std::vector<double> pooled;
  for (const auto& t : tasks) pooled.insert(pooled.end(), t.diffs.begin(), t.diffs.end());
  const double p_pool = perm_pooled(pooled, opts).p_value;
  CHECK(p_max < p_pool);
}

TEST_CASE("property: p bounded in [1/(m+1), 1]") {
  PermOptions opts;
  opts.permutations = 999;
  RngStream rng(5, 5);
  for (int trial = 0; trial < 20; ++trial) {
    opts.seed = trial;
    std::vector<double> diffs;
    for (int i = 0; i < 40; ++i) diffs.push_back(rng.uniform() - 0.5);
    const double p = perm_pooled(diffs, opts).p_value;
    CHECK(p >= 1.0 / (opts.permutations + 1) - 1e-12);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("property: sign flip roughly complements p") {
  PermOptions opts;
  opts.permutations = 4000;
  RngStream rng(6, 6);
  int holds = 0;
  const int trials = 60;
  for (int trial = 0; trial < trials; ++trial) {
    opts.seed = 1000 + trial;
    std::vector<double> diffs;
    std::vector<double> negated;
    for (int i = 0; i < 80; ++i) {
      const double d = rng.uniform() - 0.5;  // symmetric null
      diffs.push_back(d);
      negated.push_back(-d);
    }
    const double p = perm_pooled(diffs, opts).p_value;
    const double p_neg = perm_pooled(negated, opts).p_value;
    if (p_neg >= 1.0 - p) ++holds;
  }
  CHECK(holds >= static_cast<int>(0.95 * trials));
}

TEST_CASE("type-I control on continuous null") {
  PermOptions opts;
  opts.permutations = 400;
  RngStream rng(31, 7);
  const int trials = 1000;
  int rejects = 0;
  for (int trial = 0; trial < trials; ++trial) {
    opts.seed = 50000 + trial;
    std::vector<double> diffs;
    for (int i = 0; i < 60; ++i) diffs.push_back(rng.uniform() - 0.5);
    if (perm_pooled(diffs, opts).p_value < 0.05) ++rejects;
  }
  CHECK(static_cast<double>(rejects) / trials <= 0.0707);
}
