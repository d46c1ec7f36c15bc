#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "degtest/binary_tests.hpp"
#include "degtest/rng.hpp"
#include "degtest/score_model.hpp"

namespace degtest {

enum class Scenario { null_hypothesis, balanced, single_task };

std::string scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);

struct ScenarioSpec {
  Scenario scenario = Scenario::null_hypothesis;
  std::vector<int> t_range = {1, 5, 10, 20};
  long long n_min = 500;
  long long n_max = 10000;
  double p_flip = 0.1;
  // Degradation probability under the alternative; null uses 0.5, balanced
  // applies q_alt to every task, single_task only to the first.
  double q_balanced = 0.52;
  double q_single = 0.58;
  long long trials = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  long long mc_rounds = 10000;  // max-drop simulation rounds per trial
  int threads = 1;
};

struct RejectionPoint {
  int t = 0;
  double rate = 0.0;
  double se = 0.0;  // sqrt(r(1-r)/trials)
};

struct RejectionCurve {
  std::string method;
  std::vector<RejectionPoint> points;
};

// Draws one synthetic table: n_flips ~ Binomial(n, p_flip),
// b ~ Binomial(n_flips, q), c = n_flips - b. The a/d split is irrelevant to
// every implemented test; fixed as a = 0, d = remainder.
ContingencyTable simulate_task(long long n, double p_flip, double q, RngStream& rng);

// Rejection curves for pooled, fisher, max_drop and the combined decision.
std::vector<RejectionCurve> run_scenario(const ScenarioSpec& spec);

// scenario,method,T,rejection_rate,se
std::string scenario_csv(const ScenarioSpec& spec, const std::vector<RejectionCurve>& curves);
std::string scenario_json(const ScenarioSpec& spec, const std::vector<RejectionCurve>& curves);

}  // namespace degtest
