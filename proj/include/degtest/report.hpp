#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "degtest/binary_tests.hpp"
#include "degtest/permutation_tests.hpp"
#include "degtest/score_model.hpp"

namespace degtest {

enum class ScoreMode { auto_detect, binary, continuous, threshold, winloss };
enum class OutputFormat { table, json, csv };

struct RunConfig {
  double alpha = 0.05;
  long long mc_rounds = 10000;     // max-drop simulation rounds
  long long permutations = 100000; // sign-flip permutations
  std::uint64_t seed = 0;
  PairPolicy pairing = PairPolicy::strict;
  ScoreMode score_mode = ScoreMode::auto_detect;
  double threshold = 0.5;
  OutputFormat output = OutputFormat::table;
  int threads = 1;
  bool smoothing = false;
};

struct TaskRow {
  std::string task;
  long long n = 0;
  long long b = 0;  // winloss counts on the continuous path
  long long c = 0;
  double accuracy_baseline = 0.0;
  double accuracy_candidate = 0.0;
  double delta = 0.0;
  double se_delta = 0.0;
  double flip_rate = 0.0;
  std::optional<double> degradation_prob;
  double p_value = 1.0;  // per-task mcnemar or perm_pooled
};

struct AggregateRow {
  long long n = 0;
  long long b = 0;
  long long c = 0;
  double accuracy_baseline = 0.0;
  double accuracy_candidate = 0.0;
  double delta = 0.0;
  double se_delta = 0.0;
  double flip_rate = 0.0;
  double p_pooled = 1.0;
  double p_max_drop = 1.0;
  double p_fisher = 1.0;
};

struct DegradationReport {
  bool continuous = false;  // permutation path taken
  std::vector<TaskRow> per_task;
  AggregateRow aggregate;
  RunConfig config;
  bool reject = false;
  double bonferroni_bound = 0.15;
  long long dropped_keys = 0;  // intersect pairing
};

// Full pipeline: ingest both dumps, collapse repeats, pair, run the binary or
// permutation battery depending on score_mode, and assemble the report.
DegradationReport run_compare(const std::string& baseline_path,
                              const std::string& candidate_path,
                              const RunConfig& config);

// Same battery on pre-built contingency tables (CSV ingestion path).
DegradationReport run_compare_tables(const std::vector<TaskTable>& tables,
                                     const RunConfig& config);

std::string report_json(const DegradationReport& report);
std::string report_csv(const DegradationReport& report);
std::string report_table(const DegradationReport& report);

}  // namespace degtest
