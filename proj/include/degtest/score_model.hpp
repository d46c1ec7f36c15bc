#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace degtest {

struct SampleScore {
  std::string task;
  std::string doc_id;
  int run = 0;
  double score = 0.0;  // in [0,1]
};

// Paired per-document scores for one task, sorted by doc_id.
struct PairedScoreSet {
  std::string task;
  struct Pair {
    std::string doc_id;
    double baseline;
    double candidate;
  };
  std::vector<Pair> pairs;
};

// 2x2 table of joint outcomes: a both fail, b baseline-only succeeds,
// c candidate-only succeeds, d both succeed.
struct ContingencyTable {
  long long a = 0;
  long long b = 0;
  long long c = 0;
  long long d = 0;

  long long n() const { return a + b + c + d; }
  long long n_flips() const { return b + c; }
};

struct TaskTable {
  std::string task;
  ContingencyTable table;
};

struct TableStats {
  long long n_total = 0;
  double accuracy_baseline = 0.0;   // (b+d)/N
  double accuracy_candidate = 0.0;  // (c+d)/N
  double delta = 0.0;               // (b-c)/N
  double se_delta = 0.0;            // sqrt((p_flip - delta^2)/N)
  double flip_rate = 0.0;           // (b+c)/N
  std::optional<double> degradation_prob;  // b/(b+c), absent when b+c = 0
  long long n_flips = 0;
};

class MismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class EmptyTaskError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NonBinaryScoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PairPolicy { strict, intersect };

struct PairingResult {
  std::vector<PairedScoreSet> tasks;
  long long dropped = 0;  // keys discarded under intersect
};

// Joins two score dumps on (task, doc_id), collapsing repeated runs to their
// mean first. Under strict policy the key sets must be identical; under
// intersect only common keys are kept and the dropped count reported.
PairingResult pair_scores(const std::vector<SampleScore>& baseline,
                          const std::vector<SampleScore>& candidate,
                          PairPolicy policy);

// Collapses repeated runs of the same (task, doc_id) to their mean score.
std::vector<SampleScore> aggregate_repeats(const std::vector<SampleScore>& scores);

// Requires every score to be exactly 0.0 or 1.0.
ContingencyTable contingency_from_binary(const PairedScoreSet& pairs);

struct ContinuousTableMode {
  enum Kind { threshold, winloss } kind = winloss;
  double theta = 0.5;  // threshold mode only
};

// Reduces continuous scores to a contingency table. Lossy relative to the
// permutation tests; ties in winloss mode count as agreement (cell a).
ContingencyTable contingency_from_continuous(const PairedScoreSet& pairs,
                                             ContinuousTableMode mode);

TableStats table_stats(const ContingencyTable& t);

}  // namespace degtest
