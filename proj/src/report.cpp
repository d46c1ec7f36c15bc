#include "degtest/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "degtest/ingest.hpp"
#include "degtest/rng.hpp"

namespace degtest {

namespace {

using nlohmann::ordered_json;

// Round to 6 significant digits so emitted reports are byte-stable.
double round_p(double p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.5e", p);
  return std::strtod(buf, nullptr);
}

std::string sci(double p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", p);
  return buf;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", 100.0 * v);
  return buf;
}

bool all_binary(const std::vector<PairedScoreSet>& tasks) {
  for (const auto& set : tasks) {
    for (const auto& p : set.pairs) {
      if ((p.baseline != 0.0 && p.baseline != 1.0) ||
          (p.candidate != 0.0 && p.candidate != 1.0)) {
        return false;
      }
    }
  }
  return true;
}

TestResult safe_max_drop(std::span<const ContingencyTable> tables, const MaxDropOptions& opts) {
  bool any_flips = false;
  for (const auto& t : tables) {
    if (t.n_flips() > 0) any_flips = true;
  }
  if (!any_flips) {
    TestResult r;
    r.method = Method::max_drop;
    r.degenerate = true;
    r.p_value = 1.0;
    return r;
  }
  return max_drop_test(tables, opts);
}

DegradationReport binary_battery(const std::vector<TaskTable>& tables, const RunConfig& config) {
  DegradationReport report;
  report.config = config;
  report.continuous = false;

  ContingencyTable total;
  std::vector<ContingencyTable> plain;
  plain.reserve(tables.size());
  for (const auto& tt : tables) {
    const TableStats stats = table_stats(tt.table);
    const TestResult per_task = mcnemar_exact(tt.table.b, tt.table.c);
    TaskRow row;
    row.task = tt.task;
    row.n = stats.n_total;
    row.b = tt.table.b;
    row.c = tt.table.c;
    row.accuracy_baseline = stats.accuracy_baseline;
    row.accuracy_candidate = stats.accuracy_candidate;
    row.delta = stats.delta;
    row.se_delta = stats.se_delta;
    row.flip_rate = stats.flip_rate;
    row.degradation_prob = stats.degradation_prob;
    row.p_value = round_p(per_task.p_value);
    report.per_task.push_back(std::move(row));

    total.a += tt.table.a;
    total.b += tt.table.b;
    total.c += tt.table.c;
    total.d += tt.table.d;
    plain.push_back(tt.table);
  }

  const TableStats agg = table_stats(total);
  report.aggregate.n = agg.n_total;
  report.aggregate.b = total.b;
  report.aggregate.c = total.c;
  report.aggregate.accuracy_baseline = agg.accuracy_baseline;
  report.aggregate.accuracy_candidate = agg.accuracy_candidate;
  report.aggregate.delta = agg.delta;
  report.aggregate.se_delta = agg.se_delta;
  report.aggregate.flip_rate = agg.flip_rate;

  MaxDropOptions md;
  md.rounds = config.mc_rounds;
  md.seed = config.seed;
  md.smoothing = config.smoothing;
  md.threads = config.threads;

  const TestResult pooled = pooled_test(plain);
  const TestResult fisher = fisher_test(plain);
  const TestResult max_drop = safe_max_drop(plain, md);
  report.aggregate.p_pooled = round_p(pooled.p_value);
  report.aggregate.p_fisher = round_p(fisher.p_value);
  report.aggregate.p_max_drop = round_p(max_drop.p_value);
  report.reject = report.aggregate.p_pooled < config.alpha ||
                  report.aggregate.p_fisher < config.alpha ||
                  report.aggregate.p_max_drop < config.alpha;
  report.bonferroni_bound = 3.0 * config.alpha;
  return report;
}

DegradationReport continuous_battery(const std::vector<PairedScoreSet>& tasks,
                                     const RunConfig& config) {
  DegradationReport report;
  report.config = config;
  report.continuous = true;

  PermOptions po;
  po.permutations = config.permutations;
  po.seed = config.seed;
  po.threads = config.threads;

  std::vector<DiffVector> diffs;
  std::vector<double> pooled_diffs;
  long long total_b = 0;
  long long total_c = 0;
  long long total_n = 0;
  double sum_base = 0.0;
  double sum_cand = 0.0;
  long long total_nonzero = 0;

  for (const auto& set : tasks) {
    DiffVector dv;
    dv.task = set.task;
    dv.diffs.reserve(set.pairs.size());
    const ContingencyTable wl =
        contingency_from_continuous(set, {ContinuousTableMode::winloss, 0.5});
    double task_base = 0.0;
    double task_cand = 0.0;
    long long nonzero = 0;
    for (const auto& p : set.pairs) {
      const double d = p.baseline - p.candidate;
      dv.diffs.push_back(d);
      pooled_diffs.push_back(d);
      task_base += p.baseline;
      task_cand += p.candidate;
      if (d != 0.0) ++nonzero;
    }
    const long long n = static_cast<long long>(set.pairs.size());
    const double mean_diff = (task_base - task_cand) / static_cast<double>(n);
    double ss = 0.0;
    for (double d : dv.diffs) ss += (d - mean_diff) * (d - mean_diff);
    const double se = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n))
                            : 0.0;

    const TestResult per_task =
        perm_pooled(dv.diffs, po);  // note: pooled stream, same for every task
    TaskRow row;
    row.task = set.task;
    row.n = n;
    row.b = wl.b;
    row.c = wl.c;
    row.accuracy_baseline = task_base / static_cast<double>(n);
    row.accuracy_candidate = task_cand / static_cast<double>(n);
    row.delta = mean_diff;
    row.se_delta = se;
    row.flip_rate = static_cast<double>(nonzero) / static_cast<double>(n);
    if (wl.b + wl.c > 0) {
      row.degradation_prob = static_cast<double>(wl.b) / static_cast<double>(wl.b + wl.c);
    }
    row.p_value = round_p(per_task.p_value);
    report.per_task.push_back(std::move(row));

    total_b += wl.b;
    total_c += wl.c;
    total_n += n;
    sum_base += task_base;
    sum_cand += task_cand;
    total_nonzero += nonzero;
    diffs.push_back(std::move(dv));
  }

  report.aggregate.n = total_n;
  report.aggregate.b = total_b;
  report.aggregate.c = total_c;
  report.aggregate.accuracy_baseline = sum_base / static_cast<double>(total_n);
  report.aggregate.accuracy_candidate = sum_cand / static_cast<double>(total_n);
  report.aggregate.delta = (sum_base - sum_cand) / static_cast<double>(total_n);
  double mean_diff = report.aggregate.delta;
  double ss = 0.0;
  for (double d : pooled_diffs) ss += (d - mean_diff) * (d - mean_diff);
  report.aggregate.se_delta =
      total_n > 1 ? std::sqrt(ss / static_cast<double>(total_n - 1) / static_cast<double>(total_n))
                  : 0.0;
  report.aggregate.flip_rate = static_cast<double>(total_nonzero) / static_cast<double>(total_n);

  report.aggregate.p_pooled = round_p(perm_pooled(pooled_diffs, po).p_value);
  report.aggregate.p_fisher = round_p(perm_fisher(diffs, po).p_value);
  report.aggregate.p_max_drop = round_p(perm_max_drop(diffs, po).p_value);
  report.reject = report.aggregate.p_pooled < config.alpha ||
                  report.aggregate.p_fisher < config.alpha ||
                  report.aggregate.p_max_drop < config.alpha;
  report.bonferroni_bound = 3.0 * config.alpha;
  return report;
}

}  // namespace

DegradationReport run_compare_tables(const std::vector<TaskTable>& tables,
                                     const RunConfig& config) {
  return binary_battery(tables, config);
}

DegradationReport run_compare(const std::string& baseline_path,
                              const std::string& candidate_path, const RunConfig& config) {
  const IngestResult baseline = ingest_samples(baseline_path);
  if (baseline.is_contingency) {
    if (!candidate_path.empty()) {
      throw ParseError("contingency CSV input is self-contained; no candidate file expected");
    }
    return binary_battery(baseline.tables, config);
  }
  if (candidate_path.empty()) {
    throw ParseError("per-sample input requires a candidate file");
  }
  const IngestResult candidate = ingest_samples(candidate_path);
  if (candidate.is_contingency) {
    throw ParseError("cannot mix per-sample and contingency inputs");
  }

  PairingResult paired = pair_scores(baseline.samples, candidate.samples, config.pairing);

  ScoreMode mode = config.score_mode;
  if (mode == ScoreMode::auto_detect) {
    mode = all_binary(paired.tasks) ? ScoreMode::binary : ScoreMode::continuous;
  }

  DegradationReport report;
  switch (mode) {
    case ScoreMode::binary: {
      std::vector<TaskTable> tables;
      tables.reserve(paired.tasks.size());
      for (const auto& set : paired.tasks) {
        tables.push_back({set.task, contingency_from_binary(set)});
      }
      report = binary_battery(tables, config);
      break;
    }
    case ScoreMode::threshold:
    case ScoreMode::winloss: {
      ContinuousTableMode tm;
      tm.kind = mode == ScoreMode::threshold ? ContinuousTableMode::threshold
                                             : ContinuousTableMode::winloss;
      tm.theta = config.threshold;
      std::vector<TaskTable> tables;
      tables.reserve(paired.tasks.size());
      for (const auto& set : paired.tasks) {
        tables.push_back({set.task, contingency_from_continuous(set, tm)});
      }
      report = binary_battery(tables, config);
      break;
    }
    case ScoreMode::continuous:
      report = continuous_battery(paired.tasks, config);
      break;
    case ScoreMode::auto_detect:
      break;  // unreachable
  }
  report.config.score_mode = mode;
  report.dropped_keys = paired.dropped;
  return report;
}

std::string report_json(const DegradationReport& report) {
  ordered_json j;
  j["per_task"] = ordered_json::array();
  for (const auto& row : report.per_task) {
    ordered_json r;
    r["task"] = row.task;
    r["n"] = row.n;
    r["b"] = row.b;
    r["c"] = row.c;
    r["accuracy_baseline"] = row.accuracy_baseline;
    r["accuracy_candidate"] = row.accuracy_candidate;
    r["delta"] = row.delta;
    r["se_delta"] = row.se_delta;
    r["flip_rate"] = row.flip_rate;
    if (row.degradation_prob) r["degradation_prob"] = *row.degradation_prob;
    else r["degradation_prob"] = nullptr;
    r["p_value"] = row.p_value;
    j["per_task"].push_back(std::move(r));
  }
  ordered_json agg;
  agg["n"] = report.aggregate.n;
  agg["b"] = report.aggregate.b;
  agg["c"] = report.aggregate.c;
  agg["accuracy_baseline"] = report.aggregate.accuracy_baseline;
  agg["accuracy_candidate"] = report.aggregate.accuracy_candidate;
  agg["delta"] = report.aggregate.delta;
  agg["se_delta"] = report.aggregate.se_delta;
  agg["flip_rate"] = report.aggregate.flip_rate;
  agg["p_pooled"] = report.aggregate.p_pooled;
  agg["p_max_drop"] = report.aggregate.p_max_drop;
  agg["p_fisher"] = report.aggregate.p_fisher;
  j["aggregate"] = std::move(agg);

  ordered_json cfg;
  cfg["alpha"] = report.config.alpha;
  cfg["mc_rounds"] = report.config.mc_rounds;
  cfg["permutations"] = report.config.permutations;
  cfg["seed"] = report.config.seed;
  cfg["pairing"] = report.config.pairing == PairPolicy::strict ? "strict" : "intersect";
  switch (report.config.score_mode) {
    case ScoreMode::auto_detect: cfg["score_mode"] = "auto"; break;
    case ScoreMode::binary: cfg["score_mode"] = "binary"; break;
    case ScoreMode::continuous: cfg["score_mode"] = "continuous"; break;
    case ScoreMode::threshold: cfg["score_mode"] = "threshold"; break;
    case ScoreMode::winloss: cfg["score_mode"] = "winloss"; break;
  }
  cfg["dropped_keys"] = report.dropped_keys;
  j["config"] = std::move(cfg);

  ordered_json decision;
  decision["reject"] = report.reject;
  decision["alpha"] = report.config.alpha;
  decision["bonferroni_bound"] = report.bonferroni_bound;
  j["decision"] = std::move(decision);
  return j.dump(2) + "\n";
}

std::string report_csv(const DegradationReport& report) {
  // Contingency rows; re-ingesting this reproduces the binary test battery.
  std::string out = "task,b,c,a,d\n";
  for (const auto& row : report.per_task) {
    const long long agree = row.n - row.b - row.c;
    // a/d split is not tracked per row; park agreements in d (tests only
    // read b, c and N).
    out += row.task + "," + std::to_string(row.b) + "," + std::to_string(row.c) + ",0," +
           std::to_string(agree) + "\n";
  }
  return out;
}

std::string report_table(const DegradationReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-16s %8s %6s %6s %8s %8s %8s %8s %10s\n", "task", "N",
                "b", "c", "acc_M", "delta", "SE", "p_flip", "p");
  out << line;
  for (const auto& row : report.per_task) {
    std::snprintf(line, sizeof(line), "%-16s %8lld %6lld %6lld %8s %8s %8s %8s %10s\n",
                  row.task.c_str(), row.n, row.b, row.c, pct(row.accuracy_baseline).c_str(),
                  pct(row.delta).c_str(), pct(row.se_delta).c_str(), pct(row.flip_rate).c_str(),
                  sci(row.p_value).c_str());
    out << line;
  }
  const auto& a = report.aggregate;
  std::snprintf(line, sizeof(line), "%-16s %8lld %6lld %6lld %8s %8s %8s %8s\n", "TOTAL", a.n,
                a.b, a.c, pct(a.accuracy_baseline).c_str(), pct(a.delta).c_str(),
                pct(a.se_delta).c_str(), pct(a.flip_rate).c_str());
  out << line;
  out << "p_pooled=" << sci(a.p_pooled) << "  p_max_drop=" << sci(a.p_max_drop)
      << "  p_fisher=" << sci(a.p_fisher) << "\n";
  out << "decision: " << (report.reject ? "DEGRADATION FLAGGED" : "no significant degradation")
      << " (alpha=" << report.config.alpha << ", any-rejects bound " << report.bonferroni_bound
      << ")\n";
  return out.str();
}

}  // namespace degtest
