#include "degtest/score_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace degtest {

namespace {

bool is_binary(double s) { return s == 0.0 || s == 1.0; }

using Key = std::pair<std::string, std::string>;  // (task, doc_id)

std::map<Key, double> index_scores(const std::vector<SampleScore>& scores) {
  std::map<Key, double> out;
  for (const auto& s : scores) out[{s.task, s.doc_id}] = s.score;
  return out;
}

}  // namespace

PairingResult pair_scores(const std::vector<SampleScore>& baseline,
                          const std::vector<SampleScore>& candidate,
                          PairPolicy policy) {
  const auto base_idx = index_scores(aggregate_repeats(baseline));
  const auto cand_idx = index_scores(aggregate_repeats(candidate));

  if (policy == PairPolicy::strict) {
    std::vector<std::string> missing;
    for (const auto& [key, _] : base_idx) {
      if (!cand_idx.count(key)) missing.push_back(key.first + "/" + key.second);
    }
    for (const auto& [key, _] : cand_idx) {
      if (!base_idx.count(key)) missing.push_back(key.first + "/" + key.second);
    }
    if (!missing.empty()) {
      std::ostringstream msg;
      msg << "strict pairing: " << missing.size() << " unmatched key(s):";
      for (size_t i = 0; i < missing.size() && i < 10; ++i) msg << " " << missing[i];
      if (missing.size() > 10) msg << " ...";
      throw MismatchError(msg.str());
    }
  }

  PairingResult result;
  std::map<std::string, PairedScoreSet> by_task;
  for (const auto& [key, base_score] : base_idx) {
    auto it = cand_idx.find(key);
    if (it == cand_idx.end()) {
      ++result.dropped;
      continue;
    }
    by_task[key.first].pairs.push_back({key.second, base_score, it->second});
  }
  for (const auto& [key, _] : cand_idx) {
    if (!base_idx.count(key)) ++result.dropped;
  }

  for (auto& [task, set] : by_task) {
    if (set.pairs.empty()) throw EmptyTaskError("task pairs to zero documents: " + task);
    set.task = task;
    // map iteration is already doc_id-sorted; keep the contract explicit
    std::sort(set.pairs.begin(), set.pairs.end(),
              [](const auto& a, const auto& b) { return a.doc_id < b.doc_id; });
    result.tasks.push_back(std::move(set));
  }
  return result;
}

std::vector<SampleScore> aggregate_repeats(const std::vector<SampleScore>& scores) {
  std::map<Key, std::pair<double, long long>> acc;  // sum, count
  for (const auto& s : scores) {
    auto& slot = acc[{s.task, s.doc_id}];
    slot.first += s.score;
    slot.second += 1;
  }
  std::vector<SampleScore> out;
  out.reserve(acc.size());
  for (const auto& [key, slot] : acc) {
    out.push_back({key.first, key.second, 0, slot.first / static_cast<double>(slot.second)});
  }
  return out;
}

ContingencyTable contingency_from_binary(const PairedScoreSet& pairs) {
  ContingencyTable t;
  for (const auto& p : pairs.pairs) {
    if (!is_binary(p.baseline) || !is_binary(p.candidate)) {
      throw NonBinaryScoreError("non-binary score for doc " + p.doc_id + " in task " +
                                pairs.task);
    }
    if (p.baseline == 1.0) {
      if (p.candidate == 1.0) ++t.d;
      else ++t.b;
    } else {
      if (p.candidate == 1.0) ++t.c;
      else ++t.a;
    }
  }
  return t;
}

ContingencyTable contingency_from_continuous(const PairedScoreSet& pairs,
                                             ContinuousTableMode mode) {
  if (mode.kind == ContinuousTableMode::threshold) {
    PairedScoreSet binarized;
    binarized.task = pairs.task;
    binarized.pairs.reserve(pairs.pairs.size());
    for (const auto& p : pairs.pairs) {
      binarized.pairs.push_back({p.doc_id, p.baseline >= mode.theta ? 1.0 : 0.0,
                                 p.candidate >= mode.theta ? 1.0 : 0.0});
    }
    return contingency_from_binary(binarized);
  }
  // winloss: ties count as agreement; placement in a vs d does not affect
  // any implemented test.
  ContingencyTable t;
  for (const auto& p : pairs.pairs) {
    if (p.baseline > p.candidate) ++t.b;
    else if (p.candidate > p.baseline) ++t.c;
    else if (p.baseline == 1.0) ++t.d;
    else ++t.a;
  }
  return t;
}

TableStats table_stats(const ContingencyTable& t) {
  TableStats s;
  const double n = static_cast<double>(t.n());
  s.n_total = t.n();
  s.n_flips = t.n_flips();
  s.accuracy_baseline = static_cast<double>(t.b + t.d) / n;
  s.accuracy_candidate = static_cast<double>(t.c + t.d) / n;
  s.delta = static_cast<double>(t.b - t.c) / n;
  s.flip_rate = static_cast<double>(t.b + t.c) / n;
  s.se_delta = std::sqrt(std::max(s.flip_rate - s.delta * s.delta, 0.0) / n);
  if (t.n_flips() > 0) {
    s.degradation_prob = static_cast<double>(t.b) / static_cast<double>(t.n_flips());
  }
  return s;
}

}  // namespace degtest
