#include "degtest/simulate.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "degtest/rng.hpp"

namespace degtest {

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::null_hypothesis: return "null";
    case Scenario::balanced: return "balanced";
    case Scenario::single_task: return "single_task";
  }
  return "unknown";
}

Scenario scenario_from_name(const std::string& name) {
  if (name == "null") return Scenario::null_hypothesis;
  if (name == "balanced") return Scenario::balanced;
  if (name == "single_task") return Scenario::single_task;
  throw std::invalid_argument("unknown scenario: " + name);
}

ContingencyTable simulate_task(long long n, double p_flip, double q, RngStream& rng) {
  ContingencyTable t;
  const long long flips = rng.binomial(n, p_flip);
  t.b = rng.binomial(flips, q);
  t.c = flips - t.b;
  t.a = 0;
  t.d = n - flips;
  return t;
}

std::vector<RejectionCurve> run_scenario(const ScenarioSpec& spec) {
  if (spec.trials < 1) throw std::invalid_argument("run_scenario: trials must be >= 1");

  std::vector<RejectionCurve> curves = {
      {"pooled", {}}, {"fisher", {}}, {"max_drop", {}}, {"combined", {}}};

  for (int T : spec.t_range) {
    // Trials are independent; each gets its own data stream derived from
    // (T, trial) so curves do not depend on scheduling.
    long long rejects[4] = {0, 0, 0, 0};
    const std::uint64_t t_base = derive_stream(stable_hash("scenario"), static_cast<std::uint64_t>(T));

    auto run_trials = [&](long long lo, long long hi, long long out[4]) {
      for (long long trial = lo; trial < hi; ++trial) {
        RngStream data_rng(spec.seed, derive_stream(t_base, static_cast<std::uint64_t>(trial)));
        std::vector<ContingencyTable> tables(T);
        for (int i = 0; i < T; ++i) {
          double q = 0.5;
          if (spec.scenario == Scenario::balanced) q = spec.q_balanced;
          else if (spec.scenario == Scenario::single_task && i == 0) q = spec.q_single;
          const long long n = data_rng.uniform_int(spec.n_min, spec.n_max);
          tables[i] = simulate_task(n, spec.p_flip, q, data_rng);
        }
        MaxDropOptions md;
        md.rounds = spec.mc_rounds;
        // decorrelate the max-drop simulation from the data stream
        md.seed = derive_stream(spec.seed, derive_stream(t_base, 0x4d43ULL + trial));
        md.threads = 1;
        const TestResult pooled = pooled_test(tables);
        const TestResult fisher = fisher_test(tables);
        TestResult max_drop;
        bool all_degenerate = true;
        for (const auto& t : tables) {
          if (t.n_flips() > 0) all_degenerate = false;
        }
        if (all_degenerate) {
          max_drop.method = Method::max_drop;
          max_drop.degenerate = true;
          max_drop.p_value = 1.0;
        } else {
          max_drop = max_drop_test(tables, md);
        }
        const bool r0 = pooled.p_value < spec.alpha;
        const bool r1 = fisher.p_value < spec.alpha;
        const bool r2 = max_drop.p_value < spec.alpha;
        if (r0) ++out[0];
        if (r1) ++out[1];
        if (r2) ++out[2];
        if (r0 || r1 || r2) ++out[3];
      }
    };

    const int threads = std::max(spec.threads, 1);
    if (threads == 1) {
      run_trials(0, spec.trials, rejects);
    } else {
      std::vector<std::array<long long, 4>> partial(threads, {0, 0, 0, 0});
      std::vector<std::thread> pool;
      const long long chunk = (spec.trials + threads - 1) / threads;
      for (int t = 0; t < threads; ++t) {
        const long long lo = t * chunk;
        const long long hi = std::min(spec.trials, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, t, lo, hi] { run_trials(lo, hi, partial[t].data()); });
      }
      for (auto& th : pool) th.join();
      for (const auto& p : partial) {
        for (int i = 0; i < 4; ++i) rejects[i] += p[i];
      }
    }

    for (int i = 0; i < 4; ++i) {
      const double rate = static_cast<double>(rejects[i]) / static_cast<double>(spec.trials);
      const double se = std::sqrt(rate * (1.0 - rate) / static_cast<double>(spec.trials));
      curves[i].points.push_back({T, rate, se});
    }
  }
  return curves;
}

namespace {

std::string format_rate(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string scenario_csv(const ScenarioSpec& spec, const std::vector<RejectionCurve>& curves) {
  std::string out = "scenario,method,T,rejection_rate,se\n";
  for (const auto& curve : curves) {
    for (const auto& pt : curve.points) {
      out += scenario_name(spec.scenario);
      out += ',';
      out += curve.method;
      out += ',';
      out += std::to_string(pt.t);
      out += ',';
      out += format_rate(pt.rate);
      out += ',';
      out += format_rate(pt.se);
      out += '\n';
    }
  }
  return out;
}

std::string scenario_json(const ScenarioSpec& spec, const std::vector<RejectionCurve>& curves) {
  nlohmann::ordered_json j;
  j["scenario"] = scenario_name(spec.scenario);
  j["trials"] = spec.trials;
  j["alpha"] = spec.alpha;
  j["p_flip"] = spec.p_flip;
  j["seed"] = spec.seed;
  j["curves"] = nlohmann::ordered_json::array();
  for (const auto& curve : curves) {
    nlohmann::ordered_json c;
    c["method"] = curve.method;
    c["points"] = nlohmann::ordered_json::array();
    for (const auto& pt : curve.points) {
      c["points"].push_back({{"T", pt.t}, {"rejection_rate", pt.rate}, {"se", pt.se}});
    }
    j["curves"].push_back(std::move(c));
  }
  return j.dump(2) + "\n";
}

}  // namespace degtest
