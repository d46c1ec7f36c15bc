// Command-line front end: ingest score dumps or contingency CSVs, run the
// degradation test battery, emit power grids, trim reports and synthetic
// rejection-rate studies.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "degtest/binary_tests.hpp"
#include "degtest/ingest.hpp"
#include "degtest/numerics.hpp"
#include "degtest/power.hpp"
#include "degtest/report.hpp"
#include "degtest/simulate.hpp"

namespace {

using namespace degtest;

// Parses "lo:hi:steps" (or a single value) into a GridRange.
GridRange parse_range(const std::string& s) {
  GridRange r;
  const auto p1 = s.find(':');
  if (p1 == std::string::npos) {
    r.lo = r.hi = std::stod(s);
    r.steps = 1;
    return r;
  }
  const auto p2 = s.find(':', p1 + 1);
  if (p2 == std::string::npos) throw CLI::ValidationError("range must be lo:hi:steps");
  r.lo = std::stod(s.substr(0, p1));
  r.hi = std::stod(s.substr(p1 + 1, p2 - p1 - 1));
  r.steps = std::stoi(s.substr(p2 + 1));
  if (r.steps < 1) throw CLI::ValidationError("range steps must be >= 1");
  return r;
}

// Parses "a..b" or a comma list into a task-count range.
std::vector<int> parse_t_range(const std::string& s) {
  std::vector<int> out;
  const auto dots = s.find("..");
  if (dots != std::string::npos) {
    const int lo = std::stoi(s.substr(0, dots));
    const int hi = std::stoi(s.substr(dots + 2));
    for (int t = lo; t <= hi; ++t) out.push_back(t);
    return out;
  }
  size_t pos = 0;
  while (pos < s.size()) {
    const auto comma = s.find(',', pos);
    out.push_back(std::stoi(s.substr(pos, comma - pos)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

int cmd_test(const std::string& baseline, const std::string& candidate, RunConfig config) {
  const DegradationReport report = run_compare(baseline, candidate, config);
  switch (config.output) {
    case OutputFormat::json: std::cout << report_json(report); break;
    case OutputFormat::csv: std::cout << report_csv(report); break;
    case OutputFormat::table: std::cout << report_table(report); break;
  }
  return report.reject ? 2 : 0;
}

int cmd_selftest() {
  int failures = 0;
  auto check = [&](const char* name, double got, double want, double rel_tol) {
    const double rel = std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
    const bool ok = rel <= rel_tol;
    std::printf("%-40s %s (got %.12g, want %.12g)\n", name, ok ? "ok" : "FAIL", got, want);
    if (!ok) ++failures;
  };
  check("log_gamma(10) = ln(9!)", num::log_gamma(10.0), 12.801827480081469, 1e-13);
  check("log_gamma(0.5) = ln(sqrt(pi))", num::log_gamma(0.5), 0.5723649429247001, 1e-13);
  check("binomial_sf(5,5,0.5)", num::binomial_sf(5, 5, 0.5), 0.03125, 1e-12);
  check("binomial_sf(1241,2283,0.5)", num::binomial_sf(1241, 2283, 0.5), 1.688856603387624e-05,
        1e-9);
  check("chi2_sf(0,4)", num::chi2_sf(0.0, 4), 1.0, 1e-15);
  check("chi2_sf(-2ln(0.07),2)", num::chi2_sf(-2.0 * std::log(0.07), 2), 0.07, 1e-12);
  check("normal_cdf(0)", num::normal_cdf(0.0), 0.5, 1e-15);
  check("normal_quantile(0.95)", num::normal_quantile(0.95), 1.6448536269514722, 1e-9);
  double max_rt = 0.0;
  for (int i = 1; i < 1000; ++i) {
    const double p = static_cast<double>(i) / 1000.0;
    max_rt = std::max(max_rt, std::fabs(num::normal_cdf(num::normal_quantile(p)) - p));
  }
  const bool rt_ok = max_rt <= 1e-9;
  std::printf("%-40s %s (max err %.3g)\n", "quantile/cdf round trip <= 1e-9", rt_ok ? "ok" : "FAIL",
              max_rt);
  if (!rt_ok) ++failures;
  std::printf("%s\n", failures == 0 ? "selftest passed" : "selftest FAILED");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical detection of benchmark accuracy degradation"};
  app.require_subcommand(1);

  RunConfig config;
  std::string baseline_path;
  std::string candidate_path;
  std::string pairing = "strict";
  std::string score_mode = "auto";
  std::string output = "table";
  bool allow_missing = false;

  auto* test = app.add_subcommand("test", "Compare two score dumps (or one contingency CSV)");
  test->add_option("baseline", baseline_path, "Baseline JSONL dump or contingency CSV")
      ->required();
  test->add_option("candidate", candidate_path, "Candidate JSONL dump");
  test->add_option("--alpha", config.alpha, "Significance level");
  test->add_option("--mc-rounds", config.mc_rounds, "Max-drop Monte Carlo rounds");
  test->add_option("--permutations", config.permutations, "Sign-flip permutations");
  test->add_option("--seed", config.seed, "RNG seed");
  test->add_option("--pairing", pairing, "strict|intersect");
  test->add_option("--score-mode", score_mode, "auto|binary|continuous|threshold|winloss");
  test->add_option("--threshold", config.threshold, "Binarization threshold");
  test->add_option("--output", output, "table|json|csv");
  test->add_option("--threads", config.threads, "Worker threads");
  test->add_flag("--smoothing", config.smoothing, "Use (b+1)/(S+1) max-drop estimator");
  test->add_flag("--allow-missing", allow_missing, "Alias for --pairing intersect");

  std::string power_n = "25282";
  std::string power_pflip = "0.1";
  std::string power_q;
  std::string power_delta;
  double power_alpha = 0.05;
  auto* power = app.add_subcommand("power", "Emit an asymptotic power grid as CSV");
  power->add_option("--n", power_n, "Sample count");
  power->add_option("--alpha", power_alpha, "Significance level");
  power->add_option("--p-flip", power_pflip, "Flip probability or lo:hi:steps");
  power->add_option("--q", power_q, "Degradation probability or lo:hi:steps");
  power->add_option("--delta", power_delta, "Accuracy difference or lo:hi:steps");

  std::string trim_path;
  auto* trim = app.add_subcommand("trim", "Trim docs that never flip across probe runs");
  trim->add_option("counts", trim_path, "JSONL with doc_id, successes, runs")->required();

  std::string sim_scenario = "null";
  std::string sim_t = "1,5,10,20";
  ScenarioSpec spec;
  std::string sim_output = "csv";
  auto* simulate = app.add_subcommand("simulate", "Synthetic rejection-rate study");
  simulate->add_option("--scenario", sim_scenario, "null|balanced|single_task");
  simulate->add_option("--T", sim_t, "Task counts, e.g. 1..20 or 1,5,10");
  simulate->add_option("--trials", spec.trials, "Experiments per configuration");
  simulate->add_option("--alpha", spec.alpha, "Significance level");
  simulate->add_option("--p-flip", spec.p_flip, "Flip probability");
  simulate->add_option("--mc-rounds", spec.mc_rounds, "Max-drop rounds per trial");
  simulate->add_option("--seed", spec.seed, "RNG seed");
  simulate->add_option("--threads", spec.threads, "Worker threads");
  simulate->add_option("--output", sim_output, "csv|json");

  app.add_subcommand("selftest", "Run the numerics oracle suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  try {
    if (test->parsed()) {
      if (pairing == "strict") config.pairing = PairPolicy::strict;
      else if (pairing == "intersect") config.pairing = PairPolicy::intersect;
      else { std::cerr << "unknown pairing: " << pairing << "\n"; return 64; }
      if (allow_missing) config.pairing = PairPolicy::intersect;
      if (score_mode == "auto") config.score_mode = ScoreMode::auto_detect;
      else if (score_mode == "binary") config.score_mode = ScoreMode::binary;
      else if (score_mode == "continuous") config.score_mode = ScoreMode::continuous;
      else if (score_mode == "winloss") config.score_mode = ScoreMode::winloss;
      else if (score_mode.rfind("threshold", 0) == 0) {
        config.score_mode = ScoreMode::threshold;
        const auto colon = score_mode.find(':');
        if (colon != std::string::npos) config.threshold = std::stod(score_mode.substr(colon + 1));
      } else { std::cerr << "unknown score mode: " << score_mode << "\n"; return 64; }
      if (output == "table") config.output = OutputFormat::table;
      else if (output == "json") config.output = OutputFormat::json;
      else if (output == "csv") config.output = OutputFormat::csv;
      else { std::cerr << "unknown output format: " << output << "\n"; return 64; }
      return cmd_test(baseline_path, candidate_path, config);
    }
    if (power->parsed()) {
      if (power_q.empty() == power_delta.empty()) {
        std::cerr << "power: give exactly one of --q or --delta\n";
        return 64;
      }
      std::optional<GridRange> q_range;
      std::optional<GridRange> delta_range;
      if (!power_q.empty()) q_range = parse_range(power_q);
      if (!power_delta.empty()) delta_range = parse_range(power_delta);
      const auto grid = power_grid(std::stoll(power_n), power_alpha, parse_range(power_pflip),
                                   q_range, delta_range);
      std::cout << power_grid_csv(grid);
      return 0;
    }
    if (trim->parsed()) {
      const auto counts = ingest_success_counts(trim_path);
      const TrimReport report = trim_by_flip_likelihood(counts);
      nlohmann::ordered_json j;
      j["total_docs"] = report.total_docs;
      j["never_flip_docs"] = report.never_flip_docs;
      j["kept_docs"] = report.kept_docs;
      j["success_histogram"] = nlohmann::ordered_json::object();
      for (const auto& [successes, docs] : report.success_histogram) {
        j["success_histogram"][std::to_string(successes)] = docs;
      }
      j["kept_doc_ids"] = report.kept_doc_ids;
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (simulate->parsed()) {
      spec.scenario = scenario_from_name(sim_scenario);
      spec.t_range = parse_t_range(sim_t);
      const auto curves = run_scenario(spec);
      if (sim_output == "json") std::cout << scenario_json(spec, curves);
      else std::cout << scenario_csv(spec, curves);
      return 0;
    }
    return cmd_selftest();
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
