#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "degtest/binary_tests.hpp"
#include "degtest/permutation_tests.hpp"
#include "degtest/power.hpp"
#include "degtest/report.hpp"
#include "degtest/score_model.hpp"

namespace py = pybind11;
using namespace degtest;

namespace {

// Tables come in as (b, c) or (a, b, c, d) tuples.
std::vector<ContingencyTable> to_tables(const std::vector<py::tuple>& rows) {
  std::vector<ContingencyTable> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    ContingencyTable t;
    if (row.size() == 2) {
      t.b = row[0].cast<long long>();
      t.c = row[1].cast<long long>();
    } else if (row.size() == 4) {
      t.a = row[0].cast<long long>();
      t.b = row[1].cast<long long>();
      t.c = row[2].cast<long long>();
      t.d = row[3].cast<long long>();
    } else {
      throw py::value_error("table rows must be (b, c) or (a, b, c, d)");
    }
    out.push_back(t);
  }
  return out;
}

std::vector<DiffVector> to_diff_vectors(
    const std::vector<std::pair<std::string, std::vector<double>>>& tasks) {
  std::vector<DiffVector> out;
  out.reserve(tasks.size());
  for (const auto& [name, diffs] : tasks) out.push_back({name, diffs});
  return out;
}

}  // namespace

PYBIND11_MODULE(_degtest, m) {
  m.doc() = "Statistical tests for benchmark accuracy degradation";

  py::class_<TestResult>(m, "TestResult")
      .def_readonly("p_value", &TestResult::p_value)
      .def_readonly("statistic", &TestResult::statistic)
      .def_readonly("n_flips_used", &TestResult::n_flips_used)
      .def_readonly("degenerate", &TestResult::degenerate)
      .def("__repr__", [](const TestResult& r) {
        return "TestResult(p_value=" + std::to_string(r.p_value) + ")";
      });

  m.def("mcnemar_exact", &mcnemar_exact, py::arg("b"), py::arg("c"));

  m.def(
      "pooled_test",
      [](const std::vector<py::tuple>& tables) { return pooled_test(to_tables(tables)); },
      py::arg("tables"));

  m.def(
      "fisher_test",
      [](const std::vector<py::tuple>& tables) { return fisher_test(to_tables(tables)); },
      py::arg("tables"));

  m.def(
      "max_drop_test",
      [](const std::vector<py::tuple>& tables, long long rounds, std::uint64_t seed,
         bool smoothing, int threads) {
        MaxDropOptions opts;
        opts.rounds = rounds;
        opts.seed = seed;
        opts.smoothing = smoothing;
        opts.threads = threads;
        return max_drop_test(to_tables(tables), opts);
      },
      py::arg("tables"), py::arg("rounds") = 10000, py::arg("seed") = 0,
      py::arg("smoothing") = false, py::arg("threads") = 1);

  m.def(
      "perm_pooled",
      [](const std::vector<double>& diffs, long long permutations, std::uint64_t seed,
         int threads) {
        PermOptions opts;
        opts.permutations = permutations;
        opts.seed = seed;
        opts.threads = threads;
        return perm_pooled(diffs, opts);
      },
      py::arg("diffs"), py::arg("permutations") = 100000, py::arg("seed") = 0,
      py::arg("threads") = 1);

  m.def(
      "perm_fisher",
      [](const std::vector<std::pair<std::string, std::vector<double>>>& tasks,
         long long permutations, std::uint64_t seed, int threads) {
        PermOptions opts;
        opts.permutations = permutations;
        opts.seed = seed;
        opts.threads = threads;
        return perm_fisher(to_diff_vectors(tasks), opts);
      },
      py::arg("tasks"), py::arg("permutations") = 100000, py::arg("seed") = 0,
      py::arg("threads") = 1);

  m.def(
      "perm_max_drop",
      [](const std::vector<std::pair<std::string, std::vector<double>>>& tasks,
         long long permutations, std::uint64_t seed, int threads) {
        PermOptions opts;
        opts.permutations = permutations;
        opts.seed = seed;
        opts.threads = threads;
        return perm_max_drop(to_diff_vectors(tasks), opts);
      },
      py::arg("tasks"), py::arg("permutations") = 100000, py::arg("seed") = 0,
      py::arg("threads") = 1);

  m.def(
      "table_stats",
      [](const py::tuple& row) {
        const auto tables = to_tables({row});
        const TableStats s = table_stats(tables[0]);
        py::dict d;
        d["n_total"] = s.n_total;
        d["accuracy_baseline"] = s.accuracy_baseline;
        d["accuracy_candidate"] = s.accuracy_candidate;
        d["delta"] = s.delta;
        d["se_delta"] = s.se_delta;
        d["flip_rate"] = s.flip_rate;
        d["degradation_prob"] =
            s.degradation_prob ? py::cast(*s.degradation_prob) : py::none();
        return d;
      },
      py::arg("table"));

  m.def("asymptotic_power", &asymptotic_power, py::arg("n"), py::arg("p_flip"), py::arg("delta"),
        py::arg("alpha"));
  m.def("snr", &snr, py::arg("n"), py::arg("p_flip"), py::arg("delta"));

  m.def(
      "compare",
      [](const std::string& baseline, const std::string& candidate, double alpha,
         long long mc_rounds, long long permutations, std::uint64_t seed) {
        RunConfig cfg;
        cfg.alpha = alpha;
        cfg.mc_rounds = mc_rounds;
        cfg.permutations = permutations;
        cfg.seed = seed;
        return report_json(run_compare(baseline, candidate, cfg));
      },
      py::arg("baseline"), py::arg("candidate") = std::string(), py::arg("alpha") = 0.05,
      py::arg("mc_rounds") = 10000, py::arg("permutations") = 100000, py::arg("seed") = 0,
      "Run the full battery on two dump files; returns the JSON report");
}
