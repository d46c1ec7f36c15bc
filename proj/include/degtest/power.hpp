#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace degtest {

struct PowerPoint {
  long long n = 0;
  double alpha = 0.05;
  double p_flip = 0.0;
  double q = 0.5;      // degradation probability
  double delta = 0.0;  // accuracy difference; delta = 2*p_flip*(q - 1/2)
  double power = 0.0;
};

// Asymptotic one-sided test power 1 - Phi(t_alpha - sqrt(n/p_flip)*delta).
// Throws std::domain_error when |delta| > p_flip.
double asymptotic_power(long long n, double p_flip, double delta, double alpha);

// Builds a PowerPoint from either parameterization, deriving the other via
// delta = 2*p_flip*(q - 1/2).
PowerPoint power_point_from_delta(long long n, double p_flip, double delta, double alpha);
PowerPoint power_point_from_q(long long n, double p_flip, double q, double alpha);

// Signal-to-noise ratio sqrt(n/p_flip) * delta; invariant under removing
// never-flipping examples.
double snr(long long n, double p_flip, double delta);

struct DocSuccessCount {
  std::string doc_id;
  int successes = 0;
  int runs = 0;
};

struct TrimReport {
  long long total_docs = 0;
  long long never_flip_docs = 0;  // successes == 0 or successes == runs
  long long kept_docs = 0;
  std::vector<std::string> kept_doc_ids;
  std::map<int, long long> success_histogram;  // success count -> #docs
};

// Keeps exactly the documents that flipped at least once across the probe
// runs (0 < successes < runs).
TrimReport trim_by_flip_likelihood(const std::vector<DocSuccessCount>& counts);

struct GridRange {
  double lo = 0.0;
  double hi = 0.0;
  int steps = 1;  // number of grid points; 1 means just lo
};

// Dense power grid over p_flip x (q or delta); row-major with p_flip as the
// outer dimension.
std::vector<PowerPoint> power_grid(long long n, double alpha, GridRange p_flip_range,
                                   std::optional<GridRange> q_range,
                                   std::optional<GridRange> delta_range);

// CSV with header n,alpha,p_flip,q,delta,power; shortest round-trip decimal
// formatting, LF line endings.
std::string power_grid_csv(const std::vector<PowerPoint>& grid);

}  // namespace degtest
