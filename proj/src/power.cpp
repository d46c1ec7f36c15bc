#include "degtest/power.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "degtest/numerics.hpp"

namespace degtest {

namespace {

void check_domain(long long n, double p_flip, double delta, double alpha) {
  if (n < 1) throw std::domain_error("power: n must be >= 1");
  if (!(p_flip > 0.0 && p_flip <= 1.0)) {
    throw std::domain_error("power: p_flip outside (0,1]");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("power: alpha outside (0,1)");
  }
  if (std::fabs(delta) > p_flip + 1e-15) {
    throw std::domain_error("power: |delta| > p_flip is inconsistent");
  }
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

double grid_value(const GridRange& r, int i) {
  if (r.steps <= 1) return r.lo;
  return r.lo + (r.hi - r.lo) * static_cast<double>(i) / static_cast<double>(r.steps - 1);
}

}  // namespace

double asymptotic_power(long long n, double p_flip, double delta, double alpha) {
  check_domain(n, p_flip, delta, alpha);
  const double t_alpha = num::normal_quantile(1.0 - alpha);
  return 1.0 - num::normal_cdf(t_alpha - std::sqrt(static_cast<double>(n) / p_flip) * delta);
}

PowerPoint power_point_from_delta(long long n, double p_flip, double delta, double alpha) {
  PowerPoint pt;
  pt.n = n;
  pt.alpha = alpha;
  pt.p_flip = p_flip;
  pt.delta = delta;
  pt.q = 0.5 + delta / (2.0 * p_flip);
  pt.power = asymptotic_power(n, p_flip, delta, alpha);
  return pt;
}

PowerPoint power_point_from_q(long long n, double p_flip, double q, double alpha) {
  return power_point_from_delta(n, p_flip, 2.0 * p_flip * (q - 0.5), alpha);
}

double snr(long long n, double p_flip, double delta) {
  if (n < 1) throw std::domain_error("snr: n must be >= 1");
  if (!(p_flip > 0.0 && p_flip <= 1.0)) throw std::domain_error("snr: p_flip outside (0,1]");
  return std::sqrt(static_cast<double>(n) / p_flip) * delta;
}

TrimReport trim_by_flip_likelihood(const std::vector<DocSuccessCount>& counts) {
  TrimReport report;
  for (const auto& doc : counts) {
    if (doc.runs < 2 || doc.successes < 0 || doc.successes > doc.runs) {
      throw std::domain_error("trim: doc " + doc.doc_id +
                              " has invalid counts (need 0 <= successes <= runs, runs >= 2)");
    }
    ++report.total_docs;
    ++report.success_histogram[doc.successes];
    if (doc.successes == 0 || doc.successes == doc.runs) {
      ++report.never_flip_docs;
    } else {
      ++report.kept_docs;
      report.kept_doc_ids.push_back(doc.doc_id);
    }
  }
  return report;
}

std::vector<PowerPoint> power_grid(long long n, double alpha, GridRange p_flip_range,
                                   std::optional<GridRange> q_range,
                                   std::optional<GridRange> delta_range) {
  if (q_range.has_value() == delta_range.has_value()) {
    throw std::invalid_argument("power_grid: exactly one of q or delta range required");
  }
  std::vector<PowerPoint> grid;
  const GridRange inner = q_range ? *q_range : *delta_range;
  grid.reserve(static_cast<size_t>(p_flip_range.steps) * inner.steps);
  for (int i = 0; i < p_flip_range.steps; ++i) {
    const double p_flip = grid_value(p_flip_range, i);
    for (int j = 0; j < inner.steps; ++j) {
      const double v = grid_value(inner, j);
      grid.push_back(q_range ? power_point_from_q(n, p_flip, v, alpha)
                             : power_point_from_delta(n, p_flip, v, alpha));
    }
  }
  return grid;
}

std::string power_grid_csv(const std::vector<PowerPoint>& grid) {
  std::string out = "n,alpha,p_flip,q,delta,power\n";
  for (const auto& pt : grid) {
    out += std::to_string(pt.n);
    out += ',';
    out += format_double(pt.alpha);
    out += ',';
    out += format_double(pt.p_flip);
    out += ',';
    out += format_double(pt.q);
    out += ',';
    out += format_double(pt.delta);
    out += ',';
    out += format_double(pt.power);
    out += '\n';
  }
  return out;
}

}  // namespace degtest
