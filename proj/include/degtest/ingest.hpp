#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "degtest/power.hpp"
#include "degtest/score_model.hpp"

namespace degtest {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class RangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DuplicateKeyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Either a per-sample score dump or pre-aggregated contingency rows.
struct IngestResult {
  bool is_contingency = false;
  std::vector<SampleScore> samples;    // when !is_contingency
  std::vector<TaskTable> tables;       // when is_contingency
};

// Reads line-delimited JSON records {"task":..,"doc_id":..,"score":..[,"run":..]}
// (unknown fields ignored, integer doc ids normalized to strings) or a
// contingency CSV with header task,b,c[,a,d].
IngestResult ingest_samples(const std::string& path);

// Success-count records for the trim subcommand:
// {"doc_id":..,"successes":k,"runs":R} per line.
std::vector<DocSuccessCount> ingest_success_counts(const std::string& path);

}  // namespace degtest
