#include "degtest/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace degtest {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  return fields;
}

IngestResult parse_contingency_csv(std::ifstream& in, const std::vector<std::string>& header,
                                   const std::string& path) {
  const bool has_ad = header.size() >= 5 && header[3] == "a" && header[4] == "d";
  IngestResult result;
  result.is_contingency = true;
  std::set<std::string> seen;
  std::string line;
  long long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < 3) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected task,b,c row");
    }
    TaskTable tt;
    tt.task = fields[0];
    try {
      tt.table.b = std::stoll(fields[1]);
      tt.table.c = std::stoll(fields[2]);
      if (has_ad && fields.size() >= 5) {
        tt.table.a = std::stoll(fields[3]);
        tt.table.d = std::stoll(fields[4]);
      }
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": non-numeric count");
    }
    if (tt.table.a < 0 || tt.table.b < 0 || tt.table.c < 0 || tt.table.d < 0) {
      throw RangeError(path + ":" + std::to_string(line_no) + ": negative count");
    }
    if (!seen.insert(tt.task).second) {
      throw DuplicateKeyError(path + ":" + std::to_string(line_no) + ": duplicate task " + tt.task);
    }
    result.tables.push_back(std::move(tt));
  }
  return result;
}

}  // namespace

IngestResult ingest_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);

  std::string first_line;
  if (!std::getline(in, first_line)) throw ParseError(path + ": empty file");

  // A contingency CSV is recognized by its header.
  const auto header = split_csv_line(first_line);
  if (header.size() >= 3 && header[0] == "task" && header[1] == "b" && header[2] == "c") {
    return parse_contingency_csv(in, header, path);
  }

  IngestResult result;
  std::set<std::tuple<std::string, std::string, int>> seen;
  std::string line = first_line;
  long long line_no = 0;
  do {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    json rec;
    try {
      rec = json::parse(stripped);
    } catch (const json::parse_error& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!rec.is_object() || !rec.contains("task") || !rec.contains("doc_id") ||
        !rec.contains("score")) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": record needs task, doc_id and score fields");
    }
    SampleScore s;
    if (!rec["task"].is_string()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": task must be a string");
    }
    s.task = rec["task"].get<std::string>();
    if (rec["doc_id"].is_string()) {
      s.doc_id = trim(rec["doc_id"].get<std::string>());
    } else if (rec["doc_id"].is_number_integer()) {
      s.doc_id = std::to_string(rec["doc_id"].get<long long>());
    } else {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": doc_id must be a string or integer");
    }
    if (!rec["score"].is_number()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": score must be a number");
    }
    s.score = rec["score"].get<double>();
    if (s.score < 0.0 || s.score > 1.0) {
      throw RangeError(path + ":" + std::to_string(line_no) + ": score " +
                       std::to_string(s.score) + " outside [0,1]");
    }
    if (rec.contains("run")) {
      if (!rec["run"].is_number_integer() || rec["run"].get<long long>() < 0) {
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": run must be a nonnegative integer");
      }
      s.run = rec["run"].get<int>();
    }
    if (!seen.insert({s.task, s.doc_id, s.run}).second) {
      throw DuplicateKeyError(path + ":" + std::to_string(line_no) + ": duplicate key (" +
                              s.task + ", " + s.doc_id + ", " + std::to_string(s.run) + ")");
    }
    result.samples.push_back(std::move(s));
  } while (std::getline(in, line));

  return result;
}

std::vector<DocSuccessCount> ingest_success_counts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::vector<DocSuccessCount> out;
  std::string line;
  long long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    json rec;
    try {
      rec = json::parse(stripped);
    } catch (const json::parse_error& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!rec.contains("doc_id") || !rec.contains("successes") || !rec.contains("runs")) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": record needs doc_id, successes and runs fields");
    }
    DocSuccessCount doc;
    doc.doc_id = rec["doc_id"].is_string() ? rec["doc_id"].get<std::string>()
                                           : std::to_string(rec["doc_id"].get<long long>());
    doc.successes = rec["successes"].get<int>();
    doc.runs = rec["runs"].get<int>();
    out.push_back(std::move(doc));
  }
  return out;
}

}  // namespace degtest
