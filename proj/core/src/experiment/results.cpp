// Copyright 2026 The bimflow Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bimflow/experiment/results.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "bimflow/util/text.hpp"

namespace bimflow::experiment {

namespace {

constexpr std::size_t kFieldCount = 8;

bool parse_bool(const std::string& s, bool& out) {
  if (s == "true") return out = true, true;
  if (s == "false") return out = false, true;
  return false;
}

template <typename Int>
bool parse_int(const std::string& s, Int& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

std::optional<RunRecord> parse_row(const std::string& line) {
  auto f = util::split(line, ',');
  if (f.size() != kFieldCount) return std::nullopt;
  RunRecord r;
  r.code = f[0];
  if (!parse_int(f[1], r.run) || !parse_bool(f[2], r.material_pass) || !parse_bool(f[3], r.thickness_pass) ||
      !parse_int(f[4], r.attempts) || !parse_int(f[5], r.duration_ms)) {
    return std::nullopt;
  }
  r.spec_file = f[6];
  if (f[7] == "Completed") {
    r.status = RunStatus::Completed;
  } else if (f[7] == "Failed") {
    r.status = RunStatus::Failed;
  } else {
    return std::nullopt;
  }
  return r;
}

}  // namespace

std::string_view to_string(RunStatus status) { return status == RunStatus::Completed ? "Completed" : "Failed"; }

std::string csv_header() {
  return "code,run,material_pass,thickness_pass,attempts,duration_ms,spec_file,status";
}

std::string to_csv_row(const RunRecord& r) {
  std::ostringstream out;
  out << r.code << ',' << r.run << ',' << (r.material_pass ? "true" : "false") << ','
      << (r.thickness_pass ? "true" : "false") << ',' << r.attempts << ',' << r.duration_ms << ',' << r.spec_file
      << ',' << to_string(r.status);
  return out.str();
}

std::vector<RunRecord> read_records(std::istream& in) {
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<RunRecord> out;
  std::size_t start = 0;
  bool header = true;
  while (start < content.size()) {
    auto nl = content.find('\n', start);
    if (nl == std::string::npos) break;  // torn final line
    std::string line = content.substr(start, nl - start);
    start = nl + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header) {
      header = false;
      if (line == csv_header()) continue;
    }
    if (line.empty()) continue;
    auto row = parse_row(line);
    if (!row) {
      if (start >= content.size()) break;  // damaged last line
      throw ExperimentError("malformed records line: " + line);
    }
    out.push_back(std::move(*row));
  }
  return out;
}

std::vector<RunRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ExperimentError("cannot open " + path.string());
  return read_records(in);
}

ResultsTable compute_accuracy(const std::vector<RunRecord>& records) {
  if (records.empty()) throw ExperimentError("EmptyInput: no run records");
  ResultsTable t;
  for (const auto& r : records) {
    if (std::find(t.codes.begin(), t.codes.end(), r.code) == t.codes.end()) t.codes.push_back(r.code);
    ++t.total;
    ++t.material.total;
    ++t.thickness.total;
    auto& mc = t.material_by_code[r.code];
    auto& tc = t.thickness_by_code[r.code];
    ++mc.total;
    ++tc.total;
    if (r.material_pass) ++t.material.pass, ++mc.pass;
    if (r.thickness_pass) ++t.thickness.pass, ++tc.pass;
    auto& cc = t.completed_by_code[r.code];
    if (r.status == RunStatus::Completed) ++t.completed, ++cc;
  }
  return t;
}

std::string format_percent(int pass, int total) {
  if (total <= 0) throw ExperimentError("EmptyInput: percentage of zero runs");
  // Hundredths of a percent, rounded half-up in integer arithmetic.
  const std::int64_t p = pass;
  const std::int64_t n = total;
  const std::int64_t hundredths = (p * 20000 + n) / (2 * n);
  std::ostringstream out;
  out << hundredths / 100 << '.' << (hundredths % 100 < 10 ? "0" : "") << hundredths % 100 << '%';
  return out.str();
}

std::string render_summary(const ResultsTable& t) {
  std::ostringstream out;
  out << "# Experiment summary\n\n";
  out << "Runs: " << t.total << ", completed: " << t.completed << ", failed: " << t.total - t.completed
      << "\n\n";
  out << "| Criterion | Passed | Total | Accuracy |\n|---|---:|---:|---:|\n";
  out << "| Structural material | " << t.material.pass << " | " << t.material.total << " | "
      << format_percent(t.material.pass, t.material.total) << " |\n";
  out << "| Structural thickness | " << t.thickness.pass << " | " << t.thickness.total << " | "
      << format_percent(t.thickness.pass, t.thickness.total) << " |\n\n";
  out << "| Code | Runs | Completed | Material | Thickness |\n|---|---:|---:|---:|---:|\n";
  for (const auto& code : t.codes) {
    const auto& m = t.material_by_code.at(code);
    const auto& th = t.thickness_by_code.at(code);
    out << "| " << code << " | " << m.total << " | " << t.completed_by_code.at(code) << " | "
        << format_percent(m.pass, m.total) << " | " << format_percent(th.pass, th.total) << " |\n";
  }
  out << "\nAccuracy is 100 x passed / total, rounded half-up to two decimals "
         "(220 of 240 renders as 91.67%, not 91.66%). Failed runs count as failing both criteria.\n";
  return out.str();
}

}  // namespace bimflow::experiment
