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

#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bimflow::experiment {

class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RunStatus { Completed, Failed };
std::string_view to_string(RunStatus status);

struct RunRecord {
  std::string code;
  int run = 0;  // 1-based
  bool material_pass = false;
  bool thickness_pass = false;
  int attempts = 0;
  std::int64_t duration_ms = 0;
  // Relative to the output directory; empty when no spec was produced.
  std::string spec_file;
  RunStatus status = RunStatus::Failed;
  bool operator==(const RunRecord&) const = default;
};

/// "code,run,material_pass,thickness_pass,attempts,duration_ms,spec_file,status"
std::string csv_header();
std::string to_csv_row(const RunRecord& record);

/// Parses a records file. A final line without a newline or with the wrong
/// field count is treated as a torn write and dropped.
std::vector<RunRecord> read_records(std::istream& in);
std::vector<RunRecord> read_records(const std::filesystem::path& path);

struct CriterionTally {
  int pass = 0;
  int total = 0;
};

struct ResultsTable {
  CriterionTally material;
  CriterionTally thickness;
  int completed = 0;
  int total = 0;
  // Per code, in first-seen order of the records.
  std::vector<std::string> codes;
  std::map<std::string, CriterionTally> material_by_code;
  std::map<std::string, CriterionTally> thickness_by_code;
  std::map<std::string, int> completed_by_code;
};

/// Throws ExperimentError on empty input.
ResultsTable compute_accuracy(const std::vector<RunRecord>& records);

/// 100 * pass / total rounded half-up to two decimals, e.g. "91.67%".
std::string format_percent(int pass, int total);

std::string render_summary(const ResultsTable& table);

}  // namespace bimflow::experiment
