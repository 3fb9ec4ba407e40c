#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "freact/transcript.hpp"

namespace freact {

struct TaskRecord {
  std::string id;
  std::string question;
  std::string gold_answer;

  bool operator==(const TaskRecord&) const = default;
};

enum class DatasetFormat { kHotpotJson, kSimpleJsonl };

std::optional<DatasetFormat> dataset_format_from(const std::string& token);

struct DatasetLoadResult {
  std::vector<TaskRecord> records;
  int skipped = 0;  // records dropped for empty question/answer
};

// hotpot-json: one JSON array of {_id, question, answer} objects (extra keys
// ignored). simple-jsonl: one {id, question, answer} object per line.
// Unparsable input throws DatasetFormatError naming the line.
DatasetLoadResult load_dataset(const std::filesystem::path& path, DatasetFormat format);

// Deterministic sample without replacement; same (records, n, seed) gives the
// same subset in the same order on every platform. Throws InvalidInput when
// n exceeds the record count.
std::vector<TaskRecord> sample_tasks(const std::vector<TaskRecord>& records, int n,
                                     std::uint64_t seed);

// Standard HotPotQA answer normalization: lowercase, strip punctuation, drop
// the articles a/an/the, collapse whitespace.
std::string normalize_answer(const std::string& text);

bool exact_match(const std::string& predicted, const std::string& gold);

// Token-level F1 over normalized answers; informational metric only.
double f1_score(const std::string& predicted, const std::string& gold);

struct PerTaskResult {
  std::string id;
  bool correct = false;
  double wall_total = 0.0;
  Termination termination = Termination::kStepCapReached;
  double f1 = 0.0;

  bool operator==(const PerTaskResult&) const = default;
};

struct RunReport {
  Mode mode = Mode::kVanilla;
  int n_tasks = 0;
  int n_correct = 0;
  double accuracy = 0.0;      // n_correct / n_tasks
  double runtime_mean = 0.0;  // seconds, over wall_total
  double runtime_std = 0.0;   // sample standard deviation (n-1)
  double f1_mean = 0.0;
  std::vector<PerTaskResult> per_task;

  bool operator==(const RunReport&) const = default;
};

// Scores episodes against tasks (paired by position, ids must match) and
// aggregates accuracy and runtime. Throws AlignmentError on id mismatch.
RunReport aggregate(const std::vector<Episode>& episodes,
                    const std::vector<TaskRecord>& tasks, Mode mode);

struct ComparisonReport {
  RunReport baseline;
  RunReport focused;
  double accuracy_abs_diff = 0.0;            // percentage points, focused - baseline
  std::optional<long> accuracy_rel_diff;     // percent, nearest integer; absent when
                                             // baseline accuracy is zero
  double runtime_abs_diff = 0.0;             // seconds, focused - baseline
  std::optional<long> runtime_rel_diff;      // percent reduction, nearest integer;
                                             // absent when baseline mean is zero
};

// Diff arithmetic matching the published convention: accuracy diffs read as
// improvement, runtime rel diff reads as reduction. Relative diffs are
// computed from unrounded inputs, then rounded to the nearest integer.
ComparisonReport compare(const RunReport& baseline, const RunReport& focused);

// Aligned-column text table, accuracy row plus runtime row.
std::string render_comparison_table(const ComparisonReport& report);

nlohmann::json report_to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& value);
nlohmann::json comparison_to_json(const ComparisonReport& report);

}  // namespace freact
