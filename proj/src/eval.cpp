#include "freact/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "freact/errors.hpp"
#include "freact/text.hpp"

namespace freact {

namespace {

using nlohmann::json;

TaskRecord task_from_json(const json& value, const char* id_key) {
  TaskRecord task;
  if (value.contains(id_key)) task.id = value.at(id_key).get<std::string>();
  task.question = trim(value.value("question", ""));
  task.gold_answer = trim(value.value("answer", ""));
  return task;
}

}  // namespace

std::optional<DatasetFormat> dataset_format_from(const std::string& token) {
  std::string lowered = to_lower(token);
  if (lowered == "hotpot-json") return DatasetFormat::kHotpotJson;
  if (lowered == "simple-jsonl") return DatasetFormat::kSimpleJsonl;
  return std::nullopt;
}

DatasetLoadResult load_dataset(const std::filesystem::path& path, DatasetFormat format) {
  std::ifstream in(path);
  if (!in) throw DatasetFormatError("cannot open dataset: " + path.string());

  DatasetLoadResult result;
  auto keep_or_skip = [&result](TaskRecord task) {
    if (task.question.empty() || task.gold_answer.empty()) {
      ++result.skipped;
      return;
    }
    if (task.id.empty()) task.id = "task-" + std::to_string(result.records.size() + 1);
    result.records.push_back(std::move(task));
  };

  if (format == DatasetFormat::kHotpotJson) {
    try {
      json parsed = json::parse(in);
      if (!parsed.is_array()) throw DatasetFormatError("hotpot-json root must be an array");
      for (const auto& value : parsed) keep_or_skip(task_from_json(value, "_id"));
    } catch (const json::exception& ex) {
      throw DatasetFormatError("dataset " + path.string() + ": " + ex.what());
    }
  } else {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      try {
        keep_or_skip(task_from_json(json::parse(line), "id"));
      } catch (const json::exception& ex) {
        throw DatasetFormatError("dataset line " + std::to_string(line_no) + ": " + ex.what());
      }
    }
  }
  return result;
}

std::vector<TaskRecord> sample_tasks(const std::vector<TaskRecord>& records, int n,
                                     std::uint64_t seed) {
  if (n < 0 || static_cast<size_t>(n) > records.size()) {
    throw InvalidInput("sample size " + std::to_string(n) + " exceeds dataset size " +
                       std::to_string(records.size()));
  }
  std::vector<size_t> order(records.size());
  std::iota(order.begin(), order.end(), size_t{0});
  // Partial Fisher-Yates with a hand-bounded draw: std::mt19937_64 output is
  // specified exactly, so the sample is reproducible across platforms.
  std::mt19937_64 rng(seed);
  std::vector<TaskRecord> sampled;
  sampled.reserve(static_cast<size_t>(n));
  for (size_t i = 0; i < static_cast<size_t>(n); ++i) {
    size_t j = i + static_cast<size_t>(rng() % (order.size() - i));
    std::swap(order[i], order[j]);
    sampled.push_back(records[order[i]]);
  }
  return sampled;
}

std::string normalize_answer(const std::string& text) {
  std::string lowered;
  lowered.reserve(text.size());
  for (char c : text) {
    unsigned char uc = static_cast<unsigned char>(c);
    if (std::ispunct(uc)) continue;
    lowered.push_back(static_cast<char>(std::tolower(uc)));
  }
  std::istringstream stream(lowered);
  std::string token;
  std::string out;
  while (stream >> token) {
    if (token == "a" || token == "an" || token == "the") continue;
    if (!out.empty()) out.push_back(' ');
    out += token;
  }
  return out;
}

bool exact_match(const std::string& predicted, const std::string& gold) {
  return normalize_answer(predicted) == normalize_answer(gold);
}

double f1_score(const std::string& predicted, const std::string& gold) {
  auto tokens = [](const std::string& text) {
    std::istringstream stream(normalize_answer(text));
    std::vector<std::string> out;
    std::string token;
    while (stream >> token) out.push_back(token);
    return out;
  };
  std::vector<std::string> pred = tokens(predicted);
  std::vector<std::string> ref = tokens(gold);
  if (pred.empty() || ref.empty()) return pred == ref ? 1.0 : 0.0;

  std::map<std::string, int> counts;
  for (const auto& t : ref) ++counts[t];
  int common = 0;
  for (const auto& t : pred) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      ++common;
      --it->second;
    }
  }
  if (common == 0) return 0.0;
  double precision = static_cast<double>(common) / static_cast<double>(pred.size());
  double recall = static_cast<double>(common) / static_cast<double>(ref.size());
  return 2.0 * precision * recall / (precision + recall);
}

RunReport aggregate(const std::vector<Episode>& episodes,
                    const std::vector<TaskRecord>& tasks, Mode mode) {
  if (episodes.size() != tasks.size()) {
    throw AlignmentError("episode count " + std::to_string(episodes.size()) +
                         " != task count " + std::to_string(tasks.size()));
  }

  RunReport report;
  report.mode = mode;
  report.n_tasks = static_cast<int>(tasks.size());

  // Welford's running mean/variance; the test oracle recomputes two-pass.
  double mean = 0.0;
  double m2 = 0.0;
  double f1_sum = 0.0;
  size_t n = 0;

  for (size_t i = 0; i < episodes.size(); ++i) {
    const Episode& episode = episodes[i];
    const TaskRecord& task = tasks[i];
    if (episode.id != task.id) {
      throw AlignmentError("episode id '" + episode.id + "' does not match task id '" +
                           task.id + "' at position " + std::to_string(i));
    }

    PerTaskResult row;
    row.id = task.id;
    row.wall_total = episode.timing.wall_total;
    row.termination = episode.termination;
    if (episode.final_answer) {
      row.correct = exact_match(*episode.final_answer, task.gold_answer);
      row.f1 = f1_score(*episode.final_answer, task.gold_answer);
    }
    if (row.correct) ++report.n_correct;
    f1_sum += row.f1;

    ++n;
    double delta = row.wall_total - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (row.wall_total - mean);

    report.per_task.push_back(std::move(row));
  }

  if (report.n_tasks > 0) {
    report.accuracy = static_cast<double>(report.n_correct) / report.n_tasks;
    report.f1_mean = f1_sum / report.n_tasks;
    report.runtime_mean = mean;
    report.runtime_std = report.n_tasks > 1
                             ? std::sqrt(m2 / static_cast<double>(report.n_tasks - 1))
                             : 0.0;
  }
  return report;
}

ComparisonReport compare(const RunReport& baseline, const RunReport& focused) {
  ComparisonReport report;
  report.baseline = baseline;
  report.focused = focused;

  report.accuracy_abs_diff = (focused.accuracy - baseline.accuracy) * 100.0;
  if (baseline.accuracy != 0.0) {
    report.accuracy_rel_diff =
        std::lround(100.0 * (focused.accuracy - baseline.accuracy) / baseline.accuracy);
  }

  report.runtime_abs_diff = focused.runtime_mean - baseline.runtime_mean;
  if (baseline.runtime_mean != 0.0) {
    // Reported as a reduction, so faster Focused runs come out positive.
    report.runtime_rel_diff = std::lround(
        100.0 * (baseline.runtime_mean - focused.runtime_mean) / baseline.runtime_mean);
  }
  return report;
}

namespace {

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

// Two decimals with a single trailing zero trimmed: 4.00 -> "4.0", 0.73 ->
// "0.73". Matches the published cell style.
std::string format_diff(double value) {
  std::string out = format_fixed(value, 2);
  if (out.size() > 2 && out.back() == '0' && out[out.size() - 2] != '.') out.pop_back();
  return out;
}

std::string rel_cell(const std::optional<long>& rel) {
  return rel ? std::to_string(*rel) + "%" : "n/a";
}

}  // namespace

std::string render_comparison_table(const ComparisonReport& report) {
  const RunReport& b = report.baseline;
  const RunReport& f = report.focused;

  std::string acc_base = format_fixed(b.accuracy * 100.0, 1) + "%";
  std::string acc_focused = format_fixed(f.accuracy * 100.0, 1) + "%";
  std::string acc_diff = (report.accuracy_abs_diff >= 0 ? "+" : "") +
                         format_fixed(report.accuracy_abs_diff, 1) + " / " +
                         rel_cell(report.accuracy_rel_diff);

  std::string rt_base =
      format_fixed(b.runtime_mean, 2) + "+-" + format_fixed(b.runtime_std, 2) + "s";
  std::string rt_focused =
      format_fixed(f.runtime_mean, 2) + "+-" + format_fixed(f.runtime_std, 2) + "s";
  std::string rt_diff = format_diff(report.runtime_abs_diff) + " / " +
                        rel_cell(report.runtime_rel_diff);

  const std::string headers[4] = {"", "ReAct", "Focused ReAct", "abs./rel. diff"};
  const std::string rows[2][4] = {
      {"Accuracy", acc_base, acc_focused, acc_diff},
      {"Runtime (mean+-std)", rt_base, rt_focused, rt_diff},
  };

  size_t widths[4];
  for (int c = 0; c < 4; ++c) {
    widths[c] = headers[c].size();
    for (const auto& row : rows) widths[c] = std::max(widths[c], row[c].size());
  }

  std::string out;
  auto emit_row = [&](const std::string* cells) {
    for (int c = 0; c < 4; ++c) {
      out += cells[c];
      if (c < 3) out += std::string(widths[c] - cells[c].size() + 2, ' ');
    }
    out += "\n";
  };
  emit_row(headers);
  for (const auto& row : rows) emit_row(row);
  return out;
}

nlohmann::json report_to_json(const RunReport& report) {
  json per_task = json::array();
  for (const PerTaskResult& row : report.per_task) {
    per_task.push_back({{"id", row.id},
                        {"correct", row.correct},
                        {"wall_total", row.wall_total},
                        {"termination", to_string(row.termination)},
                        {"f1", row.f1}});
  }
  return {{"mode", to_string(report.mode)},
          {"n_tasks", report.n_tasks},
          {"n_correct", report.n_correct},
          {"accuracy", report.accuracy},
          {"runtime_mean", report.runtime_mean},
          {"runtime_std", report.runtime_std},
          {"f1_mean", report.f1_mean},
          {"per_task", per_task}};
}

RunReport report_from_json(const nlohmann::json& value) {
  RunReport report;
  auto mode = mode_from(value.at("mode").get<std::string>());
  if (!mode) throw TraceParseError("unknown mode in report");
  report.mode = *mode;
  report.n_tasks = value.at("n_tasks").get<int>();
  report.n_correct = value.at("n_correct").get<int>();
  report.accuracy = value.at("accuracy").get<double>();
  report.runtime_mean = value.at("runtime_mean").get<double>();
  report.runtime_std = value.at("runtime_std").get<double>();
  report.f1_mean = value.value("f1_mean", 0.0);
  for (const auto& row : value.value("per_task", json::array())) {
    PerTaskResult task;
    task.id = row.at("id").get<std::string>();
    task.correct = row.at("correct").get<bool>();
    task.wall_total = row.at("wall_total").get<double>();
    auto termination = termination_from(row.at("termination").get<std::string>());
    if (!termination) throw TraceParseError("unknown termination in report");
    task.termination = *termination;
    task.f1 = row.value("f1", 0.0);
    report.per_task.push_back(std::move(task));
  }
  return report;
}

nlohmann::json comparison_to_json(const ComparisonReport& report) {
  json value = {{"baseline", report_to_json(report.baseline)},
                {"focused", report_to_json(report.focused)},
                {"accuracy_abs_diff", report.accuracy_abs_diff},
                {"runtime_abs_diff", report.runtime_abs_diff}};
  value["accuracy_rel_diff"] =
      report.accuracy_rel_diff ? json(*report.accuracy_rel_diff) : json(nullptr);
  value["runtime_rel_diff"] =
      report.runtime_rel_diff ? json(*report.runtime_rel_diff) : json(nullptr);
  return value;
}

}  // namespace freact
