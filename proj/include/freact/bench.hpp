#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "freact/eval.hpp"
#include "freact/run_config.hpp"

namespace freact {

struct BenchOptions {
  std::filesystem::path dataset;
  DatasetFormat format = DatasetFormat::kSimpleJsonl;
  int n = 150;
  std::uint64_t seed = 42;
  std::vector<Mode> modes = {Mode::kVanilla, Mode::kFocused};
  std::filesystem::path out_dir = "bench-run";
};

struct BenchResult {
  std::vector<std::pair<Mode, RunReport>> reports;
  std::optional<ComparisonReport> comparison;  // set when both modes ran
  int skipped_records = 0;
  int failed_episodes = 0;  // episodes that threw; recorded as backend errors
};

// Samples n tasks, runs every requested mode over the same task order, and
// writes the run directory: config.json (the effective config snapshot),
// traces-<mode>.jsonl, report-<mode>.json, and, when both modes ran,
// comparison.json plus the comparison.txt table. Episodes run on a worker
// pool of config.concurrency threads; a task that throws is recorded as a
// backend-error episode and the run continues.
BenchResult run_bench(const BenchOptions& options, const RunConfig& config);

}  // namespace freact
