#include "freact/bench.hpp"

#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "freact/errors.hpp"
#include "freact/trace.hpp"

namespace freact {

namespace {

void write_json_file(const std::filesystem::path& path, const nlohmann::json& value) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << value.dump(2) << "\n";
}

std::vector<Episode> run_mode(Mode mode, const std::vector<TaskRecord>& tasks,
                              const RunConfig& config, ToolContext& tools,
                              const FewShotSet& fewshot, std::atomic<int>* failed) {
  const PromptPlan plan = make_plan(config, mode);
  const EngineConfig engine = make_engine_config(config, mode);

  std::vector<Episode> episodes(tasks.size());
  std::atomic<size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const TaskRecord& task = tasks[i];
      try {
        auto backend = make_backend(config);
        episodes[i] = run_episode(task.question, engine, *backend, tools.toolset(), plan,
                                  fewshot, task.id);
      } catch (const std::exception& ex) {
        // Partial failure: keep the run going and score this task as wrong.
        std::lock_guard lock(log_mutex);
        std::cerr << "task " << task.id << " failed: " << ex.what() << "\n";
        Episode failed_episode;
        failed_episode.id = task.id;
        failed_episode.question = task.question;
        failed_episode.mode = mode;
        failed_episode.termination = Termination::kBackendError;
        episodes[i] = std::move(failed_episode);
        ++*failed;
      }
    }
  };

  int thread_count = std::max(1, std::min<int>(config.concurrency,
                                               static_cast<int>(tasks.size())));
  if (thread_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return episodes;
}

}  // namespace

BenchResult run_bench(const BenchOptions& options, const RunConfig& config) {
  DatasetLoadResult loaded = load_dataset(options.dataset, options.format);
  std::vector<TaskRecord> tasks = sample_tasks(loaded.records, options.n, options.seed);

  std::filesystem::create_directories(options.out_dir);
  const nlohmann::json config_snapshot = config.to_json();
  write_json_file(options.out_dir / "config.json", config_snapshot);

  ToolContext tools(config);
  FewShotSet fewshot = load_fewshot(config);

  // Reruns over the same tasks hit identical queries; the page cache is
  // persisted beside the traces so they can skip the network.
  const std::filesystem::path cache_path = options.out_dir / "page-cache.jsonl";
  if (tools.cache() && std::filesystem::exists(cache_path)) {
    tools.cache()->load(cache_path);
  }

  BenchResult result;
  result.skipped_records = loaded.skipped;
  std::atomic<int> failed{0};

  for (Mode mode : options.modes) {
    std::vector<Episode> episodes = run_mode(mode, tasks, config, tools, fewshot, &failed);

    save_episodes(episodes,
                  options.out_dir / ("traces-" + std::string(to_string(mode)) + ".jsonl"),
                  config.slim_traces);

    RunReport report = aggregate(episodes, tasks, mode);
    nlohmann::json report_json = report_to_json(report);
    report_json["config"] = config_snapshot;
    write_json_file(options.out_dir / ("report-" + std::string(to_string(mode)) + ".json"),
                    report_json);
    result.reports.emplace_back(mode, std::move(report));
  }

  result.failed_episodes = failed.load();

  const RunReport* vanilla = nullptr;
  const RunReport* focused = nullptr;
  for (const auto& [mode, report] : result.reports) {
    (mode == Mode::kVanilla ? vanilla : focused) = &report;
  }
  if (vanilla && focused) {
    result.comparison = compare(*vanilla, *focused);
    nlohmann::json comparison_json = comparison_to_json(*result.comparison);
    comparison_json["config"] = config_snapshot;
    write_json_file(options.out_dir / "comparison.json", comparison_json);

    std::ofstream table(options.out_dir / "comparison.txt");
    table << render_comparison_table(*result.comparison);
  }

  if (tools.cache()) tools.cache()->save(cache_path);
  return result;
}

}  // namespace freact
