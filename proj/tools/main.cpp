#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "freact/bench.hpp"
#include "freact/engine.hpp"
#include "freact/errors.hpp"
#include "freact/eval.hpp"
#include "freact/run_config.hpp"
#include "freact/text.hpp"
#include "freact/trace.hpp"
#include "freact/wiki_api.hpp"

namespace {

using namespace freact;

constexpr int kExitUsage = 64;

struct ConfigFlags {
  std::optional<std::string> config_path;
  std::optional<std::string> backend;
  std::optional<std::string> endpoint;
  std::optional<std::string> model;
  std::optional<std::string> api_shape;
  std::optional<std::string> script;
  std::optional<std::string> tools;
  std::optional<std::string> fixture;
  std::optional<std::string> fewshot;
  std::optional<std::string> wiki_api;
  std::optional<int> max_rounds;
  std::optional<int> malformed_budget;
  std::optional<int> max_new_tokens;
  std::optional<int> concurrency;
  bool no_cache = false;
  bool slim = false;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file");
  cmd->add_option("--backend", flags.backend, "Backend: http or scripted");
  cmd->add_option("--endpoint", flags.endpoint, "OpenAI-compatible endpoint URL");
  cmd->add_option("--model", flags.model, "Model name sent to the endpoint");
  cmd->add_option("--api-shape", flags.api_shape, "chat or completions");
  cmd->add_option("--script", flags.script, "Scripted backend response file");
  cmd->add_option("--tools", flags.tools, "Tools: wiki or fixture");
  cmd->add_option("--fixture", flags.fixture, "Recorded tool fixture file");
  cmd->add_option("--fewshot", flags.fewshot, "Few-shot prompt file");
  cmd->add_option("--wiki-api", flags.wiki_api, "MediaWiki API URL");
  cmd->add_option("--max-rounds", flags.max_rounds, "Round cap per episode");
  cmd->add_option("--malformed-budget", flags.malformed_budget,
                  "Malformed actions tolerated per episode");
  cmd->add_option("--max-new-tokens", flags.max_new_tokens, "Token budget per round");
  cmd->add_option("--concurrency", flags.concurrency, "Concurrent episodes");
  cmd->add_flag("--no-cache", flags.no_cache, "Disable the shared page cache");
  cmd->add_flag("--slim", flags.slim, "Store digests instead of full prompts in traces");
}

RunConfig resolve_config(const ConfigFlags& flags) {
  RunConfig config =
      flags.config_path ? RunConfig::load_file(*flags.config_path) : RunConfig{};
  config.apply_env();
  if (flags.backend) config.backend = *flags.backend;
  if (flags.endpoint) config.endpoint = *flags.endpoint;
  if (flags.model) config.model = *flags.model;
  if (flags.api_shape) config.api_shape = *flags.api_shape;
  if (flags.script) config.script = *flags.script;
  if (flags.tools) config.tools = *flags.tools;
  if (flags.fixture) config.fixture = *flags.fixture;
  if (flags.fewshot) config.fewshot_path = *flags.fewshot;
  if (flags.wiki_api) config.wiki_api_url = *flags.wiki_api;
  if (flags.max_rounds) config.max_rounds = *flags.max_rounds;
  if (flags.malformed_budget) config.malformed_budget = *flags.malformed_budget;
  if (flags.max_new_tokens) config.max_new_tokens = *flags.max_new_tokens;
  if (flags.concurrency) config.concurrency = *flags.concurrency;
  if (flags.no_cache) config.cache_enabled = false;
  if (flags.slim) config.slim_traces = true;
  // When a script or fixture is given, select the matching implementation
  // unless the user overrode it explicitly.
  if (flags.script && !flags.backend) config.backend = "scripted";
  if (flags.fixture && !flags.tools) config.tools = "fixture";
  return config;
}

std::string excerpt(const std::string& text, size_t limit = 64) {
  std::string flat;
  bool pending = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending = !flat.empty();
      continue;
    }
    if (pending) flat.push_back(' ');
    pending = false;
    flat.push_back(c);
  }
  if (flat.size() <= limit) return flat;
  return flat.substr(0, limit) + "...";
}

int cmd_run(const std::string& question, const std::string& mode_name,
            const ConfigFlags& flags, const std::filesystem::path& out_dir) {
  auto mode = mode_from(mode_name);
  if (!mode) {
    std::cerr << "unknown mode: " << mode_name << "\n";
    return kExitUsage;
  }

  RunConfig config = resolve_config(flags);
  ToolContext tools(config);
  FewShotSet fewshot = load_fewshot(config);
  PromptPlan plan = make_plan(config, *mode);
  EngineConfig engine = make_engine_config(config, *mode);
  auto backend = make_backend(config);

  Episode episode =
      run_episode(question, engine, *backend, tools.toolset(), plan, fewshot, "cli");

  std::cout << "answer: " << (episode.final_answer ? *episode.final_answer : "<none>") << "\n";
  std::cout << "termination: " << to_string(episode.termination) << "\n";
  char timing[128];
  std::snprintf(timing, sizeof(timing), "steps: %zu (model %.2fs, tools %.2fs, wall %.2fs)",
                episode.steps.size(), episode.timing.model_time, episode.timing.tool_time,
                episode.timing.wall_total);
  std::cout << timing << "\n";
  for (const Step& step : episode.steps) {
    std::cout << "  " << step.index << ". ";
    if (const Action* action = std::get_if<Action>(&step.action)) {
      std::cout << render_action(*action);
    } else {
      std::cout << "<malformed> " << excerpt(std::get<MalformedAction>(step.action).raw, 40);
    }
    if (step.observation) {
      std::cout << " -> " << excerpt(*step.observation);
    }
    std::cout << "\n";
  }

  std::filesystem::create_directories(out_dir);
  save_episodes({episode}, out_dir / "trace.jsonl", config.slim_traces);
  std::cout << "trace: " << (out_dir / "trace.jsonl").string() << "\n";

  switch (episode.termination) {
    case Termination::kFinished:
    case Termination::kEarlyStopForced:
      return 0;
    case Termination::kStepCapReached:
    case Termination::kMalformedBudgetExceeded:
      return 2;
    case Termination::kBackendError:
      return 3;
  }
  return 3;
}

int cmd_bench(const std::string& dataset, const std::string& format_name, int n,
              std::uint64_t seed, const std::string& modes_csv, const ConfigFlags& flags,
              const std::filesystem::path& out_dir) {
  auto format = dataset_format_from(format_name);
  if (!format) {
    std::cerr << "unknown dataset format: " << format_name << "\n";
    return kExitUsage;
  }

  BenchOptions options;
  options.dataset = dataset;
  options.format = *format;
  options.n = n;
  options.seed = seed;
  options.out_dir = out_dir;
  options.modes.clear();
  {
    std::string token;
    std::istringstream stream(modes_csv);
    while (std::getline(stream, token, ',')) {
      auto mode = mode_from(trim(token));
      if (!mode) {
        std::cerr << "unknown mode in --modes: " << token << "\n";
        return kExitUsage;
      }
      options.modes.push_back(*mode);
    }
  }
  if (options.modes.empty()) {
    std::cerr << "--modes must name at least one mode\n";
    return kExitUsage;
  }

  RunConfig config = resolve_config(flags);
  BenchResult result;
  try {
    result = run_bench(options, config);
  } catch (const InvalidInput& ex) {
    // Asking for more tasks than the dataset holds is a usage error.
    std::cerr << "error: " << ex.what() << "\n";
    return kExitUsage;
  }

  if (result.skipped_records > 0) {
    std::cerr << "warning: skipped " << result.skipped_records
              << " dataset records with empty question/answer\n";
  }
  if (result.failed_episodes > 0) {
    std::cerr << "warning: " << result.failed_episodes
              << " episodes failed and were scored as incorrect\n";
  }

  for (const auto& [mode, report] : result.reports) {
    char line[160];
    std::snprintf(line, sizeof(line),
                  "%-8s accuracy %.1f%% (%d/%d)  runtime %.2f+-%.2fs  f1 %.3f",
                  to_string(mode), report.accuracy * 100.0, report.n_correct, report.n_tasks,
                  report.runtime_mean, report.runtime_std, report.f1_mean);
    std::cout << line << "\n";
  }
  if (result.comparison) {
    std::cout << "\n" << render_comparison_table(*result.comparison);
  }
  std::cout << "run directory: " << options.out_dir.string() << "\n";
  return 0;
}

int cmd_analyze(const std::vector<std::string>& trace_paths) {
  std::vector<Episode> episodes;
  for (const std::string& path : trace_paths) {
    try {
      std::vector<Episode> loaded = load_episodes(path);
      episodes.insert(episodes.end(), loaded.begin(), loaded.end());
    } catch (const Error& ex) {
      std::cerr << "error: " << ex.what() << "\n";
      return 1;
    }
  }
  if (episodes.empty()) {
    std::cerr << "error: no episodes in " << trace_paths.size() << " trace file(s)\n";
    return 1;
  }

  FailureSummary summary = summarize_failures(episodes);
  char line[160];
  std::snprintf(line, sizeof(line),
                "episodes: %zu\nloop rate: %.3f\ncap rate: %.3f\nmalformed rate: %.3f",
                episodes.size(), summary.loop_rate, summary.cap_rate,
                summary.malformed_rate);
  std::cout << line << "\n";
  std::cout << "step histogram:";
  for (const auto& [steps, count] : summary.step_histogram) {
    std::cout << " " << steps << ":" << count;
  }
  std::cout << "\n";

  for (const Episode& episode : episodes) {
    std::vector<LoopGroup> loops = detect_action_loops(episode);
    std::cout << episode.id << "  mode=" << to_string(episode.mode)
              << "  termination=" << to_string(episode.termination)
              << "  steps=" << episode.steps.size();
    if (loops.empty()) {
      std::cout << "  loops=none\n";
      continue;
    }
    std::cout << "  loops:";
    for (const LoopGroup& group : loops) {
      std::cout << " " << group.key.name << "[" << group.key.argument << "]@";
      for (size_t i = 0; i < group.step_indices.size(); ++i) {
        if (i > 0) std::cout << ",";
        std::cout << group.step_indices[i];
      }
    }
    std::cout << "\n";
  }
  return 0;
}

int cmd_record_fixture(const std::string& actions_path, const std::string& out_path,
                       const ConfigFlags& flags) {
  std::ifstream in(actions_path);
  if (!in) {
    std::cerr << "error: cannot open actions file: " << actions_path << "\n";
    return 1;
  }
  std::vector<Action> actions;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ParsedAction parsed = parse_action(line);
    if (!is_well_formed(parsed)) {
      std::cerr << "error: actions line " << line_no << " is not a valid action: " << line
                << "\n";
      return 1;
    }
    actions.push_back(std::get<Action>(parsed));
  }

  RunConfig config = resolve_config(flags);
  MediaWikiConfig wiki;
  wiki.api_url = config.wiki_api_url;
  MediaWikiSource source(wiki);
  WikiToolsetOptions options;
  options.summary_sentences = config.summary_sentences;
  WikiToolset toolset(source, options);

  int written = record_fixture(actions, toolset, out_path);
  std::cout << "wrote " << written << " entries to " << out_path << "\n";
  return 0;
}

int cmd_compare(const std::string& baseline_path, const std::string& focused_path) {
  auto load_report = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open report: " + path);
    return report_from_json(nlohmann::json::parse(in));
  };
  try {
    ComparisonReport report = compare(load_report(baseline_path), load_report(focused_path));
    std::cout << render_comparison_table(report);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ReAct / Focused ReAct agent runtime and benchmark harness"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Answer one question");
  std::string question;
  std::string mode_name = "vanilla";
  std::filesystem::path run_out = "freact-run";
  ConfigFlags run_flags;
  run->add_option("--question", question, "The question to answer")->required();
  run->add_option("--mode", mode_name, "vanilla or focused");
  run->add_option("--out", run_out, "Output directory for the trace");
  add_config_flags(run, run_flags);

  // bench
  auto* bench = app.add_subcommand("bench", "Benchmark a dataset in one or both modes");
  std::string dataset;
  std::string format_name = "simple-jsonl";
  int n = 150;
  std::uint64_t seed = 42;
  std::string modes_csv = "vanilla,focused";
  std::filesystem::path bench_out = "bench-run";
  ConfigFlags bench_flags;
  bench->add_option("--dataset", dataset, "Dataset file")->required();
  bench->add_option("--format", format_name, "hotpot-json or simple-jsonl");
  bench->add_option("--n", n, "Number of tasks to sample");
  bench->add_option("--seed", seed, "Sampling seed");
  bench->add_option("--modes", modes_csv, "Comma-separated modes to run");
  bench->add_option("--out", bench_out, "Run directory");
  add_config_flags(bench, bench_flags);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Summarize failure modes in trace files");
  std::vector<std::string> trace_paths;
  analyze->add_option("traces", trace_paths, "Trace files (JSONL)")->required();

  // record-fixture
  auto* record = app.add_subcommand("record-fixture",
                                    "Execute actions live and record observations");
  std::string actions_path;
  std::string fixture_out;
  ConfigFlags record_flags;
  record->add_option("--actions", actions_path, "File with one action per line")->required();
  record->add_option("--out", fixture_out, "Fixture file to write")->required();
  add_config_flags(record, record_flags);

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "Diff two run reports");
  std::string baseline_path;
  std::string focused_path;
  compare_cmd->add_option("--baseline", baseline_path, "Baseline report JSON")->required();
  compare_cmd->add_option("--focused", focused_path, "Focused report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(run)) return cmd_run(question, mode_name, run_flags, run_out);
    if (app.got_subcommand(bench)) {
      return cmd_bench(dataset, format_name, n, seed, modes_csv, bench_flags, bench_out);
    }
    if (app.got_subcommand(analyze)) return cmd_analyze(trace_paths);
    if (app.got_subcommand(record)) {
      return cmd_record_fixture(actions_path, fixture_out, record_flags);
    }
    if (app.got_subcommand(compare_cmd)) return cmd_compare(baseline_path, focused_path);
  } catch (const BackendError& ex) {
    std::cerr << "backend error: " << ex.what() << "\n";
    return 3;
  } catch (const ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
