#include "freact/trace.hpp"

#include <algorithm>
#include <fstream>

#include "freact/errors.hpp"
#include "freact/text.hpp"

namespace freact {

namespace {

using nlohmann::json;

json action_to_json(const ParsedAction& parsed) {
  if (const Action* action = std::get_if<Action>(&parsed)) {
    ActionKey key = normalize_action(*action);
    return {{"kind", "action"},
            {"name", to_string(action->name)},
            {"argument", action->argument},
            {"key", {key.name, key.argument}}};
  }
  return {{"kind", "malformed"}, {"raw", std::get<MalformedAction>(parsed).raw}};
}

ParsedAction action_from_json(const json& value) {
  if (value.at("kind") == "malformed") {
    return MalformedAction{value.at("raw").get<std::string>()};
  }
  auto name = action_name_from(value.at("name").get<std::string>());
  if (!name) throw TraceParseError("unknown action name: " + value.at("name").dump());
  return Action{*name, value.at("argument").get<std::string>()};
}

json optional_to_json(const std::optional<std::string>& value) {
  return value ? json(*value) : json(nullptr);
}

std::optional<std::string> optional_from_json(const json& value, const char* key) {
  if (!value.contains(key) || value.at(key).is_null()) return std::nullopt;
  return value.at(key).get<std::string>();
}

}  // namespace

nlohmann::json episode_to_json(const Episode& episode, bool slim) {
  json steps = json::array();
  for (const Step& step : episode.steps) {
    json value = {{"index", step.index},
                  {"thought", step.thought},
                  {"action", action_to_json(step.action)},
                  {"observation", optional_to_json(step.observation)},
                  {"prompt", slim ? fnv1a_digest(step.prompt) : step.prompt},
                  {"raw_generation",
                   slim ? fnv1a_digest(step.raw_generation) : step.raw_generation},
                  {"reiterated", step.reiterated}};
    steps.push_back(std::move(value));
  }

  json body = {{"id", episode.id},
               {"question", episode.question},
               {"mode", to_string(episode.mode)},
               {"termination", to_string(episode.termination)},
               {"final_answer", optional_to_json(episode.final_answer)},
               {"timing",
                {{"wall_total", episode.timing.wall_total},
                 {"model_time", episode.timing.model_time},
                 {"tool_time", episode.timing.tool_time}}},
               {"steps", std::move(steps)},
               {"slim", slim}};
  if (slim) {
    body["forced_answer_prompt"] = episode.forced_answer_prompt
                                       ? json(fnv1a_digest(*episode.forced_answer_prompt))
                                       : json(nullptr);
  } else {
    body["forced_answer_prompt"] = optional_to_json(episode.forced_answer_prompt);
  }
  body["forced_answer_raw"] = optional_to_json(episode.forced_answer_raw);

  return {{"schema_version", kTraceSchemaVersion}, {"episode", std::move(body)}};
}

Episode episode_from_json(const nlohmann::json& record) {
  int version = record.value("schema_version", -1);
  if (version != kTraceSchemaVersion) {
    throw SchemaVersionError("unsupported trace schema version " + std::to_string(version) +
                             " (expected " + std::to_string(kTraceSchemaVersion) + ")");
  }
  const json& value = record.at("episode");

  Episode episode;
  episode.id = value.at("id").get<std::string>();
  episode.question = value.at("question").get<std::string>();
  auto mode = mode_from(value.at("mode").get<std::string>());
  if (!mode) throw TraceParseError("unknown mode: " + value.at("mode").dump());
  episode.mode = *mode;
  auto termination = termination_from(value.at("termination").get<std::string>());
  if (!termination) {
    throw TraceParseError("unknown termination: " + value.at("termination").dump());
  }
  episode.termination = *termination;
  episode.final_answer = optional_from_json(value, "final_answer");
  const json& timing = value.at("timing");
  episode.timing.wall_total = timing.at("wall_total").get<double>();
  episode.timing.model_time = timing.at("model_time").get<double>();
  episode.timing.tool_time = timing.at("tool_time").get<double>();
  episode.forced_answer_prompt = optional_from_json(value, "forced_answer_prompt");
  episode.forced_answer_raw = optional_from_json(value, "forced_answer_raw");

  for (const json& step_value : value.at("steps")) {
    Step step;
    step.index = step_value.at("index").get<int>();
    step.thought = step_value.at("thought").get<std::string>();
    step.action = action_from_json(step_value.at("action"));
    step.observation = optional_from_json(step_value, "observation");
    step.prompt = step_value.value("prompt", "");
    step.raw_generation = step_value.value("raw_generation", "");
    step.reiterated = step_value.value("reiterated", false);
    episode.steps.push_back(std::move(step));
  }
  return episode;
}

int save_episodes(const std::vector<Episode>& episodes, const std::filesystem::path& path,
                  bool slim) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write trace file: " + path.string());
  for (const Episode& episode : episodes) {
    out << episode_to_json(episode, slim).dump() << "\n";
  }
  return static_cast<int>(episodes.size());
}

std::vector<Episode> load_episodes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace file: " + path.string());
  std::vector<Episode> episodes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw TraceParseError("trace line " + std::to_string(line_no) + ": " + ex.what());
    }
    try {
      episodes.push_back(episode_from_json(record));
    } catch (const SchemaVersionError&) {
      throw;
    } catch (const nlohmann::json::exception& ex) {
      throw TraceParseError("trace line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return episodes;
}

std::vector<LoopGroup> detect_action_loops(const Episode& episode) {
  std::vector<LoopGroup> groups;  // insertion order = first occurrence
  for (const Step& step : episode.steps) {
    const Action* action = std::get_if<Action>(&step.action);
    if (!action || action->name == ActionName::kFinish) continue;
    ActionKey key = normalize_action(*action);
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const LoopGroup& g) { return g.key == key; });
    if (it == groups.end()) {
      groups.push_back(LoopGroup{std::move(key), {step.index}});
    } else {
      it->step_indices.push_back(step.index);
    }
  }
  std::erase_if(groups, [](const LoopGroup& g) { return g.step_indices.size() < 2; });
  return groups;
}

FailureSummary summarize_failures(const std::vector<Episode>& episodes) {
  if (episodes.empty()) throw InvalidInput("cannot summarize an empty episode list");

  FailureSummary summary;
  int loops = 0;
  int caps = 0;
  int malformed = 0;
  for (const Episode& episode : episodes) {
    if (!detect_action_loops(episode).empty()) ++loops;
    if (episode.termination == Termination::kStepCapReached) ++caps;
    bool has_malformed = false;
    for (const Step& step : episode.steps) {
      if (!is_well_formed(step.action)) has_malformed = true;
    }
    if (has_malformed) ++malformed;
    summary.step_histogram[static_cast<int>(episode.steps.size())] += 1;
  }
  double n = static_cast<double>(episodes.size());
  summary.loop_rate = loops / n;
  summary.cap_rate = caps / n;
  summary.malformed_rate = malformed / n;
  return summary;
}

}  // namespace freact
