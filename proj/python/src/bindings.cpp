#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "freact/engine.hpp"
#include "freact/errors.hpp"
#include "freact/eval.hpp"
#include "freact/prompting.hpp"
#include "freact/trace.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

using namespace freact;

py::object json_to_py(const json& value) {
  switch (value.type()) {
    case json::value_t::null: return py::none();
    case json::value_t::boolean: return py::bool_(value.get<bool>());
    case json::value_t::number_integer: return py::int_(value.get<long long>());
    case json::value_t::number_unsigned: return py::int_(value.get<unsigned long long>());
    case json::value_t::number_float: return py::float_(value.get<double>());
    case json::value_t::string: return py::str(value.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const auto& item : value) out.append(json_to_py(item));
      return out;
    }
    case json::value_t::object: {
      py::dict out;
      for (const auto& [key, item] : value.items()) out[py::str(key)] = json_to_py(item);
      return out;
    }
    default: return py::none();
  }
}

json py_to_json(const py::handle& obj) {
  if (obj.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(obj)) return obj.cast<bool>();
  if (py::isinstance<py::int_>(obj)) return obj.cast<long long>();
  if (py::isinstance<py::float_>(obj)) return obj.cast<double>();
  if (py::isinstance<py::str>(obj)) return obj.cast<std::string>();
  if (py::isinstance<py::dict>(obj)) {
    json out = json::object();
    for (auto item : obj.cast<py::dict>()) {
      out[item.first.cast<std::string>()] = py_to_json(item.second);
    }
    return out;
  }
  if (py::isinstance<py::list>(obj) || py::isinstance<py::tuple>(obj)) {
    json out = json::array();
    for (auto item : obj.cast<py::sequence>()) out.push_back(py_to_json(item));
    return out;
  }
  throw py::type_error("cannot convert python object to JSON");
}

Action require_action(const std::string& line) {
  ParsedAction parsed = parse_action(line);
  if (!is_well_formed(parsed)) {
    throw InvalidInput("not a well-formed action: " + line);
  }
  return std::get<Action>(parsed);
}

std::vector<ScriptEntry> script_from_py(const py::sequence& script) {
  std::vector<ScriptEntry> entries;
  for (auto item : script) {
    if (py::isinstance<py::str>(item)) {
      entries.push_back(ScriptEntry{item.cast<std::string>(), std::nullopt});
      continue;
    }
    py::dict spec = item.cast<py::dict>();
    ScriptEntry entry;
    entry.response = spec["response"].cast<std::string>();
    if (spec.contains("expected_prompt_substring")) {
      entry.expected_prompt_substring =
          spec["expected_prompt_substring"].cast<std::string>();
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "ReAct / Focused ReAct agent runtime core";

  py::register_exception<Error>(m, "CoreError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidInput& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.attr("TRACE_SCHEMA_VERSION") = kTraceSchemaVersion;

  m.def(
      "parse_action",
      [](const std::string& raw) {
        ParsedAction parsed = parse_action(raw);
        py::dict out;
        if (const Action* action = std::get_if<Action>(&parsed)) {
          out["kind"] = "action";
          out["name"] = to_string(action->name);
          out["argument"] = action->argument;
        } else {
          out["kind"] = "malformed";
          out["raw"] = std::get<MalformedAction>(parsed).raw;
        }
        return out;
      },
      py::arg("raw"),
      "Parse one action line; returns {'kind': 'action'|'malformed', ...}.");

  m.def(
      "normalize_action",
      [](const std::string& action_line) {
        ActionKey key = normalize_action(require_action(action_line));
        return py::make_tuple(key.name, key.argument);
      },
      py::arg("action_line"),
      "Normalized (name, argument) key whose equality defines a repeated action.");

  m.def(
      "parse_model_block",
      [](const std::string& raw) {
        ModelBlock block = parse_model_block(raw);
        py::dict out;
        out["thought"] = block.thought;
        out["action_line"] =
            block.action_line ? py::object(py::str(*block.action_line)) : py::none();
        return out;
      },
      py::arg("raw"));

  m.def(
      "detect_duplicate",
      [](const std::vector<std::string>& prior, const std::string& candidate) {
        std::vector<Action> actions;
        actions.reserve(prior.size());
        for (const std::string& line : prior) actions.push_back(require_action(line));
        return detect_duplicate(actions, require_action(candidate));
      },
      py::arg("prior"), py::arg("candidate"),
      "True iff candidate repeats any prior non-Finish action (normalized keys).");

  m.def("normalize_answer", &normalize_answer, py::arg("text"));
  m.def("exact_match", &exact_match, py::arg("predicted"), py::arg("gold"));
  m.def("f1_score", &f1_score, py::arg("predicted"), py::arg("gold"));

  m.def(
      "sample_tasks",
      [](const py::list& records, int n, std::uint64_t seed) {
        std::vector<TaskRecord> tasks;
        for (auto item : records) {
          py::dict record = item.cast<py::dict>();
          tasks.push_back(TaskRecord{record["id"].cast<std::string>(),
                                     record["question"].cast<std::string>(),
                                     record["answer"].cast<std::string>()});
        }
        py::list out;
        for (const TaskRecord& task : sample_tasks(tasks, n, seed)) {
          py::dict record;
          record["id"] = task.id;
          record["question"] = task.question;
          record["answer"] = task.gold_answer;
          out.append(record);
        }
        return out;
      },
      py::arg("records"), py::arg("n"), py::arg("seed"),
      "Deterministic sample without replacement over {id, question, answer} dicts.");

  m.def(
      "compare_reports",
      [](const py::dict& baseline, const py::dict& focused) {
        ComparisonReport report =
            compare(report_from_json(py_to_json(baseline)), report_from_json(py_to_json(focused)));
        return json_to_py(comparison_to_json(report));
      },
      py::arg("baseline"), py::arg("focused"),
      "Diff two run reports (accuracy in points, runtime as reduction percent).");

  m.def(
      "build_initial_prompt",
      [](const std::string& question) {
        return build_initial_prompt(default_fewshot(), question);
      },
      py::arg("question"));

  m.def(
      "build_round_prompt",
      [](const std::string& mode_name, const std::string& base, const std::string& transcript,
         int round, const std::string& question) {
        auto mode = mode_from(mode_name);
        if (!mode) throw InvalidInput("unknown mode: " + mode_name);
        PromptPlan plan;
        plan.mode = *mode;
        return build_round_prompt(plan, base, transcript, round, question);
      },
      py::arg("mode"), py::arg("base"), py::arg("transcript"), py::arg("round"),
      py::arg("question"));

  m.def(
      "run_scripted_episode",
      [](const std::string& question, const py::sequence& script, const py::dict& fixture,
         const std::string& mode_name, int max_rounds, int malformed_budget,
         const std::string& episode_id) {
        auto mode = mode_from(mode_name);
        if (!mode) throw InvalidInput("unknown mode: " + mode_name);

        ScriptedBackend backend(script_from_py(script));
        std::vector<FixtureEntry> entries;
        for (auto item : fixture) {
          FixtureEntry entry;
          entry.key = normalize_action(require_action(item.first.cast<std::string>()));
          entry.observation = item.second.cast<std::string>();
          entries.push_back(std::move(entry));
        }
        FixtureToolset tools(std::move(entries));

        EngineConfig config;
        config.max_rounds = max_rounds;
        config.malformed_budget = malformed_budget;
        config.mode = *mode;
        PromptPlan plan;
        plan.mode = *mode;

        Episode episode = run_episode(question, config, backend, tools, plan,
                                      default_fewshot(), episode_id);
        return json_to_py(episode_to_json(episode));
      },
      py::arg("question"), py::arg("script"), py::arg("fixture"),
      py::arg("mode") = "focused", py::arg("max_rounds") = 8,
      py::arg("malformed_budget") = 2, py::arg("episode_id") = "py",
      "Run one episode against a scripted backend and an action->observation fixture; "
      "returns the trace record as a dict.");

  m.def(
      "detect_action_loops",
      [](const py::dict& trace_record) {
        Episode episode = episode_from_json(py_to_json(trace_record));
        py::list out;
        for (const LoopGroup& group : detect_action_loops(episode)) {
          py::dict item;
          item["key"] = py::make_tuple(group.key.name, group.key.argument);
          item["step_indices"] = group.step_indices;
          out.append(item);
        }
        return out;
      },
      py::arg("trace_record"));

  m.def(
      "summarize_failures",
      [](const py::list& trace_records) {
        std::vector<Episode> episodes;
        for (auto item : trace_records) {
          episodes.push_back(episode_from_json(py_to_json(item)));
        }
        FailureSummary summary = summarize_failures(episodes);
        py::dict out;
        out["loop_rate"] = summary.loop_rate;
        out["cap_rate"] = summary.cap_rate;
        out["malformed_rate"] = summary.malformed_rate;
        py::dict histogram;
        for (const auto& [steps, count] : summary.step_histogram) {
          histogram[py::int_(steps)] = count;
        }
        out["step_histogram"] = histogram;
        return out;
      },
      py::arg("trace_records"));
}
