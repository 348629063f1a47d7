#include "experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "tasks.hpp"
#include "tvflow/errors.hpp"
#include "tvflow/io.hpp"

namespace tvflow::cli {

namespace fs = std::filesystem;

namespace {

Workspace load_workspace(const Json& spec, const fs::path& base) {
  if (spec.is_string()) {
    fs::path p = spec.get<std::string>();
    if (p.is_relative()) p = base / p;
    auto ws = workspace_from_file(p.string());
    ws.source = spec.get<std::string>();
    return ws;
  }
  if (spec.is_object()) {
    for (const auto& [key, value] : spec.items())
      if (key != "fixture" && key != "params") throw UsageError("space." + key + ": unknown field");
    if (!spec.contains("fixture") || !spec["fixture"].is_string())
      throw UsageError("space.fixture: expected a fixture name");
    FixtureParams params;
    if (spec.contains("params")) {
      if (!spec["params"].is_object()) throw UsageError("space.params: expected an object");
      for (const auto& [key, value] : spec["params"].items()) {
        if (!value.is_number()) throw UsageError("space.params." + key + ": expected a number");
        params[key] = value.get<double>();
      }
    }
    try {
      return workspace_from_fixture(spec["fixture"].get<std::string>(), params);
    } catch (const Error& e) {
      throw UsageError(std::string("space: ") + e.what());
    }
  }
  throw UsageError("space: expected a path or {\"fixture\": name}");
}

// File references inside tasks are relative to the config file.
Json resolve_paths(Json params, const fs::path& base) {
  for (const char* key : {"fn", "u0"}) {
    if (!params.contains(key) || !params[key].is_string()) continue;
    auto s = params[key].get<std::string>();
    if (s.empty() || s[0] == '@') continue;
    fs::path p = s;
    if (p.is_relative()) params[key] = (base / p).string();
  }
  return params;
}

}  // namespace

int run_experiment(const std::string& config_path, const std::string& out_dir, std::ostream& log) {
  Json config;
  try {
    config = Json::parse(read_text_file(config_path));
  } catch (const Json::parse_error& e) {
    log << "error: " << config_path << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 2;
  }
  const fs::path base = fs::path(config_path).parent_path();

  Workspace ws;
  try {
    if (!config.is_object()) throw UsageError("config: expected an object");
    for (const auto& [key, value] : config.items())
      if (key != "space" && key != "tasks" && key != "seed") throw UsageError(key + ": unknown field");
    if (!config.contains("space")) throw UsageError("space: required");
    if (config.contains("tasks") && !config["tasks"].is_array()) throw UsageError("tasks: expected an array");
    const Json tasks = config.value("tasks", Json::array());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const std::string where = "tasks[" + std::to_string(i) + "]";
      if (!tasks[i].is_object()) throw UsageError(where + ": expected an object");
      if (!tasks[i].contains("task") || !tasks[i]["task"].is_string())
        throw UsageError(where + ".task: expected a task name");
      auto name = tasks[i]["task"].get<std::string>();
      if (!is_task(name)) throw UsageError(where + ".task: unknown task '" + name + "'");
    }
    if (config.contains("seed") && !config["seed"].is_number_unsigned())
      throw UsageError("seed: expected a nonnegative integer");
    ws = load_workspace(config["space"], base);
    ws.seed = config.value("seed", std::uint64_t{1});
  } catch (const UsageError& e) {
    log << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    log << "error: space: " << e.what() << '\n';
    return exit_code_for(e) == 1 ? 1 : 2;
  }

  fs::create_directories(out_dir);
  const Json tasks = config.value("tasks", Json::array());
  int status = 0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto name = tasks[i]["task"].get<std::string>();
    char stem[64];
    std::snprintf(stem, sizeof stem, "%02zu-%s", i, name.c_str());
    try {
      auto out = run_task(name, resolve_paths(tasks[i], base), ws);
      std::ofstream(fs::path(out_dir) / (std::string(stem) + ".json")) << out.report.dump(2) << '\n';
      if (out.csv) std::ofstream(fs::path(out_dir) / (std::string(stem) + ".csv")) << *out.csv;
      if (!out.ok) {
        log << "tasks[" << i << "] (" << name << "): asserted bound failed\n";
        status = std::max(status, 1);
      }
    } catch (const UsageError& e) {
      log << "error: tasks[" << i << "]." << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      log << "error: tasks[" << i << "] (" << name << "): " << e.what() << '\n';
      status = std::max(status, exit_code_for(e));
      if (status == 2) return 2;
    }
  }
  return status;
}

}  // namespace tvflow::cli
