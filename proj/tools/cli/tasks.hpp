#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "fixtures.hpp"
#include "report.hpp"

namespace tvflow::cli {

// Schema or usage problem; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Workspace {
  RandomWalkSpace space;
  std::map<std::string, StateSet> sets;
  std::map<std::string, StateFunction> functions;
  std::string source;
  std::string citation;  // empty unless built from a fixture
  std::uint64_t seed = 1;
};

Workspace workspace_from_file(const std::string& path);
Workspace workspace_from_fixture(const std::string& name, const FixtureParams& params);

// "a,b,c", "@name" for a named set, or a JSON array of ids.
StateSet parse_set(const Workspace& ws, const Json& spec, const std::string& field);
// "@name", a file path, or inline values (array in state order or object by id).
StateFunction parse_function(const Workspace& ws, const Json& spec, const std::string& field);

struct TaskOutput {
  Json report;
  std::optional<std::string> csv;
  bool ok = true;  // false when an asserted bound fails
};

inline constexpr const char* task_names[] = {"perim",      "tv",   "cheeger",  "calibrable", "eigencheck",
                                             "eigensearch", "flow", "poincare", "extinction", "iso"};

bool is_task(const std::string& name);

// Runs one task with JSON parameters; the report is wrapped with the task
// name, the space source and the fixture citation.
TaskOutput run_task(const std::string& task, const Json& params, const Workspace& ws);

// Exit code for a library error: 2 for bad input, 1 for numerical failure.
int exit_code_for(const std::exception& e);

}  // namespace tvflow::cli
