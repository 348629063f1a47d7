#pragma once

#include <ostream>
#include <string>

namespace tvflow::cli {

// Config: {"space": path | {"fixture": name, "params": {...}}, "seed": n,
//          "tasks": [{"task": name, ...parameters}]}.
// Writes NN-task.json per task (and NN-task.csv for flow and iso) into
// out_dir. Returns 0, 1 when a task assertion fails, or 2 on schema errors.
int run_experiment(const std::string& config_path, const std::string& out_dir, std::ostream& log);

}  // namespace tvflow::cli
