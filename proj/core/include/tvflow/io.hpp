#pragma once

#include <string>
#include <vector>

#include "tvflow/space.hpp"

namespace tvflow {

// Accepts {"graph": {"edges": [...]}} or {"kernel": {"states": [...], "entries": [...]}}.
RandomWalkSpace read_space_json(const std::string& text);
RandomWalkSpace load_space(const std::string& path);

// Canonical kernel form: states sorted by id, entries sorted by (source, target).
std::string write_space_json(const RandomWalkSpace& space, int indent = 2);

// {"values": {"a": 1.0, ...}}, {"values": [...]} in state order, or a bare array/object.
StateFunction read_function_json(const RandomWalkSpace& space, const std::string& text);
StateFunction load_function(const RandomWalkSpace& space, const std::string& path);

// Splits "a,b,c" (or "a;b;c") into ids, keeping commas inside parentheses so that
// grid labels such as "(0,1)" survive.
std::vector<std::string> split_state_list(const std::string& text);

std::string read_text_file(const std::string& path);

}  // namespace tvflow
