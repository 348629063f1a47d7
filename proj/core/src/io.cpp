#include "tvflow/io.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "tvflow/errors.hpp"

namespace tvflow {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse_error, e.what());
  }
}

double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) throw Error(ErrorKind::parse_error, where + " must be a number");
  return j.get<double>();
}

std::string string_at(const json& j, const std::string& where) {
  if (!j.is_string()) throw Error(ErrorKind::parse_error, where + " must be a string");
  return j.get<std::string>();
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::invalid_argument, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RandomWalkSpace read_space_json(const std::string& text) {
  json doc = parse(text);
  if (!doc.is_object()) throw Error(ErrorKind::parse_error, "space file must be a JSON object");
  double tol = default_tolerance;
  if (doc.contains("tolerance")) tol = number_at(doc["tolerance"], "tolerance");

  if (doc.contains("graph")) {
    const json& g = doc["graph"];
    if (!g.contains("edges") || !g["edges"].is_array())
      throw Error(ErrorKind::parse_error, "graph.edges must be an array");
    bool loops = g.value("allow_loops", true);
    std::vector<GraphEdge> edges;
    int k = 0;
    for (const auto& e : g["edges"]) {
      std::string where = "graph.edges[" + std::to_string(k++) + "]";
      if (!e.is_array() || e.size() != 3) throw Error(ErrorKind::parse_error, where + " must be [a, b, w]");
      edges.push_back({string_at(e[0], where), string_at(e[1], where), number_at(e[2], where)});
    }
    return from_weighted_graph(edges, loops, tol);
  }
  if (doc.contains("kernel")) {
    const json& kj = doc["kernel"];
    if (!kj.contains("states") || !kj["states"].is_array())
      throw Error(ErrorKind::parse_error, "kernel.states must be an array");
    if (!kj.contains("entries") || !kj["entries"].is_array())
      throw Error(ErrorKind::parse_error, "kernel.entries must be an array");
    std::vector<std::string> states;
    std::vector<double> nu;
    int k = 0;
    for (const auto& s : kj["states"]) {
      std::string where = "kernel.states[" + std::to_string(k++) + "]";
      if (!s.is_object() || !s.contains("id") || !s.contains("nu"))
        throw Error(ErrorKind::parse_error, where + " must be {\"id\":..., \"nu\":...}");
      states.push_back(string_at(s["id"], where + ".id"));
      nu.push_back(number_at(s["nu"], where + ".nu"));
    }
    std::vector<KernelEntry> entries;
    k = 0;
    for (const auto& e : kj["entries"]) {
      std::string where = "kernel.entries[" + std::to_string(k++) + "]";
      if (!e.is_array() || e.size() != 3) throw Error(ErrorKind::parse_error, where + " must be [x, y, K]");
      entries.push_back({string_at(e[0], where), string_at(e[1], where), number_at(e[2], where)});
    }
    return from_kernel(std::move(states), entries, std::move(nu), tol);
  }
  throw Error(ErrorKind::parse_error, "space file needs a \"graph\" or \"kernel\" member");
}

RandomWalkSpace load_space(const std::string& path) { return read_space_json(read_text_file(path)); }

std::string write_space_json(const RandomWalkSpace& space, int indent) {
  const int n = space.size();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return space.id(a) < space.id(b); });
  json states = json::array();
  json entries = json::array();
  for (int x : order) {
    states.push_back({{"id", space.id(x)}, {"nu", space.nu(x)}});
    auto cols = space.row_cols(x);
    auto vals = space.row_vals(x);
    std::vector<std::size_t> k(cols.size());
    std::iota(k.begin(), k.end(), 0);
    std::sort(k.begin(), k.end(), [&](std::size_t a, std::size_t b) { return space.id(cols[a]) < space.id(cols[b]); });
    for (auto j : k) entries.push_back(json::array({space.id(x), space.id(cols[j]), vals[j]}));
  }
  json doc;
  doc["kernel"] = {{"states", states}, {"entries", entries}};
  doc["tolerance"] = space.tolerance();
  return doc.dump(indent);
}

StateFunction read_function_json(const RandomWalkSpace& space, const std::string& text) {
  json doc = parse(text);
  json values = doc;
  if (doc.is_object() && doc.contains("values")) values = doc["values"];
  StateFunction u(static_cast<std::size_t>(space.size()), 0.0);
  if (values.is_array()) {
    if (static_cast<int>(values.size()) != space.size())
      throw Error(ErrorKind::size_mismatch, "function array has " + std::to_string(values.size()) + " entries");
    for (int x = 0; x < space.size(); ++x) u[x] = number_at(values[x], "values[" + std::to_string(x) + "]");
    return u;
  }
  if (values.is_object()) {
    std::vector<char> seen(static_cast<std::size_t>(space.size()), 0);
    for (const auto& [key, val] : values.items()) {
      int x = space.index(key);
      u[x] = number_at(val, "values." + key);
      seen[x] = 1;
    }
    auto missing = std::find(seen.begin(), seen.end(), 0);
    if (missing != seen.end())
      throw Error(ErrorKind::size_mismatch, "no value for state " + space.id(static_cast<int>(missing - seen.begin())));
    return u;
  }
  throw Error(ErrorKind::parse_error, "function file must hold an array or an object of values");
}

StateFunction load_function(const RandomWalkSpace& space, const std::string& path) {
  return read_function_json(space, read_text_file(path));
}

std::vector<std::string> split_state_list(const std::string& text) {
  const char sep = text.find(';') != std::string::npos ? ';' : ',';
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  auto flush = [&] {
    auto b = cur.find_first_not_of(" \t");
    auto e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
    cur.clear();
  };
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0)
      flush();
    else
      cur += c;
  }
  flush();
  return out;
}

}  // namespace tvflow
