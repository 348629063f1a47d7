#include "tasks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "tvflow/errors.hpp"
#include "tvflow/io.hpp"

namespace tvflow::cli {

namespace {

class Params {
 public:
  Params(const Json& j, std::string task, std::set<std::string> allowed) : j_(j), task_(std::move(task)) {
    if (!j_.is_object()) throw UsageError(task_ + ": parameters must be an object");
    allowed.insert("task");
    for (const auto& [key, value] : j_.items())
      if (!allowed.count(key)) throw UsageError(field(key) + ": unknown parameter");
  }

  std::string field(const std::string& key) const { return task_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key) && !j_[key].is_null(); }
  const Json& raw(const std::string& key) const { return j_[key]; }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_[key];
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      auto s = v.get<std::string>();
      if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
      try {
        std::size_t used = 0;
        double d = std::stod(s, &used);
        if (used == s.size()) return d;
      } catch (const std::exception&) {
      }
    }
    throw UsageError(field(key) + ": expected a number");
  }

  double required(const std::string& key) const {
    if (!has(key)) throw UsageError(field(key) + ": required");
    return number(key, 0.0);
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    if (!j_[key].is_string()) throw UsageError(field(key) + ": expected a string");
    return j_[key].get<std::string>();
  }

  std::string choice(const std::string& key, const std::string& fallback, std::initializer_list<const char*> options) const {
    auto v = text(key, fallback);
    for (const char* o : options)
      if (v == o) return v;
    std::string list;
    for (const char* o : options) list += (list.empty() ? "" : "|") + std::string(o);
    throw UsageError(field(key) + ": expected one of " + list + ", got '" + v + "'");
  }

  Json spec(const std::string& key, const std::string& fallback) const { return has(key) ? j_[key] : Json(fallback); }

 private:
  const Json& j_;
  std::string task_;
};

Json envelope(const std::string& task, const Workspace& ws, Json result) {
  Json out;
  out["task"] = task;
  out["source"] = ws.source;
  if (!ws.citation.empty()) out["citation"] = ws.citation;
  out["result"] = std::move(result);
  return out;
}

TaskOutput perim(const Params& p, const Workspace& ws) {
  auto set = parse_set(ws, p.spec("set", "@omega"), p.field("set"));
  return {perimeter_json(perimeter(ws.space, set)), {}, true};
}

TaskOutput tv(const Params& p, const Workspace& ws) {
  auto u = parse_function(ws, p.spec("fn", "@u0"), p.field("fn"));
  auto co = coarea_check(ws.space, u);
  Json r;
  r["tv"] = total_variation(ws.space, u);
  r["dirichlet_energy"] = dirichlet_energy(ws.space, u);
  r["coarea"] = {{"lhs", co.lhs}, {"rhs", co.rhs}, {"residual", co.residual}};
  return {r, {}, true};
}

TaskOutput cheeger(const Params& p, const Workspace& ws) {
  const bool has_omega = p.has("omega");
  auto mode = p.choice("mode", "exhaustive", {"exhaustive", "dinkelbach", "ipm"});
  CheegerReport r;
  if (has_omega) {
    auto omega = parse_set(ws, p.raw("omega"), p.field("omega"));
    if (mode == "ipm") throw UsageError(p.field("mode") + ": ipm applies to the global constant only");
    r = mode == "exhaustive" ? cheeger_subset_exact(ws.space, omega) : cheeger_subset_dinkelbach(ws.space, omega);
  } else {
    if (mode == "dinkelbach") throw UsageError(p.field("mode") + ": dinkelbach needs omega");
    IpmOptions ipm;
    ipm.seed = static_cast<std::uint64_t>(p.number("seed", static_cast<double>(ws.seed)));
    r = cheeger_global(ws.space, mode == "ipm" ? GlobalMethod::ipm : GlobalMethod::exhaustive, {}, ipm);
  }
  return {cheeger_json(ws.space, r), {}, true};
}

TaskOutput calibrable(const Params& p, const Workspace& ws) {
  auto omega = parse_set(ws, p.spec("omega", "@omega"), p.field("omega"));
  auto m = p.choice("method", "lp", {"lp", "exhaustive", "dinkelbach"});
  auto method = m == "lp" ? CalibrabilityMethod::lp
                          : m == "exhaustive" ? CalibrabilityMethod::exhaustive : CalibrabilityMethod::dinkelbach;
  auto r = is_calibrable(ws.space, omega, method, p.number("tolerance", default_certificate_tolerance));
  return {calibrability_json(ws.space, r), {}, true};
}

TaskOutput eigencheck(const Params& p, const Workspace& ws) {
  const double tol = p.number("tolerance", default_certificate_tolerance);
  if (p.has("balanced")) {
    auto omega = parse_set(ws, p.raw("balanced"), p.field("balanced"));
    return {balanced_pair_json(ws.space, balanced_pair_eigencheck(ws.space, omega, tol)), {}, true};
  }
  auto u = parse_function(ws, p.spec("fn", "@u0"), p.field("fn"));
  auto r = verify_eigenpair(ws.space, p.required("lambda"), u, tol);
  return {eigenpair_json(ws.space, r), {}, true};
}

TaskOutput eigensearch(const Params& p, const Workspace& ws) {
  SearchOptions opts;
  opts.tolerance = p.number("tolerance", default_certificate_tolerance);
  opts.exhaustive_limit = static_cast<int>(p.number("limit", default_exhaustive_limit));
  if (p.has("candidates")) {
    const auto& c = p.raw("candidates");
    if (!c.is_array()) throw UsageError(p.field("candidates") + ": expected an array of sets");
    std::vector<StateSet> sets;
    for (std::size_t i = 0; i < c.size(); ++i)
      sets.push_back(parse_set(ws, c[i], p.field("candidates") + "[" + std::to_string(i) + "]"));
    opts.candidates = std::move(sets);
  }
  return {set_eigenpairs_json(ws.space, set_eigenpair_search(ws.space, opts)), {}, true};
}

FlowConfig flow_config(const Params& p, double tau_default, double t_end_default) {
  FlowConfig c;
  c.tau = p.number("tau", tau_default);
  c.t_end = p.number("t_end", t_end_default);
  c.prox_tolerance = p.number("prox_tolerance", 0.0);
  c.record_stride = static_cast<int>(p.number("stride", 1));
  c.extinction_tol = p.number("extinction_tol", c.extinction_tol);
  c.method = p.choice("method", "cut", {"cut", "primal-dual"}) == "cut" ? ProxMethod::parametric_cut
                                                                       : ProxMethod::primal_dual;
  return c;
}

TaskOutput flow(const Params& p, const Workspace& ws) {
  auto u0 = parse_function(ws, p.spec("u0", "@u0"), p.field("u0"));
  auto cfg = flow_config(p, 1e-2, 1.0);
  auto traj = evolve(ws.space, u0, cfg);
  std::ostringstream csv;
  write_trajectory_csv(csv, ws.space, traj, cfg.tau);

  const double m0 = traj.steps.front().mass;
  const double scale = std::max(1.0, lp_norm(ws.space, u0, 1.0));
  double drift = 0.0, rise = 0.0;
  for (std::size_t k = 1; k < traj.steps.size(); ++k) {
    drift = std::max(drift, std::abs(traj.steps[k].mass - m0));
    rise = std::max(rise, traj.steps[k].tv - traj.steps[k - 1].tv);
  }
  const double tol = cfg.prox_tolerance > 0.0 ? cfg.prox_tolerance : 1e-9 * (1.0 + lp_norm(ws.space, u0, 2.0));
  Json r;
  r["tau"] = cfg.tau;
  r["t_end"] = cfg.t_end;
  r["steps"] = traj.steps.size() - 1;
  r["final"] = function_json(ws.space, traj.snapshots.back());
  r["mean"] = mean(ws.space, u0);
  r["mass_drift"] = drift;
  r["tv_max_increase"] = std::max(0.0, rise);
  r["final_dist2"] = traj.steps.back().dist2_mean;
  const bool ok = drift <= 1e-8 * scale && rise <= tol;
  return {r, csv.str(), ok};
}

TaskOutput poincare(const Params& p, const Workspace& ws) {
  const double pp = p.number("p", 2.0), q = p.number("q", 1.0);
  PoincareOptions opts;
  opts.seed = static_cast<std::uint64_t>(p.number("seed", static_cast<double>(ws.seed)));
  auto fallback = ws.space.size() <= opts.max_states ? "exact" : "ipm";
  auto m = p.choice("method", fallback, {"exact", "ipm", "analytic"});
  auto method = m == "exact" ? PoincareMethod::exact_small : m == "ipm" ? PoincareMethod::ipm : PoincareMethod::analytic;
  return {poincare_json(ws.space, poincare_constant(ws.space, pp, q, method, opts)), {}, true};
}

TaskOutput extinction(const Params& p, const Workspace& ws) {
  auto u0 = parse_function(ws, p.spec("u0", "@u0"), p.field("u0"));
  auto cfg = flow_config(p, 0.0, 0.0);
  auto r = extinction_analysis(ws.space, u0, cfg);
  return {extinction_json(r), {}, r.holds};
}

TaskOutput iso(const Params& p, const Workspace& ws) {
  const double n = p.number("n", 2.0);
  auto profile = iso_profile(ws.space, static_cast<int>(p.number("limit", 22)));
  const double in = best_iso_constant(profile, n);
  TrialOptions topt;
  topt.seed = static_cast<std::uint64_t>(p.number("seed", static_cast<double>(ws.seed)));
  auto trials = sobolev_trials(ws.space, topt);
  auto sob = sobolev_check(ws.space, n, in, trials);
  auto psi = psi_iso_check(ws.space, psi_from_profile(profile), trials);
  Json r = iso_json(ws.space, profile, n, in);
  r["sobolev"] = {{"holds", sob.holds}, {"worst_ratio", sob.worst_ratio}, {"trials", sob.trials}};
  r["psi"] = {{"holds", psi.holds}, {"worst_ratio", psi.worst_ratio}, {"trials", psi.trials}};
  std::ostringstream csv;
  write_profile_csv(csv, ws.space, profile);
  return {r, csv.str(), sob.holds && psi.holds};
}

}  // namespace

Workspace workspace_from_file(const std::string& path) {
  Workspace ws;
  ws.space = load_space(path);
  ws.source = path;
  return ws;
}

Workspace workspace_from_fixture(const std::string& name, const FixtureParams& params) {
  auto inst = make_fixture(name, params);
  Workspace ws;
  ws.space = std::move(inst.space);
  ws.sets = std::move(inst.sets);
  ws.functions = std::move(inst.functions);
  ws.citation = inst.citation;
  ws.source = "fixture:" + inst.name;
  for (const auto& [key, value] : inst.params) {
    std::ostringstream os;
    os << value;
    ws.source += (key == inst.params.begin()->first ? "?" : "&") + key + "=" + os.str();
  }
  return ws;
}

StateSet parse_set(const Workspace& ws, const Json& spec, const std::string& field) {
  try {
    if (spec.is_string()) {
      auto s = spec.get<std::string>();
      if (!s.empty() && s[0] == '@') {
        auto it = ws.sets.find(s.substr(1));
        if (it == ws.sets.end()) throw UsageError(field + ": no set named '" + s.substr(1) + "'");
        return it->second;
      }
      return StateSet::of(ws.space, split_state_list(s));
    }
    if (spec.is_array()) return StateSet::of(ws.space, spec.get<std::vector<std::string>>());
  } catch (const Error& e) {
    throw UsageError(field + ": " + e.what());
  } catch (const Json::exception& e) {
    throw UsageError(field + ": " + e.what());
  }
  throw UsageError(field + ": expected a state list");
}

StateFunction parse_function(const Workspace& ws, const Json& spec, const std::string& field) {
  try {
    if (spec.is_string()) {
      auto s = spec.get<std::string>();
      if (!s.empty() && s[0] == '@') {
        auto it = ws.functions.find(s.substr(1));
        if (it == ws.functions.end()) throw UsageError(field + ": no function named '" + s.substr(1) + "'");
        return it->second;
      }
      return load_function(ws.space, s);
    }
    if (spec.is_array() || spec.is_object()) return read_function_json(ws.space, spec.dump());
  } catch (const Error& e) {
    throw UsageError(field + ": " + e.what());
  }
  throw UsageError(field + ": expected a function");
}

bool is_task(const std::string& name) {
  return std::any_of(std::begin(task_names), std::end(task_names), [&](const char* t) { return name == t; });
}

TaskOutput run_task(const std::string& task, const Json& params, const Workspace& ws) {
  TaskOutput out;
  if (task == "perim")
    out = perim(Params(params, task, {"set"}), ws);
  else if (task == "tv")
    out = tv(Params(params, task, {"fn"}), ws);
  else if (task == "cheeger")
    out = cheeger(Params(params, task, {"omega", "mode", "seed"}), ws);
  else if (task == "calibrable")
    out = calibrable(Params(params, task, {"omega", "method", "tolerance"}), ws);
  else if (task == "eigencheck")
    out = eigencheck(Params(params, task, {"lambda", "fn", "balanced", "tolerance"}), ws);
  else if (task == "eigensearch")
    out = eigensearch(Params(params, task, {"candidates", "limit", "tolerance"}), ws);
  else if (task == "flow")
    out = flow(Params(params, task, {"u0", "tau", "t_end", "prox_tolerance", "stride", "method"}), ws);
  else if (task == "poincare")
    out = poincare(Params(params, task, {"p", "q", "method", "seed"}), ws);
  else if (task == "extinction")
    out = extinction(Params(params, task, {"u0", "tau", "t_end", "prox_tolerance", "method", "extinction_tol"}), ws);
  else if (task == "iso")
    out = iso(Params(params, task, {"n", "limit", "seed"}), ws);
  else
    throw UsageError("unknown task '" + task + "'");
  out.report = envelope(task, ws, std::move(out.report));
  return out;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return 2;
  if (auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->kind()) {
      case ErrorKind::max_iters_exceeded:
      case ErrorKind::horizon_too_short:
      case ErrorKind::normalization_failure:
        return 1;
      default:
        return 2;
    }
  }
  return 1;
}

}  // namespace tvflow::cli
