#include "app.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "experiment.hpp"
#include "tasks.hpp"
#include "tvflow/errors.hpp"
#include "tvflow/io.hpp"

namespace tvflow::cli {

namespace {

struct SpaceOpts {
  std::string path;
  std::string fixture;
  std::vector<std::string> params;
  std::optional<int> halo;
  std::uint64_t seed = 1;
};

void add_space(CLI::App* sub, SpaceOpts& o) {
  sub->add_option("--space", o.path, "space JSON file");
  sub->add_option("--fixture", o.fixture, "built-in fixture name instead of a file");
  sub->add_option("--param", o.params, "fixture parameter key=value (repeatable)");
  sub->add_option("--halo", o.halo, "lattice halo for the z2 fixtures");
  sub->add_option("--seed", o.seed, "seed for randomized components");
}

FixtureParams parse_params(const std::vector<std::string>& items, const std::optional<int>& halo) {
  FixtureParams p;
  for (const auto& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--param expects key=value, got '" + item + "'");
    try {
      p[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("--param " + item + ": value is not a number");
    }
  }
  if (halo) p["halo"] = *halo;
  return p;
}

Workspace load(const SpaceOpts& o) {
  if (o.path.empty() == o.fixture.empty()) throw UsageError("give exactly one of --space or --fixture");
  Workspace ws;
  if (!o.path.empty()) {
    if (!o.params.empty() || o.halo) throw UsageError("--param and --halo apply to fixtures only");
    ws = workspace_from_file(o.path);
  } else {
    try {
      ws = workspace_from_fixture(o.fixture, parse_params(o.params, o.halo));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  ws.seed = o.seed;
  return ws;
}

void emit(std::ostream& out, const std::string& path, const std::string& text) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write " + path);
  f << text;
}

template <class T>
void put(Json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

RandomWalkSpace points_space(const std::string& path, double epsilon) {
  auto j = Json::parse(read_text_file(path));
  const Json& list = j.is_object() ? j.at("points") : j;
  std::vector<Point> pts;
  for (const auto& p : list) {
    Point pt;
    pt.id = p.at("id").get<std::string>();
    pt.coords = p.at("coords").get<std::vector<double>>();
    pt.mu = p.value("mu", 1.0);
    pts.push_back(std::move(pt));
  }
  return epsilon_step(pts, epsilon);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Total variation flow, Cheeger and 1-Laplacian tools for finite random walk spaces", "tvflow"};
  app.require_subcommand(1);

  // build
  SpaceOpts build_space;
  std::string points, grid, restrict, build_out;
  std::optional<double> epsilon;
  double grid_weight = 1.0;
  bool wrap = false;
  auto* build = app.add_subcommand("build", "validate a space and write its canonical JSON form");
  add_space(build, build_space);
  build->add_option("--points", points, "point cloud JSON for the epsilon-step walk");
  build->add_option("--epsilon", epsilon, "strict ball radius for --points");
  build->add_option("--grid", grid, "WxH four-neighbour grid");
  build->add_option("--weight", grid_weight, "grid edge weight");
  build->add_flag("--wrap", wrap, "periodic grid");
  build->add_option("--restrict", restrict, "restrict to these states, escaping jumps become loops");
  build->add_option("--out", build_out, "output file (default stdout)");

  // task subcommands
  struct TaskCmd {
    CLI::App* app = nullptr;
    SpaceOpts space;
    std::string out;
  };
  std::map<std::string, TaskCmd> cmds;
  auto task_cmd = [&](const std::string& name, const std::string& help) {
    auto& c = cmds[name];
    c.app = app.add_subcommand(name, help);
    add_space(c.app, c.space);
    return c.app;
  };

  std::optional<std::string> set, fn, omega, mode, method, balanced, u0, cal_method;
  std::optional<double> lambda, tolerance, tau, t_end, prox_tol, ext_tol, q_exp, dim;
  std::optional<std::string> p_exp;
  std::optional<int> stride, limit;
  std::vector<std::string> candidates;
  std::string candidates_file;

  task_cmd("perim", "perimeter, volume and ratio of a set")->add_option("--set", set, "state list or @name");
  task_cmd("tv", "total variation and coarea check of a function")->add_option("--fn", fn, "function file or @name");
  {
    auto* c = task_cmd("cheeger", "Cheeger constant inside omega, or the balanced global constant");
    c->add_option("--omega", omega, "state list or @name");
    c->add_option("--mode", mode, "exhaustive|dinkelbach|ipm");
  }
  {
    auto* c = task_cmd("calibrable", "calibrability of a set with a flux certificate");
    c->add_option("--omega", omega, "state list or @name");
    c->add_option("--method", cal_method, "lp|exhaustive|dinkelbach");
    c->add_option("--tolerance", tolerance, "certificate tolerance");
  }
  {
    auto* c = task_cmd("eigencheck", "verify an eigenpair of the 1-Laplacian");
    c->add_option("--lambda", lambda, "eigenvalue");
    c->add_option("--fn", fn, "function file or @name");
    c->add_option("--balanced", balanced, "check the balanced pair for this set instead");
    c->add_option("--tolerance", tolerance, "certificate tolerance");
  }
  {
    auto* c = task_cmd("eigensearch", "search for set-type eigenpairs");
    c->add_option("--candidate", candidates, "candidate state list (repeatable)");
    c->add_option("--candidates", candidates_file, "JSON file with an array of state lists");
    c->add_option("--limit", limit, "exhaustive enumeration limit");
    c->add_option("--tolerance", tolerance, "certificate tolerance");
  }
  {
    auto* c = task_cmd("flow", "implicit Euler total variation flow");
    c->add_option("--u0", u0, "initial datum file or @name");
    c->add_option("--tau", tau, "time step");
    c->add_option("--t-end", t_end, "horizon");
    c->add_option("--stride", stride, "record every stride steps");
    c->add_option("--method", method, "cut|primal-dual");
    c->add_option("--prox-tolerance", prox_tol, "duality gap threshold");
    c->add_option("--out", cmds["flow"].out, "trajectory CSV (default stdout)");
  }
  {
    auto* c = task_cmd("poincare", "Poincare constant lambda^(q,p)");
    c->add_option("--p", p_exp, "function norm exponent, inf for the sup norm (default 2)");
    c->add_option("--q", q_exp, "gradient norm exponent (default 1)");
    c->add_option("--method", method, "exact|ipm|analytic");
  }
  {
    auto* c = task_cmd("extinction", "extinction time with its Poincare and dual norm bounds");
    c->add_option("--u0", u0, "initial datum file or @name");
    c->add_option("--tau", tau, "time step (default T_upper / 200)");
    c->add_option("--t-end", t_end, "horizon (default just past T_upper)");
    c->add_option("--extinction-tol", ext_tol, "distance to the mean counted as extinct");
    c->add_option("--method", method, "cut|primal-dual");
  }
  {
    auto* c = task_cmd("iso", "isoperimetric profile and Sobolev checks");
    c->add_option("--n", dim, "isoperimetric dimension (default 2)");
    c->add_option("--limit", limit, "enumeration limit");
    c->add_option("--out", cmds["iso"].out, "profile CSV (default stdout)");
  }

  // fixture
  std::string fx_name, fx_emit = "all", fx_out;
  std::vector<std::string> fx_params;
  std::optional<int> fx_halo;
  bool fx_list = false;
  auto* fixture = app.add_subcommand("fixture", "emit a built-in fixture");
  fixture->add_option("--name", fx_name, "fixture name");
  fixture->add_option("--emit", fx_emit, "space|sets|functions|all");
  fixture->add_option("--param", fx_params, "fixture parameter key=value (repeatable)");
  fixture->add_option("--halo", fx_halo, "lattice halo for the z2 fixtures");
  fixture->add_flag("--list", fx_list, "list fixtures");
  fixture->add_option("--out", fx_out, "output file (default stdout)");

  // selftest
  std::vector<std::string> only;
  auto* selftest = app.add_subcommand("selftest", "run every fixture end to end");
  selftest->add_option("--only", only, "restrict to these fixtures");

  // run
  std::string config, run_out;
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("--config", config, "experiment JSON")->required();
  run->add_option("--out", run_out, "report directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (build->parsed()) {
      RandomWalkSpace space;
      const int sources = !build_space.path.empty() + !build_space.fixture.empty() + !points.empty() + !grid.empty();
      if (sources != 1) throw UsageError("give exactly one of --space, --fixture, --points or --grid");
      if (!points.empty()) {
        if (!epsilon) throw UsageError("--points needs --epsilon");
        space = points_space(points, *epsilon);
      } else if (!grid.empty()) {
        int w = 0, h = 0;
        char x = 0;
        std::istringstream is(grid);
        if (!(is >> w >> x >> h) || x != 'x' || w < 1 || h < 1) throw UsageError("--grid expects WxH");
        space = stencil_grid(w, h, four_neighbor_stencil(grid_weight), wrap);
      } else {
        space = load(build_space).space;
      }
      if (!restrict.empty()) space = restrict_to(space, StateSet::of(space, split_state_list(restrict)));
      emit(out, build_out, write_space_json(space) + "\n");
      Json v = validation_json(space);
      err << v.dump() << '\n';
      return 0;
    }

    if (fixture->parsed()) {
      if (fx_list) {
        for (const auto& f : fixtures()) out << f.name << "\t" << f.citation << "\n";
        return 0;
      }
      if (fx_name.empty()) throw UsageError("--name is required (or --list)");
      SpaceOpts so;
      so.fixture = fx_name;
      so.params = fx_params;
      so.halo = fx_halo;
      auto ws = load(so);
      if (fx_emit == "space") {
        emit(out, fx_out, write_space_json(ws.space) + "\n");
        return 0;
      }
      Json sets = Json::object(), fns = Json::object();
      for (const auto& [k, s] : ws.sets) sets[k] = set_json(ws.space, s);
      for (const auto& [k, u] : ws.functions) fns[k] = function_json(ws.space, u);
      Json j;
      if (fx_emit == "sets") {
        j = sets;
      } else if (fx_emit == "functions") {
        j = fns;
      } else if (fx_emit == "all") {
        j["name"] = fx_name;
        j["source"] = ws.source;
        j["citation"] = ws.citation;
        j["space"] = Json::parse(write_space_json(ws.space));
        j["sets"] = sets;
        j["functions"] = fns;
      } else {
        throw UsageError("--emit expects space|sets|functions|all");
      }
      emit(out, fx_out, j.dump(2) + "\n");
      return 0;
    }

    if (selftest->parsed()) {
      for (const auto& name : only) find_fixture(name);
      auto results = run_selftest(only);
      std::size_t width = 0;
      for (const auto& r : results) width = std::max(width, r.fixture.size() + r.check.size() + 2);
      int failed = 0;
      for (const auto& r : results) {
        std::string label = r.fixture + ": " + r.check;
        out << (r.pass ? "PASS  " : "FAIL  ") << label << std::string(width - label.size() + 2, ' ') << r.detail
            << '\n';
        failed += !r.pass;
      }
      out << results.size() - failed << "/" << results.size() << " checks passed\n";
      return failed ? 1 : 0;
    }

    if (run->parsed()) return run_experiment(config, run_out, err);

    for (auto& [name, cmd] : cmds) {
      if (!cmd.app->parsed()) continue;
      auto ws = load(cmd.space);
      Json params = Json::object();
      put(params, "set", set);
      put(params, "fn", fn);
      put(params, "omega", omega);
      put(params, "mode", mode);
      put(params, "lambda", lambda);
      put(params, "balanced", balanced);
      put(params, "tolerance", tolerance);
      put(params, "u0", u0);
      put(params, "tau", tau);
      put(params, "t_end", t_end);
      put(params, "stride", stride);
      put(params, "prox_tolerance", prox_tol);
      put(params, "extinction_tol", ext_tol);
      put(params, "p", p_exp);
      put(params, "q", q_exp);
      put(params, "n", dim);
      put(params, "limit", limit);
      if (name == "calibrable") put(params, "method", cal_method);
      if (name == "flow" || name == "extinction" || name == "poincare") put(params, "method", method);
      if (name == "cheeger" || name == "poincare" || name == "iso") params["seed"] = ws.seed;
      if (name == "eigensearch" && (!candidates.empty() || !candidates_file.empty())) {
        Json list = Json::array();
        for (const auto& c : candidates) list.push_back(c);
        if (!candidates_file.empty())
          for (const auto& c : Json::parse(read_text_file(candidates_file))) list.push_back(c);
        params["candidates"] = list;
      }
      auto res = run_task(name, params, ws);
      if (res.csv) {
        emit(out, cmd.out, *res.csv);
        if (!cmd.out.empty()) out << res.report.dump(2) << '\n';
      } else {
        out << res.report.dump(2) << '\n';
      }
      return res.ok ? 0 : 1;
    }
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return 2;
}

}  // namespace tvflow::cli
