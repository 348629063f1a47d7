#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tvflow/cheeger.hpp"
#include "tvflow/errors.hpp"
#include "tvflow/flow.hpp"
#include "tvflow/geometry.hpp"
#include "tvflow/iso.hpp"

namespace tvflow::cli {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

class Checks {
 public:
  explicit Checks(std::string fixture) : fixture_(std::move(fixture)) {}

  void near(const std::string& what, double got, double want, double tol) {
    bool ok = std::abs(got - want) <= tol;
    add(what, ok, "got " + fmt(got) + ", expected " + fmt(want) + " +- " + fmt(tol));
  }
  void truth(const std::string& what, bool ok, const std::string& detail = {}) { add(what, ok, detail); }

  std::vector<CheckResult> take() { return std::move(out_); }

 private:
  void add(const std::string& what, bool ok, std::string detail) {
    out_.push_back({fixture_, what, ok, std::move(detail)});
  }
  std::string fixture_;
  std::vector<CheckResult> out_;
};

std::string ids_of(const RandomWalkSpace& space, const StateSet& s) {
  std::string out;
  for (int x : s.indices()) out += (out.empty() ? "" : ",") + space.id(x);
  return "{" + out + "}";
}

RandomWalkSpace path(const std::string& prefix, int first, const std::vector<double>& w) {
  std::vector<GraphEdge> edges;
  for (std::size_t i = 0; i < w.size(); ++i)
    edges.push_back({prefix + std::to_string(first + static_cast<int>(i)),
                     prefix + std::to_string(first + static_cast<int>(i) + 1), w[i]});
  return from_weighted_graph(edges);
}

StateSet named(const RandomWalkSpace& space, const std::vector<std::string>& ids) { return StateSet::of(space, ids); }

StateSet square(const RandomWalkSpace& space, int k) {
  std::vector<std::string> ids;
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) ids.push_back(grid_id(i, j));
  return StateSet::of(space, ids);
}

// The window [lo, hi]^2 of the unit-weight lattice, with the mass of jumps
// leaving the window kept as self-loops so that nu = 4 everywhere.
RandomWalkSpace lattice_window(int lo, int hi) {
  const int side = hi - lo + 3;
  auto big = stencil_grid(side, side, four_neighbor_stencil(), false, lo - 1, lo - 1);
  std::vector<std::string> ids;
  for (int j = lo; j <= hi; ++j)
    for (int i = lo; i <= hi; ++i) ids.push_back(grid_id(i, j));
  return restrict_to(big, StateSet::of(big, ids));
}

// (Omega_k)_m: the square with its lattice neighbours, escaping jumps as loops.
RandomWalkSpace square_closure(int k) {
  auto big = lattice_window(-2, k + 1);
  return restrict_to(big, neighborhood_closure(big, square(big, k)));
}

FixtureInstance base(const std::string& name, const FixtureParams& p) {
  const auto& f = find_fixture(name);
  FixtureInstance inst;
  inst.name = f.name;
  inst.citation = f.citation;
  inst.params = p;
  return inst;
}

int as_int(const FixtureParams& p, const std::string& key) { return static_cast<int>(std::lround(p.at(key))); }

// Fixture builders.

FixtureInstance build_two_node(const FixtureParams& p) {
  auto inst = base("two-node", p);
  const double q = p.at("p");
  inst.space = from_weighted_graph({{"a", "a", q}, {"b", "b", q}, {"a", "b", 1.0 - q}});
  inst.functions["u0"] = {1.0, -1.0};
  return inst;
}

FixtureInstance build_seven_path(const FixtureParams& p) {
  auto inst = base("seven-path", p);
  inst.space = path("x", 1, {2, 1, 2, 2, 1, 2});
  inst.sets["omega"] = named(inst.space, {"x2", "x3", "x4", "x5", "x6"});
  inst.sets["inner"] = named(inst.space, {"x3", "x4", "x5"});
  return inst;
}

FixtureInstance build_eight_path(const FixtureParams& p) {
  auto inst = base("eight-path", p);
  inst.space = path("x", 1, {2, 2, 1, 10, 1, 2, 2});
  inst.sets["omega"] = named(inst.space, {"x2", "x3", "x4", "x5", "x6", "x7"});
  inst.sets["core"] = named(inst.space, {"x4", "x5"});
  return inst;
}

FixtureInstance build_triangle(const FixtureParams& p) {
  auto inst = base("triangle", p);
  inst.space = from_weighted_graph({{"a", "b", 0.5}, {"b", "c", 0.5}, {"a", "c", 0.5}});
  inst.sets["omega"] = named(inst.space, {"a", "b"});
  inst.functions["u0"] = {0.5, 0.5, 0.0};
  return inst;
}

FixtureInstance build_z2(const std::string& name, const FixtureParams& p, int k) {
  auto inst = base(name, p);
  const int halo = as_int(p, "halo");
  if (halo < 1) throw Error(ErrorKind::invalid_argument, "halo must be at least 1");
  inst.space = lattice_window(-halo, k - 1 + halo);
  inst.sets["omega"] = square(inst.space, k);
  return inst;
}

FixtureInstance build_z2_k(const FixtureParams& p) {
  const int k = as_int(p, "k");
  if (k < 1) throw Error(ErrorKind::invalid_argument, "k must be at least 1");
  return build_z2("z2-omega-k", p, k);
}

FixtureInstance build_z2_5(const FixtureParams& p) { return build_z2("z2-omega5", p, 5); }

FixtureInstance build_z2_5m(const FixtureParams& p) {
  auto inst = base("z2-omega5-m", p);
  inst.space = square_closure(5);
  inst.sets["omega"] = square(inst.space, 5);
  return inst;
}

FixtureInstance build_figure1(const FixtureParams& p) {
  auto inst = base("figure-1", p);
  inst.space = square_closure(2);
  inst.sets["omega"] = named(inst.space, {"(-1,0)", "(0,0)", "(1,0)", "(-1,1)", "(0,1)", "(1,1)"});
  inst.sets["E"] = inst.sets["omega"];
  inst.sets["D"] = named(inst.space, {"(1,-1)", "(1,0)", "(2,0)", "(2,1)", "(1,1)", "(1,2)"});
  return inst;
}

FixtureInstance build_ex613_1(const FixtureParams& p) {
  auto inst = base("ex613-1", p);
  const int blocks = as_int(p, "blocks");
  if (blocks < 2) throw Error(ErrorKind::invalid_argument, "blocks must be at least 2");
  std::vector<double> w;
  for (int n = 0; n < blocks; ++n) {
    w.push_back(std::pow(2.0, -n));
    if (n + 1 < blocks) w.push_back(std::pow(3.0, -n));
  }
  inst.space = path("x", 0, w);
  for (int n = 1; n + 2 <= blocks; ++n)
    inst.sets["E" + std::to_string(n)] =
        named(inst.space, {"x" + std::to_string(2 * n), "x" + std::to_string(2 * n + 1)});
  return inst;
}

FixtureInstance build_ex613_2(const FixtureParams& p) {
  auto inst = base("ex613-2", p);
  const double r = p.at("r"), s = p.at("s");
  const int states = as_int(p, "states");
  if (!(0.0 < s && s < r && r < 0.5)) throw Error(ErrorKind::invalid_argument, "need 0 < s < r < 1/2");
  if (states < 3) throw Error(ErrorKind::invalid_argument, "states must be at least 3");
  std::vector<double> w{r / (1.0 - r) + s / (1.0 - s)};
  for (int n = 1; n + 1 < states; ++n) w.push_back(std::pow(r, n) + std::pow(s, n));
  inst.space = path("x", 0, w);
  return inst;
}

FixtureInstance build_ex46_1(const FixtureParams& p) {
  auto inst = base("ex46-1", p);
  const int blocks = as_int(p, "blocks");
  if (blocks < 1) throw Error(ErrorKind::invalid_argument, "blocks must be at least 1");
  std::vector<double> w;
  for (int n = 1; n <= blocks; ++n) {
    double c = 1.0 / (double(n) * n * n), e = 1.0 / (double(n) * n);
    w.insert(w.end(), {c, e, c});
  }
  inst.space = path("x", 3, w);
  StateFunction f(static_cast<std::size_t>(inst.space.size()), 0.0);
  const double top = double(blocks) * blocks;
  f[inst.space.index("x" + std::to_string(3 * blocks + 1))] = top;
  f[inst.space.index("x" + std::to_string(3 * blocks + 2))] = top;
  inst.functions["u0"] = f;
  return inst;
}

// The nonlocal walk with J = chi_[-1,1] / 2 on R, sampled at spacing h on
// [-L, L]: the epsilon-step walk with radius just above 1 averages over [x-1, x+1].
FixtureInstance build_ex46_2(const FixtureParams& p) {
  auto inst = base("ex46-2", p);
  const int blocks = as_int(p, "blocks");
  const double h = p.at("h");
  if (blocks < 1) throw Error(ErrorKind::invalid_argument, "blocks must be at least 1");
  if (!(h > 0.0 && h <= 0.5)) throw Error(ErrorKind::invalid_argument, "need 0 < h <= 1/2");
  const int half = static_cast<int>(std::ceil((std::pow(2.0, blocks + 1) + 2.0) / h));
  std::vector<Point> pts;
  for (int i = -half; i <= half; ++i) pts.push_back({"t" + std::to_string(i), {i * h}, h});
  inst.space = epsilon_step(pts, 1.0 + 0.5 * h);
  for (int n = 1; n <= blocks; ++n) {
    const double lo = std::pow(2.0, n), hi = 2.0 * lo;
    StateFunction u(pts.size(), 0.0);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const double x = pts[k].coords[0];
      if (x >= lo && x <= hi) u[inst.space.index(pts[k].id)] = 1.0;
      if (x <= -lo && x >= -hi) u[inst.space.index(pts[k].id)] = -1.0;
    }
    inst.functions["u" + std::to_string(n)] = u;
  }
  inst.functions["u0"] = inst.functions["u1"];
  return inst;
}

FixtureInstance build_k5(const FixtureParams& p) {
  auto inst = base("k5", p);
  std::vector<GraphEdge> edges;
  const std::vector<std::string> v{"v1", "v2", "v3", "v4", "v5"};
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) edges.push_back({v[i], v[j], 0.25});
  inst.space = from_weighted_graph(edges);
  return inst;
}

// Fixture self-checks.

std::vector<CheckResult> check_two_node(const FixtureInstance& f) {
  Checks c(f.name);
  const double p = f.params.at("p"), gap = 1.0 - p;
  const auto& s = f.space;
  c.truth("lambda=0 certified", verify_eigenpair(s, 0.0, {1.0, 1.0}).certified);
  c.truth("lambda=1-p certified", verify_eigenpair(s, gap, f.functions.at("u0")).certified);
  c.truth("lambda=(1-p)/2 rejected", !verify_eigenpair(s, 0.5 * gap, f.functions.at("u0")).certified);
  c.near("meyer norm", meyer_norm(s, f.functions.at("u0")), 1.0 / gap, 1e-12);
  c.near("lambda(1,2)", poincare_constant(s, 2.0, 1.0, PoincareMethod::exact_small).constant,
         std::sqrt(2.0) * gap, 1e-12);
  FlowConfig cfg;
  cfg.tau = 1e-3;
  cfg.t_end = 0.0;
  auto ext = extinction_analysis(s, f.functions.at("u0"), cfg);
  c.truth("extinction sandwich", ext.holds,
          "T_obs " + fmt(ext.t_observed) + " in [" + fmt(ext.t_lower) + ", " + fmt(ext.t_upper) + "]");
  return c.take();
}

std::vector<CheckResult> check_seven_path(const FixtureInstance& f) {
  Checks c(f.name);
  const auto& s = f.space;
  c.near("ratio {x2..x6}", ratio(s, f.sets.at("omega")), 0.25, 1e-12);
  c.near("ratio {x3,x4,x5}", ratio(s, f.sets.at("inner")), 0.2, 1e-12);
  auto ch = cheeger_subset_exact(s, f.sets.at("omega"));
  c.near("cheeger value", ch.value, 0.2, 1e-12);
  c.truth("cheeger witness", ch.witness == f.sets.at("inner"), ids_of(s, ch.witness));
  c.truth("not calibrable", !is_calibrable(s, f.sets.at("omega")).calibrable);
  return c.take();
}

std::vector<CheckResult> check_eight_path(const FixtureInstance& f) {
  Checks c(f.name);
  const auto& s = f.space;
  const auto& omega = f.sets.at("omega");
  c.near("lambda_omega", ratio(s, omega), 1.0 / 9.0, 1e-12);
  c.truth("curvature condition", curvature_necessary_check(s, omega));
  auto cal = is_calibrable(s, omega);
  c.truth("not calibrable", !cal.calibrable);
  c.truth("witness {x4,x5}", cal.witness && *cal.witness == f.sets.at("core"),
          cal.witness ? ids_of(s, *cal.witness) : "none");
  c.near("witness ratio", cal.witness_ratio, 1.0 / 11.0, 1e-12);
  return c.take();
}

std::vector<CheckResult> check_triangle(const FixtureInstance& f) {
  Checks c(f.name);
  const auto& s = f.space;
  c.truth("{a,b} calibrable", is_calibrable(s, f.sets.at("omega")).calibrable);
  c.truth("(1/2, chi/2) rejected", !verify_eigenpair(s, 0.5, f.functions.at("u0")).certified);
  c.truth("0 not a median", !zero_median(s, f.functions.at("u0")));
  return c.take();
}

std::vector<CheckResult> check_z2(const FixtureInstance& f) {
  Checks c(f.name);
  const auto& s = f.space;
  const auto& omega = f.sets.at("omega");
  const int k = static_cast<int>(std::lround(std::sqrt(double(omega.count()))));
  c.near("lambda_omega", ratio(s, omega), 1.0 / k, 1e-12);
  SearchOptions opts;
  opts.candidates = std::vector<StateSet>{omega};
  auto hits = set_eigenpair_search(s, opts);
  bool found = std::any_of(hits.begin(), hits.end(), [&](const SetEigenpair& h) { return h.set == omega; });
  c.truth("eigenpair certified", found);
  return c.take();
}

std::vector<CheckResult> check_z2_5m(const FixtureInstance& f) {
  Checks c(f.name);
  const auto& s = f.space;
  const auto& omega = f.sets.at("omega");
  c.truth("omega calibrable", is_calibrable(s, omega).calibrable);
  StateFunction u = indicator(omega);
  for (auto& v : u) v /= volume(s, omega);
  c.truth("eigenpair rejected", !verify_eigenpair(s, ratio(s, omega), u).certified);
  return c.take();
}

std::vector<CheckResult> check_figure1(const FixtureInstance& f) {
  Checks c(f.name);
  const auto& s = f.space;
  auto h = cheeger_global(s, GlobalMethod::exhaustive);
  c.near("h", h.value, 1.0 / 6.0, 1e-12);
  // D ties with its images under the symmetries of the square.
  c.truth("6-state witness", h.witness.count() == 6, ids_of(s, h.witness));
  c.near("lambda_D", ratio(s, f.sets.at("D")), 1.0 / 6.0, 1e-12);
  auto bp = balanced_pair_eigencheck(s, f.sets.at("E"));
  c.truth("balanced pair certified", bp.certified);
  c.near("balanced lambda", bp.lambda, 0.25, 1e-12);
  return c.take();
}

std::vector<CheckResult> check_ex613_1(const FixtureInstance& f) {
  Checks c(f.name);
  const auto& s = f.space;
  std::vector<StateSet> cands;
  for (const auto& [name, set] : f.sets) cands.push_back(set);
  SearchOptions opts;
  opts.candidates = cands;
  auto hits = set_eigenpair_search(s, opts);
  for (const auto& [name, set] : f.sets) {
    const int n = std::stoi(name.substr(1));
    const double want = std::pow(2.0, n + 1) / (std::pow(2.0, n + 1) + std::pow(3.0, n));
    auto it = std::find_if(hits.begin(), hits.end(), [&](const SetEigenpair& h) { return h.set == set; });
    c.truth(name + " certified", it != hits.end());
    if (it != hits.end()) c.near(name + " eigenvalue", it->lambda, want, 1e-10);
  }
  return c.take();
}

std::vector<CheckResult> check_ex613_2(const FixtureInstance& f) {
  Checks c(f.name);
  const auto& s = f.space;
  const double r = f.params.at("r"), limit = (1.0 - r) / (1.0 + r);
  auto h = cheeger_global(s, GlobalMethod::exhaustive);
  c.truth("h above (1-r)/(1+r)", h.value > limit, "h " + fmt(h.value) + ", limit " + fmt(limit));
  auto hits = set_eigenpair_search(s);
  double low = 1.0;
  for (const auto& e : hits)
    if (e.lambda > 0.0) low = std::min(low, e.lambda);
  c.truth("certified eigenvalues above the limit", low > limit, "smallest " + fmt(low));
  return c.take();
}

std::vector<CheckResult> check_ex46_1(const FixtureInstance& f) {
  Checks c(f.name);
  const auto& s = f.space;
  const auto& u = f.functions.at("u0");
  auto rep = poincare_constant(s, 1.0, 1.0, PoincareMethod::exact_small);
  StateFunction d(u);
  const double m = mean(s, u);
  for (auto& v : d) v -= m;
  const double trial = total_variation(s, u) / lp_norm(s, d, 1.0);
  c.truth("lambda1 positive", rep.constant > 0.0, fmt(rep.constant));
  c.truth("lambda1 below the f_n ratio", rep.constant <= trial * (1.0 + 1e-12),
          fmt(rep.constant) + " vs " + fmt(trial));
  // The constant of the truncations decays as blocks are added.
  std::string seq;
  bool decays = true;
  double prev = INFINITY;
  for (int b = 1; b <= std::min(as_int(f.params, "blocks"), 6); ++b) {
    auto t = find_fixture("ex46-1").build({{"blocks", b}});
    double v = poincare_constant(t.space, 1.0, 1.0, PoincareMethod::exact_small).constant;
    decays = decays && v < prev;
    prev = v;
    seq += (seq.empty() ? "" : ", ") + fmt(v);
  }
  c.truth("lambda1 decays with truncation", decays, seq);
  return c.take();
}

// TV(u_n) / ||u_n||_1 = 2^-(n+1) in the continuum; the sampling only perturbs it by O(h).
std::vector<CheckResult> check_ex46_2(const FixtureInstance& f) {
  Checks c(f.name);
  const auto& s = f.space;
  const int blocks = as_int(f.params, "blocks");
  double prev = INFINITY;
  bool decays = true;
  std::string seq;
  for (int n = 1; n <= blocks; ++n) {
    const auto& u = f.functions.at("u" + std::to_string(n));
    const double r = total_variation(s, u) / lp_norm(s, u, 1.0);
    c.truth("u" + std::to_string(n) + " mean zero", std::abs(mean(s, u)) <= 1e-12);
    c.near("u" + std::to_string(n) + " ratio times 2^(n+1)", r * std::pow(2.0, n + 1), 1.0, 0.2);
    decays = decays && r < 0.6 * prev;
    prev = r;
    seq += (seq.empty() ? "" : ", ") + fmt(r);
  }
  c.truth("ratios halve toward 0", decays, seq);
  return c.take();
}

std::vector<CheckResult> check_k5(const FixtureInstance& f) {
  Checks c(f.name);
  auto psi = psi_from_profile(iso_profile(f.space));
  for (int r = 1; r <= 4; ++r) c.near("psi(" + std::to_string(r) + ")", psi(r), (5.0 - r) / 4.0, 1e-12);
  return c.take();
}

std::vector<Fixture> make_registry() {
  std::vector<Fixture> out;
  out.push_back({"two-node", "Example 3.6: two vertices with loops of weight p",
                 "two states a, b with w_aa = w_bb = p and w_ab = 1 - p", {{"p", 0.5}}, build_two_node,
                 check_two_node});
  out.push_back({"seven-path", "Example 5.3: the ball B(x4, 5/2) is not m-calibrable",
                 "path x1..x7 with weights 2,1,2,2,1,2", {}, build_seven_path, check_seven_path});
  out.push_back({"eight-path", "Example 5.9: the curvature condition holds but Omega is not calibrable",
                 "path x1..x8 with weights 2,2,1,10,1,2,2", {}, build_eight_path, check_eight_path});
  out.push_back({"triangle", "Example 6.10(1): {a,b} is calibrable but gives no eigenpair",
                 "triangle a, b, c with all weights 1/2", {}, build_triangle, check_triangle});
  out.push_back({"z2-omega-k", "Example 6.10(2): the squares Omega_k of Z^2 with lambda = 1/k",
                 "lattice window around the k x k square, lattice measure kept by loops", {{"k", 2}, {"halo", 2}},
                 build_z2_k, check_z2});
  out.push_back({"z2-omega5", "Example 6.10(2): Omega_5 is an eigenpair in Z^2",
                 "lattice window around the 5 x 5 square", {{"halo", 2}}, build_z2_5, check_z2});
  out.push_back({"z2-omega5-m", "Example 6.10(2): Omega_5 inside its own closure (Omega_5)_m",
                 "the 5 x 5 square with its lattice neighbours, escaping jumps as loops", {}, build_z2_5m,
                 check_z2_5m});
  out.push_back({"figure-1", "Figure 1: partitions of (Omega_2)_m with lambda_E = 1/4 and lambda_D = 1/6",
                 "the 2 x 2 square with its 8 lattice neighbours", {}, build_figure1, check_figure1});
  out.push_back({"ex613-1", "Example 6.13(1): E_n = {x_2n, x_2n+1} with lambda = 2^(n+1)/(2^(n+1)+3^n)",
                 "path x0.. with weights 2^-n and 3^-n, truncated after the given number of blocks",
                 {{"blocks", 6}}, build_ex613_1, check_ex613_1});
  out.push_back({"ex613-2", "Example 6.13(2): h = (1-r)/(1+r) is not an eigenvalue",
                 "path x0.. with w01 = r/(1-r) + s/(1-s) and w_n,n+1 = r^n + s^n, truncated",
                 {{"r", 0.4}, {"s", 0.2}, {"states", 12}}, build_ex613_2, check_ex613_2});
  out.push_back({"ex46-1", "Example 4.6(1): a 1-Poincare inequality fails on the infinite graph",
                 "path x3.. with weights 1/n^3, 1/n^2, 1/n^3 per block, truncated", {{"blocks", 4}},
                 build_ex46_1, check_ex46_1});
  out.push_back({"ex46-2", "Example 4.6(2): no 1-Poincare inequality for J = chi_[-1,1]/2 on R",
                 "points h Z in [-L, L] with the epsilon-step walk of radius 1 + h/2", {{"blocks", 4}, {"h", 0.25}},
                 build_ex46_2, check_ex46_2});
  out.push_back({"k5", "Section 2.4 Example (1): the complete graph K_n with Psi(r) = n - r",
                 "complete graph on 5 vertices with weights 1/4, so nu = 1", {}, build_k5, check_k5});
  return out;
}

}  // namespace

const std::vector<Fixture>& fixtures() {
  static const std::vector<Fixture> registry = make_registry();
  return registry;
}

const Fixture& find_fixture(const std::string& name) {
  for (const auto& f : fixtures())
    if (f.name == name) return f;
  std::string known;
  for (const auto& f : fixtures()) known += (known.empty() ? "" : ", ") + f.name;
  throw Error(ErrorKind::invalid_argument, "unknown fixture '" + name + "' (known: " + known + ")");
}

FixtureInstance make_fixture(const std::string& name, const FixtureParams& params) {
  const auto& f = find_fixture(name);
  FixtureParams p = f.defaults;
  for (const auto& [key, value] : params) {
    if (!p.count(key)) throw Error(ErrorKind::invalid_argument, "fixture '" + name + "' has no parameter '" + key + "'");
    p[key] = value;
  }
  return f.build(p);
}

std::vector<CheckResult> run_selftest(const std::vector<std::string>& names) {
  std::vector<CheckResult> out;
  for (const auto& f : fixtures()) {
    if (!names.empty() && std::find(names.begin(), names.end(), f.name) == names.end()) continue;
    try {
      auto inst = make_fixture(f.name);
      for (auto& r : f.check(inst)) out.push_back(std::move(r));
    } catch (const std::exception& e) {
      out.push_back({f.name, "run", false, e.what()});
    }
  }
  return out;
}

}  // namespace tvflow::cli
