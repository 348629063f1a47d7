#include "report.hpp"

#include <cmath>
#include <cstdio>

namespace tvflow::cli {

Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Json set_json(const RandomWalkSpace& space, const StateSet& s) {
  Json out = Json::array();
  for (int x : s.indices()) out.push_back(space.id(x));
  return out;
}

Json function_json(const RandomWalkSpace& space, const StateFunction& u) {
  Json out = Json::object();
  for (int x = 0; x < space.size(); ++x) out[space.id(x)] = number(u[static_cast<std::size_t>(x)]);
  return out;
}

Json flux_json(const RandomWalkSpace& space, const FluxField& g) {
  Json out = Json::array();
  for (std::size_t k = 0; k < space.edges().size(); ++k) {
    const auto& e = space.edges()[k];
    out.push_back(Json::array({space.id(e.a), space.id(e.b), number(g.g[k])}));
  }
  return out;
}

Json validation_json(const RandomWalkSpace& space) {
  const auto& v = space.validation();
  Json out;
  out["states"] = space.size();
  out["support_pairs"] = space.edges().size();
  out["total_measure"] = space.total_measure();
  out["stochasticity_residual"] = v.stochasticity_residual;
  out["balance_residual"] = v.balance_residual;
  out["worst_row"] = v.worst_row >= 0 ? Json(space.id(v.worst_row)) : Json(nullptr);
  out["worst_pair"] = v.worst_pair_a >= 0 ? Json::array({space.id(v.worst_pair_a), space.id(v.worst_pair_b)})
                                          : Json(nullptr);
  return out;
}

Json perimeter_json(const PerimeterReport& r) {
  Json out;
  out["perimeter"] = r.perimeter;
  out["volume"] = r.volume;
  out["ratio"] = r.ratio_defined ? number(r.ratio) : Json(nullptr);
  out["self_interaction"] = r.self_interaction;
  return out;
}

Json cheeger_json(const RandomWalkSpace& space, const CheegerReport& r) {
  Json out;
  out["value"] = number(r.value);
  out["witness"] = set_json(space, r.witness);
  out["mode"] = r.mode == CheegerMode::subset_of_omega ? "subset_of_omega" : "global_balanced";
  out["exact"] = r.exact;
  out["iterations"] = r.iterations;
  return out;
}

Json calibrability_json(const RandomWalkSpace& space, const CalibrabilityResult& r) {
  Json out;
  out["calibrable"] = r.calibrable;
  out["lambda"] = number(r.lambda);
  out["witness"] = r.witness ? set_json(space, *r.witness) : Json(nullptr);
  out["witness_ratio"] = r.witness ? number(r.witness_ratio) : Json(nullptr);
  out["residual"] = r.residual;
  out["flux"] = r.flux ? flux_json(space, *r.flux) : Json(nullptr);
  return out;
}

Json eigenpair_json(const RandomWalkSpace& space, const EigenpairResult& r) {
  const auto& c = r.certificate;
  Json out;
  out["certified"] = r.certified;
  out["lambda"] = c.lambda;
  out["scale"] = r.scale;
  out["failure"] = r.failure.empty() ? Json(nullptr) : Json(r.failure);
  out["residuals"] = {{"equation", c.residuals.equation},
                      {"sign", c.residuals.sign},
                      {"bound", c.residuals.bound},
                      {"lambda_tv", c.residuals.lambda_tv}};
  out["u"] = function_json(space, c.u);
  out["xi"] = function_json(space, c.xi);
  out["g"] = flux_json(space, c.g);
  if (!r.certified) {
    out["violated"] = set_json(space, r.violated);
    out["deficit"] = r.deficit;
  }
  return out;
}

Json set_eigenpairs_json(const RandomWalkSpace& space, const std::vector<SetEigenpair>& hits) {
  Json list = Json::array();
  for (const auto& h : hits) {
    Json e;
    e["lambda"] = h.lambda;
    e["set"] = set_json(space, h.set);
    e["g"] = flux_json(space, h.certificate.g);
    e["xi"] = function_json(space, h.certificate.xi);
    list.push_back(std::move(e));
  }
  Json out;
  out["count"] = hits.size();
  out["eigenpairs"] = std::move(list);
  return out;
}

Json balanced_pair_json(const RandomWalkSpace& space, const BalancedPairResult& r) {
  Json out;
  out["certified"] = r.certified;
  out["lambda"] = r.lambda;
  out["omega_calibrable"] = r.omega_calibrable;
  out["complement_calibrable"] = r.complement_calibrable;
  Json fam = Json::array();
  for (const auto& e : r.family) fam.push_back(eigenpair_json(space, e));
  out["family"] = std::move(fam);
  return out;
}

namespace {

const char* method_name(PoincareMethod m) {
  switch (m) {
    case PoincareMethod::exact_small:
      return "exact_small";
    case PoincareMethod::ipm:
      return "ipm";
    case PoincareMethod::analytic:
      return "analytic";
  }
  return "unknown";
}

}  // namespace

Json poincare_json(const RandomWalkSpace& space, const PoincareReport& r) {
  Json out;
  out["p"] = number(r.p);
  out["q"] = r.q;
  out["constant"] = number(r.constant);
  out["lower_bound"] = number(r.lower_bound);
  out["exact"] = r.exact;
  out["method"] = method_name(r.method);
  out["minimizer"] = function_json(space, r.minimizer.empty() ? StateFunction(space.size(), 0.0) : r.minimizer);
  return out;
}

Json extinction_json(const ExtinctionReport& r) {
  Json out;
  out["t_observed"] = r.observed ? number(r.t_observed) : Json(nullptr);
  out["t_upper"] = number(r.t_upper);
  out["t_lower"] = number(r.t_lower);
  out["lambda2"] = number(r.lambda2);
  out["tau"] = r.tau;
  out["holds"] = r.holds;
  out["steps"] = r.trajectory.steps.size() - 1;
  return out;
}

Json iso_json(const RandomWalkSpace& space, const IsoProfile& profile, double n, double iso_constant) {
  Json bps = Json::array();
  for (const auto& b : profile.breakpoints)
    bps.push_back({{"volume", b.volume}, {"min_perimeter", b.min_perimeter}, {"witness", set_json(space, b.witness)}});
  Json out;
  out["n"] = n;
  out["iso_constant"] = iso_constant;
  out["total"] = profile.total;
  out["breakpoints"] = std::move(bps);
  return out;
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const RandomWalkSpace& space, const FlowTrajectory& traj, double tau) {
  os << "t";
  for (const auto& id : space.ids()) os << ',' << csv_field(id);
  os << ",mass,tv,dist2\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    auto k = static_cast<std::size_t>(std::llround(t / tau));
    const auto& d = traj.steps[std::min(k, traj.steps.size() - 1)];
    os << csv_number(t);
    for (double v : traj.snapshots[i]) os << ',' << csv_number(v);
    os << ',' << csv_number(d.mass) << ',' << csv_number(d.tv) << ',' << csv_number(d.dist2_mean) << '\n';
  }
}

void write_profile_csv(std::ostream& os, const RandomWalkSpace& space, const IsoProfile& profile) {
  os << "volume,min_perimeter,witness\n";
  for (const auto& b : profile.breakpoints) {
    std::string w;
    for (int x : b.witness.indices()) w += (w.empty() ? "" : ";") + space.id(x);
    os << csv_number(b.volume) << ',' << csv_number(b.min_perimeter) << ',' << csv_field(w) << '\n';
  }
}

}  // namespace tvflow::cli
