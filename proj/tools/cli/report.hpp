#pragma once

#include <ostream>
#include <string>

#include "json.hpp"
#include "tvflow/cheeger.hpp"
#include "tvflow/flow.hpp"
#include "tvflow/geometry.hpp"
#include "tvflow/iso.hpp"
#include "tvflow/space.hpp"

namespace tvflow::cli {

using Json = nlohmann::ordered_json;

// NaN and infinities become null.
Json number(double v);

Json set_json(const RandomWalkSpace& space, const StateSet& s);
Json function_json(const RandomWalkSpace& space, const StateFunction& u);
// Oriented pair list [[x, y, g(x, y)], ...] over the support pairs.
Json flux_json(const RandomWalkSpace& space, const FluxField& g);

Json validation_json(const RandomWalkSpace& space);
Json perimeter_json(const PerimeterReport& r);
Json cheeger_json(const RandomWalkSpace& space, const CheegerReport& r);
Json calibrability_json(const RandomWalkSpace& space, const CalibrabilityResult& r);
Json eigenpair_json(const RandomWalkSpace& space, const EigenpairResult& r);
Json set_eigenpairs_json(const RandomWalkSpace& space, const std::vector<SetEigenpair>& hits);
Json balanced_pair_json(const RandomWalkSpace& space, const BalancedPairResult& r);
Json poincare_json(const RandomWalkSpace& space, const PoincareReport& r);
Json extinction_json(const ExtinctionReport& r);
Json iso_json(const RandomWalkSpace& space, const IsoProfile& profile, double n, double iso_constant);

// 17 significant digits, the fixed float format of every CSV.
std::string csv_number(double v);

// Columns: t, one per state, mass, tv, dist2.
void write_trajectory_csv(std::ostream& os, const RandomWalkSpace& space, const FlowTrajectory& traj, double tau);
// Columns: volume, min_perimeter, witness.
void write_profile_csv(std::ostream& os, const RandomWalkSpace& space, const IsoProfile& profile);

}  // namespace tvflow::cli
