#pragma once

#include <utility>
#include <vector>

#include "tvflow/space.hpp"

namespace tvflow {

struct PerimeterReport {
  double perimeter = 0.0;
  double volume = 0.0;
  double ratio = 0.0;  // NaN when the volume is zero
  double self_interaction = 0.0;
  bool ratio_defined = false;
};

double volume(const RandomWalkSpace& space, const StateSet& e);
double interaction(const RandomWalkSpace& space, const StateSet& a, const StateSet& b);
PerimeterReport perimeter(const RandomWalkSpace& space, const StateSet& e);
// Sum of edge weights leaving e; same number as perimeter(space, e).perimeter.
double perimeter_value(const RandomWalkSpace& space, const StateSet& e);
double ratio(const RandomWalkSpace& space, const StateSet& e);
double localized_perimeter(const RandomWalkSpace& space, const StateSet& e, const StateSet& window);
double union_perimeter_identity_check(const RandomWalkSpace& space, const StateSet& a, const StateSet& b);

double total_variation(const RandomWalkSpace& space, const StateFunction& u);
double dirichlet_energy(const RandomWalkSpace& space, const StateFunction& u);
StateFunction mean_curvature(const RandomWalkSpace& space, const StateSet& e);

struct CoareaResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};
CoareaResult coarea_check(const RandomWalkSpace& space, const StateFunction& u);

// Monotone piecewise-linear map given by knots, extended constantly outside.
class PiecewiseLinear {
 public:
  explicit PiecewiseLinear(std::vector<std::pair<double, double>> knots);
  double operator()(double t) const;
  double lipschitz() const { return lip_; }

 private:
  std::vector<std::pair<double, double>> knots_;
  double lip_ = 0.0;
};

bool lipschitz_contraction_check(const RandomWalkSpace& space, const StateFunction& u,
                                 const PiecewiseLinear& phi, double slack = 1e-12);

double integral(const RandomWalkSpace& space, const StateFunction& u);
double mean(const RandomWalkSpace& space, const StateFunction& u);
// p <= 0 or infinite selects the sup norm.
double lp_norm(const RandomWalkSpace& space, const StateFunction& u, double p);
StateFunction indicator(const StateSet& e);

}  // namespace tvflow
