#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tvflow {

inline constexpr double default_tolerance = 1e-9;

// Real values indexed by the dense state index of a space.
using StateFunction = std::vector<double>;

class RandomWalkSpace;

class StateSet {
 public:
  StateSet() = default;
  explicit StateSet(int universe) : mask_(static_cast<std::size_t>(universe), 0) {}

  static StateSet from_indices(int universe, const std::vector<int>& members);
  static StateSet full(int universe);
  static StateSet of(const RandomWalkSpace& space, const std::vector<std::string>& ids);

  int universe() const { return static_cast<int>(mask_.size()); }
  bool contains(int x) const { return mask_[static_cast<std::size_t>(x)] != 0; }
  void insert(int x) { mask_[static_cast<std::size_t>(x)] = 1; }
  void erase(int x) { mask_[static_cast<std::size_t>(x)] = 0; }

  int count() const;
  bool empty() const { return count() == 0; }
  std::vector<int> indices() const;
  StateSet complement() const;

  friend bool operator==(const StateSet&, const StateSet&) = default;

 private:
  std::vector<char> mask_;
};

// Symmetric interaction weight of an unordered support pair, w = nu(a) K(a,b).
struct Edge {
  int a = 0;
  int b = 0;
  double w = 0.0;
};

struct Incidence {
  int other = 0;
  int edge = 0;
};

struct ValidationReport {
  double stochasticity_residual = 0.0;
  double balance_residual = 0.0;
  int worst_row = -1;
  int worst_pair_a = -1;
  int worst_pair_b = -1;
};

struct KernelEntry {
  std::string from;
  std::string to;
  double value = 0.0;
};

struct GraphEdge {
  std::string a;
  std::string b;
  double w = 0.0;
};

class RandomWalkSpace {
 public:
  int size() const { return static_cast<int>(ids_.size()); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(int x) const { return ids_[static_cast<std::size_t>(x)]; }
  std::optional<int> find(std::string_view id) const;
  int index(std::string_view id) const;

  const std::vector<double>& nu() const { return nu_; }
  double nu(int x) const { return nu_[static_cast<std::size_t>(x)]; }
  double total_measure() const { return total_; }
  double tolerance() const { return tolerance_; }

  // Row x of the kernel, sorted by column, self-loop included.
  std::span<const int> row_cols(int x) const;
  std::span<const double> row_vals(int x) const;
  double kernel(int x, int y) const;
  double loop(int x) const { return loop_[static_cast<std::size_t>(x)]; }

  // Off-diagonal support pairs with a < b.
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const Incidence> incident(int x) const;

  const ValidationReport& validation() const { return report_; }

  friend RandomWalkSpace from_kernel(std::vector<std::string> states,
                                     const std::vector<KernelEntry>& entries,
                                     std::vector<double> nu, double tolerance);
  friend struct SpaceBuilder;

 private:
  void build_index();

  std::vector<std::string> ids_;
  std::vector<double> nu_;
  double total_ = 0.0;
  double tolerance_ = default_tolerance;
  std::vector<int> row_ptr_;
  std::vector<int> cols_;
  std::vector<double> vals_;
  std::vector<double> loop_;
  std::vector<Edge> edges_;
  std::vector<int> inc_ptr_;
  std::vector<Incidence> inc_;
  std::unordered_map<std::string, int> lookup_;
  ValidationReport report_;
};

RandomWalkSpace from_kernel(std::vector<std::string> states,
                            const std::vector<KernelEntry>& entries,
                            std::vector<double> nu, double tolerance = default_tolerance);

RandomWalkSpace from_weighted_graph(const std::vector<GraphEdge>& edges, bool allow_loops = true,
                                    double tolerance = default_tolerance);

// Mass leaving omega becomes a self-loop. States keep their ids.
RandomWalkSpace restrict_to(const RandomWalkSpace& space, const StateSet& omega);

struct Point {
  std::string id;
  std::vector<double> coords;
  double mu = 1.0;
};

// Strict euclidean balls |x - y| < epsilon. The invariant measure is
// nu(x) = mu(x) * mu(B(x, epsilon)), which makes the walk reversible.
RandomWalkSpace epsilon_step(const std::vector<Point>& points, double epsilon,
                             double tolerance = default_tolerance);

StateSet neighborhood_closure(const RandomWalkSpace& space, const StateSet& omega);

struct StencilTap {
  int dx = 0;
  int dy = 0;
  double weight = 0.0;
};

std::vector<StencilTap> four_neighbor_stencil(double weight = 1.0);

std::string grid_id(int i, int j);

// Grid state (i, j) is labelled grid_id(x0 + column, y0 + row).
RandomWalkSpace stencil_grid(int width, int height, const std::vector<StencilTap>& stencil,
                             bool wrap, int x0 = 0, int y0 = 0);

// Connected components of the support graph restricted to the members of omega.
std::vector<StateSet> support_components(const RandomWalkSpace& space, const StateSet& omega);

void check_size(const RandomWalkSpace& space, const StateFunction& u);
void check_size(const RandomWalkSpace& space, const StateSet& s);

}  // namespace tvflow
