#pragma once

#include <vector>

namespace tvflow {

// Dinic's algorithm on real capacities. Residual capacities below
// eps * (largest capacity) count as saturated.
class MaxFlow {
 public:
  explicit MaxFlow(int nodes, double eps = 1e-13);

  int add_node();
  int size() const { return static_cast<int>(head_.size()); }

  // Returns an edge handle. rev_cap > 0 gives an undirected-style pair.
  int add_edge(int from, int to, double cap, double rev_cap = 0.0);

  double solve(int source, int sink);

  // Nodes reachable from the source in the residual graph: the inclusion-minimal
  // source side of a minimum cut.
  std::vector<char> source_side() const;

  // Net flow along the edge in its stated direction.
  double flow(int edge) const;

 private:
  struct Arc {
    int to;
    int next;
    double cap;
    double orig;
  };

  bool bfs();
  double dfs(int v, double pushed);

  std::vector<int> head_;
  std::vector<Arc> arcs_;
  std::vector<int> level_;
  std::vector<int> iter_;
  int source_ = -1;
  int sink_ = -1;
  double eps_;
  double max_cap_ = 0.0;
};

}  // namespace tvflow
