#include "tvflow/maxflow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "tvflow/errors.hpp"

namespace tvflow {

MaxFlow::MaxFlow(int nodes, double eps) : head_(static_cast<std::size_t>(nodes), -1), eps_(eps) {}

int MaxFlow::add_node() {
  head_.push_back(-1);
  return size() - 1;
}

int MaxFlow::add_edge(int from, int to, double cap, double rev_cap) {
  if (cap < 0.0 || rev_cap < 0.0) throw Error(ErrorKind::invalid_argument, "negative capacity");
  int id = static_cast<int>(arcs_.size());
  arcs_.push_back({to, head_[from], cap, cap});
  head_[from] = id;
  arcs_.push_back({from, head_[to], rev_cap, rev_cap});
  head_[to] = id + 1;
  max_cap_ = std::max({max_cap_, cap, rev_cap});
  return id;
}

bool MaxFlow::bfs() {
  const double tiny = eps_ * max_cap_;
  level_.assign(head_.size(), -1);
  std::queue<int> q;
  level_[source_] = 0;
  q.push(source_);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int a = head_[v]; a != -1; a = arcs_[a].next)
      if (arcs_[a].cap > tiny && level_[arcs_[a].to] < 0) {
        level_[arcs_[a].to] = level_[v] + 1;
        q.push(arcs_[a].to);
      }
  }
  return level_[sink_] >= 0;
}

double MaxFlow::dfs(int v, double pushed) {
  if (v == sink_) return pushed;
  const double tiny = eps_ * max_cap_;
  for (int& a = iter_[v]; a != -1; a = arcs_[a].next) {
    Arc& arc = arcs_[a];
    if (arc.cap <= tiny || level_[arc.to] != level_[v] + 1) continue;
    double got = dfs(arc.to, std::min(pushed, arc.cap));
    if (got > 0.0) {
      arc.cap -= got;
      arcs_[a ^ 1].cap += got;
      return got;
    }
  }
  return 0.0;
}

double MaxFlow::solve(int source, int sink) {
  source_ = source;
  sink_ = sink;
  double total = 0.0;
  if (source == sink) return total;
  while (bfs()) {
    iter_ = head_;
    while (double f = dfs(source_, std::numeric_limits<double>::infinity())) total += f;
  }
  return total;
}

std::vector<char> MaxFlow::source_side() const {
  const double tiny = eps_ * max_cap_;
  std::vector<char> seen(head_.size(), 0);
  if (source_ < 0) return seen;
  std::vector<int> stack{source_};
  seen[source_] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int a = head_[v]; a != -1; a = arcs_[a].next)
      if (arcs_[a].cap > tiny && !seen[arcs_[a].to]) {
        seen[arcs_[a].to] = 1;
        stack.push_back(arcs_[a].to);
      }
  }
  return seen;
}

double MaxFlow::flow(int edge) const { return arcs_[edge].orig - arcs_[edge].cap; }

}  // namespace tvflow
