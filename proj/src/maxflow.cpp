#include "chaoslab/maxflow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "chaoslab/errors.hpp"

namespace chaoslab {

namespace {
constexpr double kFlowEps = 1e-13;
}

MaxFlowGraph::MaxFlowGraph(int node_count)
    : adj_(static_cast<std::size_t>(node_count)),
      level_(static_cast<std::size_t>(node_count)),
      iter_(static_cast<std::size_t>(node_count)) {}

void MaxFlowGraph::add_edge(int from, int to, double capacity) {
  if (from < 0 || to < 0 || from >= static_cast<int>(adj_.size()) ||
      to >= static_cast<int>(adj_.size()))
    throw InvalidInputError("max flow: node id out of range");
  Edge fwd{to, capacity, static_cast<int>(adj_[static_cast<std::size_t>(to)].size())};
  Edge bwd{from, 0.0, static_cast<int>(adj_[static_cast<std::size_t>(from)].size())};
  adj_[static_cast<std::size_t>(from)].push_back(fwd);
  adj_[static_cast<std::size_t>(to)].push_back(bwd);
}

bool MaxFlowGraph::bfs(int source, int sink) {
  std::fill(level_.begin(), level_.end(), -1);
  std::queue<int> q;
  level_[static_cast<std::size_t>(source)] = 0;
  q.push(source);
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (const Edge& e : adj_[static_cast<std::size_t>(v)]) {
      if (e.cap > kFlowEps && level_[static_cast<std::size_t>(e.to)] < 0) {
        level_[static_cast<std::size_t>(e.to)] = level_[static_cast<std::size_t>(v)] + 1;
        q.push(e.to);
      }
    }
  }
  return level_[static_cast<std::size_t>(sink)] >= 0;
}

double MaxFlowGraph::dfs(int v, int sink, double pushed) {
  if (v == sink) return pushed;
  for (int& i = iter_[static_cast<std::size_t>(v)];
       i < static_cast<int>(adj_[static_cast<std::size_t>(v)].size()); ++i) {
    Edge& e = adj_[static_cast<std::size_t>(v)][static_cast<std::size_t>(i)];
    if (e.cap > kFlowEps &&
        level_[static_cast<std::size_t>(v)] < level_[static_cast<std::size_t>(e.to)]) {
      const double got = dfs(e.to, sink, std::min(pushed, e.cap));
      if (got > kFlowEps) {
        e.cap -= got;
        adj_[static_cast<std::size_t>(e.to)][static_cast<std::size_t>(e.rev)].cap += got;
        return got;
      }
    }
  }
  return 0.0;
}

double MaxFlowGraph::run(int source, int sink) {
  double flow = 0.0;
  while (bfs(source, sink)) {
    std::fill(iter_.begin(), iter_.end(), 0);
    for (;;) {
      const double got = dfs(source, sink, std::numeric_limits<double>::infinity());
      if (got <= kFlowEps) break;
      flow += got;
    }
  }
  return flow;
}

}  // namespace chaoslab
