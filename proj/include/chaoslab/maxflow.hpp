#pragma once

#include <vector>

namespace chaoslab {

// Dinic max-flow on a small directed graph with double capacities. Node ids
// are dense 0..node_count-1. Built for the Levy-Prohorov feasibility check:
// a few hundred nodes, bipartite plus source/sink.
class MaxFlowGraph {
 public:
  explicit MaxFlowGraph(int node_count);

  void add_edge(int from, int to, double capacity);

  // Max flow from source to sink; destroys current capacities (one-shot).
  double run(int source, int sink);

 private:
  struct Edge {
    int to;
    double cap;
    int rev;
  };
  bool bfs(int source, int sink);
  double dfs(int v, int sink, double pushed);

  std::vector<std::vector<Edge>> adj_;
  std::vector<int> level_;
  std::vector<int> iter_;
};

}  // namespace chaoslab
