#pragma once

#include <cstddef>
#include <deque>
#include <limits>
#include <vector>

#include "pb/rational.hpp"

namespace pb::detail {

// Edmonds-Karp max flow over exact rationals. Shortest augmenting paths keep
// the number of augmentations polynomial regardless of the capacities.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes) : adj_(nodes) {}

  std::size_t add_edge(std::size_t from, std::size_t to, Rational cap) {
    const std::size_t id = edges_.size();
    edges_.push_back({to, std::move(cap), Rational(0)});
    edges_.push_back({from, Rational(0), Rational(0)});
    adj_[from].push_back(id);
    adj_[to].push_back(id + 1);
    return id;
  }

  Rational run(std::size_t s, std::size_t t) {
    Rational total = 0;
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    for (;;) {
      std::vector<std::size_t> via(adj_.size(), none);
      std::vector<bool> seen(adj_.size(), false);
      std::deque<std::size_t> queue{s};
      seen[s] = true;
      while (!queue.empty() && !seen[t]) {
        const std::size_t u = queue.front();
        queue.pop_front();
        for (std::size_t e : adj_[u]) {
          const auto& ed = edges_[e];
          if (!seen[ed.to] && residual(e) > 0) {
            seen[ed.to] = true;
            via[ed.to] = e;
            queue.push_back(ed.to);
          }
        }
      }
      if (!seen[t]) return total;
      Rational push = -1;
      for (std::size_t v = t; v != s; v = edges_[via[v] ^ 1].to) {
        const Rational r = residual(via[v]);
        if (push < 0 || r < push) push = r;
      }
      for (std::size_t v = t; v != s; v = edges_[via[v] ^ 1].to) {
        edges_[via[v]].flow += push;
        edges_[via[v] ^ 1].flow -= push;
      }
      total += push;
    }
  }

  const Rational& flow(std::size_t edge) const { return edges_[edge].flow; }

  // Nodes reachable from s in the residual graph (the source side of a min cut).
  std::vector<bool> reachable(std::size_t s) const {
    std::vector<bool> seen(adj_.size(), false);
    std::deque<std::size_t> queue{s};
    seen[s] = true;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t e : adj_[u])
        if (!seen[edges_[e].to] && residual(e) > 0) {
          seen[edges_[e].to] = true;
          queue.push_back(edges_[e].to);
        }
    }
    return seen;
  }

 private:
  struct Edge {
    std::size_t to;
    Rational cap, flow;
  };

  Rational residual(std::size_t e) const { return edges_[e].cap - edges_[e].flow; }

  std::vector<std::vector<std::size_t>> adj_;
  std::vector<Edge> edges_;
};

}  // namespace pb::detail
