#pragma once

// Consistency of plain STNs by single-source shortest paths.
//
// Edge convention, used everywhere in this library: the constraint Y - X <= d
// is the edge X -> Y with weight d. An STN is consistent iff its constraint
// graph has no negative cycle; shortest distances from a virtual source joined
// to every task with weight 0 are then a feasible schedule.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cstn/core.hpp"

namespace cstn {

struct WeightedEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  std::int64_t weight = 0;
};

namespace detail {

// Bellman-Ford with every node initialised to 0, i.e. a virtual source. Fills
// dist and returns false if a negative cycle is reachable.
inline bool shortest_from_virtual_source(std::size_t num_nodes, std::span<const WeightedEdge> edges,
                                         std::vector<std::int64_t>& dist) {
  dist.assign(num_nodes, 0);
  for (std::size_t round = 0; round <= num_nodes; ++round) {
    bool changed = false;
    for (const auto& e : edges) {
      const std::int64_t cand = dist[e.from] + e.weight;
      if (cand < dist[e.to]) {
        dist[e.to] = cand;
        changed = true;
      }
    }
    if (!changed) return true;
  }
  return false;
}

inline std::vector<WeightedEdge> edges_of(const Stn& stn) {
  std::vector<WeightedEdge> edges;
  edges.reserve(stn.constraints.size());
  for (const auto& c : stn.constraints) {
    if (!stn.tasks.contains(c.from) || !stn.tasks.contains(c.to))
      throw DomainError("STN constraint references a task outside the network");
    edges.push_back({c.from, c.to, c.bound});
  }
  return edges;
}

}  // namespace detail

inline bool stn_consistent(const Stn& stn) {
  std::vector<std::int64_t> dist;
  return detail::shortest_from_virtual_source(stn.num_tasks, detail::edges_of(stn), dist);
}

// A feasible schedule over stn.tasks, in units of stn.unit, or nullopt when the
// network is inconsistent. All returned times are <= 0.
inline std::optional<Schedule> stn_solve(const Stn& stn) {
  std::vector<std::int64_t> dist;
  if (!detail::shortest_from_virtual_source(stn.num_tasks, detail::edges_of(stn), dist)) return std::nullopt;
  Schedule psi(stn.num_tasks, stn.unit);
  for (std::size_t t : stn.tasks.members()) psi.set(t, dist[t]);
  return psi;
}

}  // namespace cstn
