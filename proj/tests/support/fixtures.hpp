#pragma once

// Small graphs and random generators shared by the test suites.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "sobograph/builder.hpp"
#include "sobograph/graph.hpp"
#include "sobograph/measure.hpp"

namespace sobograph::testing {

using Rng = std::mt19937_64;

// z0 -(2)- a -(3)- b ; ids z0=0, a=1, b=2, edges <z0,a>=0, <a,b>=1.
inline Graph path_graph() {
  return Graph(3, {{0, 1, 2.0}, {1, 2, 3.0}}, {"z0", "a", "b"});
}

inline Graph cycle4(double w0 = 1.0, double w1 = 1.0, double w2 = 1.0, double w3 = 1.0) {
  return Graph(4, {{0, 1, w0}, {1, 2, w1}, {2, 3, w2}, {3, 0, w3}});
}

inline Graph triangle(double w01, double w12, double w02) {
  return Graph(3, {{0, 1, w01}, {1, 2, w12}, {0, 2, w02}});
}

// Star with centre 0 and `leaves` leaves, weights 1..leaves.
inline Graph star(std::size_t leaves) {
  std::vector<Edge> edges;
  for (std::size_t k = 1; k <= leaves; ++k) {
    edges.push_back({0, static_cast<NodeId>(k), static_cast<double>(k)});
  }
  return Graph(leaves + 1, std::move(edges));
}

// Petersen graph, unit weights, nodes x1..x10 (ids 0..9), edges e1..e15
// (ids 0..14): outer cycle e1..e5, spokes e6..e10 (e6 = <x1,x6>), inner
// pentagram e11..e15 with e12 = <x6,x8> and e15 = <x9,x6>.
inline Graph petersen() {
  auto x = [](int i) { return static_cast<NodeId>(i - 1); };
  std::vector<Edge> edges = {
      {x(1), x(2), 1}, {x(2), x(3), 1}, {x(3), x(4), 1}, {x(4), x(5), 1}, {x(5), x(1), 1},
      {x(1), x(6), 1}, {x(2), x(7), 1}, {x(3), x(8), 1}, {x(4), x(9), 1}, {x(5), x(10), 1},
      {x(8), x(10), 1}, {x(6), x(8), 1}, {x(10), x(7), 1}, {x(7), x(9), 1}, {x(9), x(6), 1},
  };
  std::vector<std::string> labels;
  for (int i = 1; i <= 10; ++i) labels.push_back("x" + std::to_string(i));
  return Graph(10, std::move(edges), std::move(labels));
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Node i > 0 hangs off a uniformly chosen earlier node; weights U(lo, hi).
inline Graph random_tree(std::size_t n, Rng& rng, double lo = 0.1, double hi = 10.0) {
  std::vector<Edge> edges;
  for (std::size_t i = 1; i < n; ++i) {
    edges.push_back({static_cast<NodeId>(uniform_index(rng, i)), static_cast<NodeId>(i),
                     uniform(rng, lo, hi)});
  }
  // Shuffle edge ids so tree edges are not ordered by depth.
  std::shuffle(edges.begin(), edges.end(), rng);
  return Graph(n, std::move(edges));
}

inline PointCloud random_points(std::size_t n, std::size_t dim, Rng& rng) {
  std::vector<double> flat(n * dim);
  for (double& x : flat) x = uniform(rng, 0.0, 1.0);
  return PointCloud(dim, std::move(flat));
}

// Random spanning tree plus `extra` random chords over random points in the
// unit square; Euclidean weights, so edges are shortest paths and ties have
// probability zero.
inline Graph random_euclidean_graph(std::size_t n, std::size_t extra, Rng& rng) {
  const PointCloud pts = random_points(n, 2, rng);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (std::size_t i = 1; i < n; ++i) {
    pairs.emplace_back(static_cast<NodeId>(uniform_index(rng, i)), static_cast<NodeId>(i));
  }
  std::size_t attempts = 0;
  while (extra > 0 && attempts++ < 100 * (extra + 1)) {
    NodeId a = static_cast<NodeId>(uniform_index(rng, n));
    NodeId b = static_cast<NodeId>(uniform_index(rng, n));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    bool dup = false;
    for (const auto& [u, v] : pairs) dup |= (std::min(u, v) == a && std::max(u, v) == b);
    if (dup) continue;
    pairs.emplace_back(a, b);
    --extra;
  }
  std::shuffle(pairs.begin(), pairs.end(), rng);
  std::vector<Edge> edges;
  for (const auto& [a, b] : pairs) edges.push_back({a, b, euclidean_distance(pts[a], pts[b])});
  return Graph(n, std::move(edges), {}, pts.rows());
}

// `k` distinct supports drawn uniformly, masses U(0.05, 1) normalized.
inline DiscreteMeasure random_measure(std::size_t num_nodes, std::size_t k, Rng& rng) {
  k = std::min(k, num_nodes);
  std::vector<NodeId> nodes;
  std::vector<char> used(num_nodes, 0);
  while (nodes.size() < k) {
    const auto v = static_cast<NodeId>(uniform_index(rng, num_nodes));
    if (!used[v]) {
      used[v] = 1;
      nodes.push_back(v);
    }
  }
  std::vector<Atom> atoms;
  for (NodeId v : nodes) atoms.push_back({v, uniform(rng, 0.05, 1.0)});
  return DiscreteMeasure(std::move(atoms), /*normalize=*/true);
}

inline DiscreteMeasure random_measure_upto(std::size_t num_nodes, std::size_t max_k, Rng& rng) {
  return random_measure(num_nodes, 1 + uniform_index(rng, max_k), rng);
}

}  // namespace sobograph::testing
