#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sobograph/graph.hpp"
#include "sobograph/measure.hpp"
#include "sobograph/root_index.hpp"

namespace sobograph {

/// Shortest-path distances between the union of two measures' supports.
struct CostMatrix {
  std::vector<NodeId> nodes;  // ascending
  std::vector<double> values;  // row-major, nodes.size()^2

  std::size_t size() const noexcept { return nodes.size(); }
  double operator()(std::size_t i, std::size_t j) const { return values[i * nodes.size() + j]; }
};

CostMatrix support_cost_matrix(const Graph& g, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

struct TransportPlanEntry {
  std::size_t source;
  std::size_t target;
  double flow;
};

struct TransportResult {
  double cost = 0.0;
  std::vector<TransportPlanEntry> plan;  // basic cells with positive flow
  std::size_t pivots = 0;
};

/// Balanced transportation problem solved with the transportation simplex
/// (north-west corner start, Bland's rule for entering and leaving cells).
/// `cost` is row-major supply.size() x demand.size(). Supplies and demands
/// must be nonnegative with totals equal within 1e-6 (NumericError otherwise).
TransportResult solve_transportation(std::span<const double> supply, std::span<const double> demand,
                                     std::span<const double> cost);

/// Exact W_1 under the graph metric.
double exact_w1(const Graph& g, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Kruskal MST, ties broken by edge id. ValidationError when disconnected.
Graph minimum_spanning_tree(const Graph& g);

/// MST under i.i.d. uniform(0,1) edge keys drawn from `seed`; the returned
/// tree keeps the original weights.
Graph random_spanning_tree(const Graph& g, std::uint64_t seed);

/// Closed-form tree-Wasserstein distance; `tree_idx` must be built on a tree.
double tree_wasserstein(const RootIndex& tree_idx, const DiscreteMeasure& mu,
                        const DiscreteMeasure& nu);

}  // namespace sobograph
