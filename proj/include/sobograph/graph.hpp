#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sobograph/types.hpp"

namespace sobograph {

struct Edge {
  NodeId u;
  NodeId v;
  double w;

  NodeId other(NodeId x) const noexcept { return x == u ? v : u; }
  bool operator==(const Edge&) const = default;
};

struct Adjacent {
  NodeId to;
  EdgeId edge;
};

/// Weighted undirected graph with dense node ids 0..n-1 and edge ids 0..m-1.
///
/// Construction rejects self-loops, duplicate node pairs, out-of-range
/// endpoints and non-positive or non-finite weights. Connectivity is not
/// enforced here; see `validate_graph`. The object is immutable afterwards.
class Graph {
 public:
  Graph() = default;

  /// `labels` may be empty, in which case node i is labelled "i". `coords`
  /// may be empty or hold one vector per node.
  Graph(std::size_t num_nodes, std::vector<Edge> edges,
        std::vector<std::string> labels = {},
        std::vector<std::vector<double>> coords = {});

  std::size_t num_nodes() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const Adjacent> neighbors(NodeId v) const noexcept {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }

  const std::string& label(NodeId v) const { return labels_.at(v); }
  std::span<const std::string> labels() const noexcept { return labels_; }
  std::optional<NodeId> find(std::string_view label) const;
  /// Like `find` but throws `std::out_of_range` naming the label.
  NodeId node(std::string_view label) const;

  bool has_coords() const noexcept { return !coords_.empty(); }
  std::span<const double> coords(NodeId v) const { return coords_.at(v); }
  const std::vector<std::vector<double>>& all_coords() const noexcept { return coords_; }

  bool contains(NodeId v) const noexcept { return v < num_nodes(); }
  /// Edge joining u and v, if any.
  std::optional<EdgeId> find_edge(NodeId u, NodeId v) const;
  bool has_edge(NodeId u, NodeId v) const { return find_edge(u, v).has_value(); }
  double max_weight() const noexcept { return max_weight_; }

  bool operator==(const Graph& other) const {
    return edges_ == other.edges_ && labels_ == other.labels_ && coords_ == other.coords_;
  }

 private:
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Adjacent> adjacency_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> label_index_;
  std::vector<std::vector<double>> coords_;
  double max_weight_ = 0.0;
};

struct ValidationReport {
  bool connected = false;
  bool has_short_cuts = false;
  std::vector<EdgeId> offending_edges;
  bool positive_weights = false;
};

/// Default short-cut tolerance, 1e-9 times the largest weight.
double default_tolerance(const Graph& g) noexcept;

/// Connectivity, weight positivity and short-cut report. An edge is a short
/// cut when the shortest alternative path between its endpoints (with the
/// edge removed) is shorter than `w_e - tol`. Negative `tol` selects the
/// default.
ValidationReport validate_graph(const Graph& g, double tol = -1.0);

bool is_connected(const Graph& g);
bool is_tree(const Graph& g);

/// Single-source shortest-path lengths (Dijkstra, binary heap).
/// Unreachable nodes get +infinity. When `stop_after` is non-empty the search
/// halts as soon as every listed node is settled; other entries may then be
/// upper bounds only.
std::vector<double> shortest_path_lengths(const Graph& g, NodeId source,
                                          std::span<const NodeId> stop_after = {},
                                          EdgeId skip_edge = kNoEdge);

/// d(u, v); throws `std::out_of_range` for unknown ids.
double shortest_path_distance(const Graph& g, NodeId u, NodeId v);

/// lambda*(G): total edge length, compensated sum.
double length_measure_total(const Graph& g);

/// Returns a copy with each weight scaled by (1 + eps * u_e), u_e uniform in
/// (0,1) drawn from `seed`. Used to restore unique shortest paths.
Graph jitter_weights(const Graph& g, double eps, std::uint64_t seed);

/// Subgraph holding all nodes and the given edges (in ascending id order).
Graph edge_subgraph(const Graph& g, std::vector<EdgeId> edges);

}  // namespace sobograph
