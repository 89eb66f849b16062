#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sobograph/graph.hpp"
#include "sobograph/measure.hpp"
#include "sobograph/types.hpp"

namespace sobograph {

enum class TiePolicy {
  kStrict,         // equal-length parents raise AmbiguousPathError
  kLexicographic,  // keep the tight parent with the smallest (node, edge) id; exploratory only
};

enum class ProfileMode {
  kAuto,         // path lists unless the average root-path length exceeds 64 edges
  kPathLists,    // walk stored per-node root paths
  kSubtreeSums,  // one reverse-topological pass over the whole tree
};

struct RootIndexOptions {
  double tol = -1.0;  // negative: 1e-9 * max weight
  TiePolicy ties = TiePolicy::kStrict;
  ProfileMode mode = ProfileMode::kAuto;
};

struct EdgeMass {
  EdgeId edge;
  double value;
  bool operator==(const EdgeMass&) const = default;
};

/// Sparse vector (mu(gamma_e))_e over shortest-path-tree edges, ascending edge
/// id. Edges that are absent carry zero mass.
struct EdgeMassProfile {
  std::vector<EdgeMass> entries;

  double value(EdgeId e) const noexcept;
  bool operator==(const EdgeMassProfile&) const = default;
};

/// Shortest-path tree of one root node together with everything needed to
/// evaluate edge masses. Self-contained: it copies the edge weights it needs,
/// so it may outlive the Graph it was built from.
class RootIndex {
 public:
  RootIndex() = default;

  NodeId root() const noexcept { return root_; }
  std::size_t num_nodes() const noexcept { return dist_.size(); }
  std::size_t num_edges() const noexcept { return weight_.size(); }

  double dist(NodeId v) const { return dist_.at(v); }
  std::span<const double> distances() const noexcept { return dist_; }
  EdgeId parent_edge(NodeId v) const { return parent_edge_.at(v); }
  std::span<const EdgeId> parent_edges() const noexcept { return parent_edge_; }
  NodeId parent_node(NodeId v) const { return parent_node_.at(v); }
  std::size_t depth(NodeId v) const { return depth_.at(v); }
  double edge_weight(EdgeId e) const { return weight_.at(e); }

  /// Edge ids on [root, v], ordered from the root outwards.
  std::vector<EdgeId> path_edges(NodeId v) const;

  bool is_tree_edge(EdgeId e) const { return edge_child_.at(e) != kNoNode; }
  /// Endpoint of tree edge `e` farther from the root; kNoNode for pruned edges.
  NodeId edge_child(EdgeId e) const { return edge_child_.at(e); }
  std::vector<EdgeId> tree_edges() const;
  /// Edges whose gamma set contains no node (every non-tree edge).
  std::span<const EdgeId> pruned_edges() const noexcept { return pruned_; }

  /// gamma_e intersected with V: the descendants of the far endpoint of
  /// `e`, sorted. Empty for pruned edges. Computed on demand.
  std::vector<NodeId> gamma_members(EdgeId e) const;
  std::vector<NodeId> children(NodeId v) const;

  /// Nodes in nondecreasing distance from the root (root first).
  std::span<const NodeId> order() const noexcept { return order_; }
  ProfileMode mode() const noexcept { return mode_; }
  double average_depth() const noexcept;

  friend RootIndex build_root_index(const Graph&, NodeId, const RootIndexOptions&);
  friend RootIndex restore_root_index(const Graph&, NodeId, std::vector<double>,
                                      std::vector<EdgeId>, ProfileMode);
  friend EdgeMassProfile edge_mass_profile(const RootIndex&, const DiscreteMeasure&);

 private:
  void finish(const Graph& g, ProfileMode mode);

  NodeId root_ = kNoNode;
  std::vector<double> dist_;
  std::vector<EdgeId> parent_edge_;
  std::vector<NodeId> parent_node_;
  std::vector<std::size_t> depth_;
  std::vector<NodeId> order_;
  std::vector<double> weight_;
  std::vector<NodeId> edge_child_;
  std::vector<EdgeId> pruned_;
  // CSR root paths, only in kPathLists mode.
  std::vector<std::size_t> path_offsets_;
  std::vector<EdgeId> path_flat_;
  ProfileMode mode_ = ProfileMode::kAuto;
};

/// Dijkstra from `root`, tight-parent analysis, tree materialization.
/// Throws AmbiguousPathError (strict ties) or ValidationError when the graph
/// is disconnected.
RootIndex build_root_index(const Graph& g, NodeId root, const RootIndexOptions& options = {});

/// Rebuilds an index from persisted distances and parent edges, verifying
/// that the parents form a shortest-path tree.
RootIndex restore_root_index(const Graph& g, NodeId root, std::vector<double> dist,
                             std::vector<EdgeId> parent_edge,
                             ProfileMode mode = ProfileMode::kAuto);

/// True iff every node has a unique shortest path to `root`.
bool check_uniqueness(const Graph& g, NodeId root, double tol = -1.0);

/// All unique-path roots in ascending id order; EmptyRootSetError if none.
std::vector<NodeId> enumerate_root_candidates(const Graph& g, double tol = -1.0);

/// First unique-path root in ascending id order; EmptyRootSetError if none.
NodeId first_root_candidate(const Graph& g, double tol = -1.0);

/// Unique-path root minimizing the sum of distances to all nodes (ties to
/// the lower id). EmptyRootSetError if none.
NodeId select_central_root(const Graph& g, double tol = -1.0, unsigned threads = 1);

/// mu(gamma_e) for every tree edge reached by supp(mu).
EdgeMassProfile edge_mass_profile(const RootIndex& idx, const DiscreteMeasure& mu);

std::string root_index_to_json(const RootIndex& idx, const Graph& g);
RootIndex root_index_from_json(std::string_view text, const Graph& g);
void save_root_index(const RootIndex& idx, const Graph& g, const std::filesystem::path& path);
RootIndex load_root_index(const std::filesystem::path& path, const Graph& g);

}  // namespace sobograph
