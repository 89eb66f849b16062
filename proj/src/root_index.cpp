#include "sobograph/root_index.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "sobograph/error.hpp"
#include "sobograph/graph_io.hpp"
#include "sobograph/summation.hpp"

namespace sobograph {
namespace {

constexpr double kDeepTreeThreshold = 64.0;

struct TightParents {
  std::vector<double> dist;
  std::vector<EdgeId> parent;  // chosen tight edge per node
  // First ambiguity found, if any.
  NodeId ambiguous_node = kNoNode;
  EdgeId ambiguous_a = kNoEdge;
  EdgeId ambiguous_b = kNoEdge;
  bool connected = true;
};

// Plain Dijkstra followed by a scan of every node's tight incoming edges.
// A node has a unique shortest path iff exactly one edge is tight for it.
TightParents analyze(const Graph& g, NodeId root, double tol, TiePolicy ties) {
  TightParents out;
  out.dist = shortest_path_lengths(g, root);
  const std::size_t n = g.num_nodes();
  out.parent.assign(n, kNoEdge);
  for (NodeId v = 0; v < n; ++v) {
    if (!std::isfinite(out.dist[v])) {
      out.connected = false;
      return out;
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    if (v == root) continue;
    EdgeId best = kNoEdge;
    NodeId best_from = kNoNode;
    for (const Adjacent& a : g.neighbors(v)) {
      const double via = out.dist[a.to] + g.edge(a.edge).w;
      if (via > out.dist[v] + tol || out.dist[a.to] >= out.dist[v]) continue;
      if (best == kNoEdge) {
        best = a.edge;
        best_from = a.to;
        continue;
      }
      if (out.ambiguous_node == kNoNode) {
        out.ambiguous_node = v;
        out.ambiguous_a = std::min(best, a.edge);
        out.ambiguous_b = std::max(best, a.edge);
      }
      if (ties == TiePolicy::kLexicographic &&
          (a.to < best_from || (a.to == best_from && a.edge < best))) {
        best = a.edge;
        best_from = a.to;
      }
    }
    out.parent[v] = best;
  }
  return out;
}

double resolve_tol(const Graph& g, double tol) { return tol < 0.0 ? default_tolerance(g) : tol; }

}  // namespace

double EdgeMassProfile::value(EdgeId e) const noexcept {
  auto it = std::lower_bound(entries.begin(), entries.end(), e,
                             [](const EdgeMass& m, EdgeId x) { return m.edge < x; });
  return it != entries.end() && it->edge == e ? it->value : 0.0;
}

void RootIndex::finish(const Graph& g, ProfileMode mode) {
  const std::size_t n = g.num_nodes();
  const std::size_t m = g.num_edges();
  weight_.resize(m);
  for (EdgeId e = 0; e < m; ++e) weight_[e] = g.edge(e).w;

  parent_node_.assign(n, kNoNode);
  edge_child_.assign(m, kNoNode);
  for (NodeId v = 0; v < n; ++v) {
    if (v == root_) continue;
    const EdgeId e = parent_edge_[v];
    parent_node_[v] = g.edge(e).other(v);
    edge_child_[e] = v;
  }
  pruned_.clear();
  for (EdgeId e = 0; e < m; ++e) {
    if (edge_child_[e] == kNoNode) pruned_.push_back(e);
  }

  // Order by (distance, id); parents strictly precede children because
  // weights are positive.
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), NodeId{0});
  std::sort(order_.begin(), order_.end(), [&](NodeId a, NodeId b) {
    return dist_[a] != dist_[b] ? dist_[a] < dist_[b] : a < b;
  });
  if (order_.front() != root_) throw ValidationError("root is not the closest node to itself");

  // Accumulate path lengths exactly along the tree so that the stored
  // distance equals the sum of weights on the stored path.
  depth_.assign(n, 0);
  dist_[root_] = 0.0;
  for (NodeId v : order_) {
    if (v == root_) continue;
    const NodeId p = parent_node_[v];
    depth_[v] = depth_[p] + 1;
    dist_[v] = dist_[p] + weight_[parent_edge_[v]];
  }

  if (mode == ProfileMode::kAuto) {
    mode = average_depth() > kDeepTreeThreshold ? ProfileMode::kSubtreeSums
                                                : ProfileMode::kPathLists;
  }
  mode_ = mode;
  path_offsets_.clear();
  path_flat_.clear();
  if (mode_ == ProfileMode::kPathLists) {
    path_offsets_.assign(n + 1, 0);
    for (NodeId v = 0; v < n; ++v) path_offsets_[v + 1] = path_offsets_[v] + depth_[v];
    path_flat_.resize(path_offsets_.back());
    for (NodeId v : order_) {
      if (v == root_) continue;
      const NodeId p = parent_node_[v];
      auto dst = path_flat_.begin() + static_cast<std::ptrdiff_t>(path_offsets_[v]);
      std::copy(path_flat_.begin() + static_cast<std::ptrdiff_t>(path_offsets_[p]),
                path_flat_.begin() + static_cast<std::ptrdiff_t>(path_offsets_[p + 1]), dst);
      *(dst + static_cast<std::ptrdiff_t>(depth_[p])) = parent_edge_[v];
    }
  }
}

double RootIndex::average_depth() const noexcept {
  if (depth_.empty()) return 0.0;
  const double total = std::accumulate(depth_.begin(), depth_.end(), 0.0);
  return total / static_cast<double>(depth_.size());
}

std::vector<EdgeId> RootIndex::path_edges(NodeId v) const {
  if (v >= num_nodes()) throw std::out_of_range("unknown node id " + std::to_string(v));
  if (mode_ == ProfileMode::kPathLists) {
    return {path_flat_.begin() + static_cast<std::ptrdiff_t>(path_offsets_[v]),
            path_flat_.begin() + static_cast<std::ptrdiff_t>(path_offsets_[v + 1])};
  }
  std::vector<EdgeId> path;
  path.reserve(depth_[v]);
  for (NodeId x = v; x != root_; x = parent_node_[x]) path.push_back(parent_edge_[x]);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<EdgeId> RootIndex::tree_edges() const {
  std::vector<EdgeId> out;
  out.reserve(num_nodes() > 0 ? num_nodes() - 1 : 0);
  for (EdgeId e = 0; e < edge_child_.size(); ++e) {
    if (edge_child_[e] != kNoNode) out.push_back(e);
  }
  return out;
}

std::vector<NodeId> RootIndex::children(NodeId v) const {
  std::vector<NodeId> out;
  for (NodeId e = 0; e < edge_child_.size(); ++e) {
    if (edge_child_[e] != kNoNode && parent_node_[edge_child_[e]] == v) {
      out.push_back(edge_child_[e]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> RootIndex::gamma_members(EdgeId e) const {
  const NodeId top = edge_child_.at(e);
  if (top == kNoNode) return {};
  // v is a member iff its ancestor at depth(top) is top. Nodes are visited in
  // topological order so membership of the parent is already known.
  std::vector<char> member(num_nodes(), 0);
  member[top] = 1;
  std::vector<NodeId> out{top};
  for (NodeId v : order_) {
    if (v == root_ || v == top || depth_[v] <= depth_[top]) continue;
    if (member[parent_node_[v]]) {
      member[v] = 1;
      out.push_back(v);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

RootIndex build_root_index(const Graph& g, NodeId root, const RootIndexOptions& options) {
  if (!g.contains(root)) throw std::out_of_range("unknown root node id " + std::to_string(root));
  const double tol = resolve_tol(g, options.tol);
  TightParents t = analyze(g, root, tol, options.ties);
  if (!t.connected) throw ValidationError("graph is disconnected");
  if (options.ties == TiePolicy::kStrict && t.ambiguous_node != kNoNode) {
    throw AmbiguousPathError(t.ambiguous_node, t.ambiguous_a, t.ambiguous_b);
  }
  RootIndex idx;
  idx.root_ = root;
  idx.dist_ = std::move(t.dist);
  idx.parent_edge_ = std::move(t.parent);
  idx.finish(g, options.mode);
  return idx;
}

RootIndex restore_root_index(const Graph& g, NodeId root, std::vector<double> dist,
                             std::vector<EdgeId> parent_edge, ProfileMode mode) {
  const std::size_t n = g.num_nodes();
  if (!g.contains(root)) throw std::out_of_range("unknown root node id " + std::to_string(root));
  if (dist.size() != n || parent_edge.size() != n) {
    throw ValidationError("index arrays do not match the graph size");
  }
  if (parent_edge[root] != kNoEdge || dist[root] != 0.0) {
    throw ValidationError("root must have no parent edge and zero distance");
  }
  for (NodeId v = 0; v < n; ++v) {
    if (v == root) continue;
    const EdgeId e = parent_edge[v];
    if (e >= g.num_edges() || (g.edge(e).u != v && g.edge(e).v != v)) {
      throw ValidationError("parent edge of node " + std::to_string(v) + " is not incident");
    }
    const NodeId p = g.edge(e).other(v);
    const double expect = dist[p] + g.edge(e).w;
    if (std::fabs(expect - dist[v]) > 1e-9 * std::max(1.0, dist[v]) || dist[p] >= dist[v]) {
      throw ValidationError("stored parent of node " + std::to_string(v) +
                            " is inconsistent with the stored distances");
    }
  }
  RootIndex idx;
  idx.root_ = root;
  idx.dist_ = std::move(dist);
  idx.parent_edge_ = std::move(parent_edge);
  idx.finish(g, mode);
  return idx;
}

bool check_uniqueness(const Graph& g, NodeId root, double tol) {
  if (!g.contains(root)) return false;
  const TightParents t = analyze(g, root, resolve_tol(g, tol), TiePolicy::kStrict);
  return t.connected && t.ambiguous_node == kNoNode;
}

std::vector<NodeId> enumerate_root_candidates(const Graph& g, double tol) {
  std::vector<NodeId> roots;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (check_uniqueness(g, v, tol)) roots.push_back(v);
  }
  if (roots.empty()) throw EmptyRootSetError();
  return roots;
}

NodeId first_root_candidate(const Graph& g, double tol) {
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (check_uniqueness(g, v, tol)) return v;
  }
  throw EmptyRootSetError();
}

NodeId select_central_root(const Graph& g, double tol, unsigned threads) {
  const std::size_t n = g.num_nodes();
  tol = resolve_tol(g, tol);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> score(n, kInf);
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t v = begin; v < n; v += stride) {
      const TightParents t = analyze(g, static_cast<NodeId>(v), tol, TiePolicy::kStrict);
      if (!t.connected || t.ambiguous_node != kNoNode) continue;
      CompensatedSum s;
      for (double d : t.dist) s += d;
      score[v] = s.value();
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(work, i, threads);
    for (auto& th : pool) th.join();
  }
  const auto best = std::min_element(score.begin(), score.end());
  if (best == score.end() || *best == kInf) throw EmptyRootSetError();
  return static_cast<NodeId>(best - score.begin());
}

EdgeMassProfile edge_mass_profile(const RootIndex& idx, const DiscreteMeasure& mu) {
  for (const Atom& a : mu.atoms()) {
    if (a.node >= idx.num_nodes()) {
      throw std::out_of_range("measure support " + std::to_string(a.node) +
                              " is not a node of the indexed graph");
    }
  }
  EdgeMassProfile profile;
  if (idx.mode_ == ProfileMode::kPathLists) {
    thread_local std::vector<double> acc;
    thread_local std::vector<EdgeId> touched;
    if (acc.size() < idx.num_edges()) acc.assign(idx.num_edges(), 0.0);
    touched.clear();
    for (const Atom& a : mu.atoms()) {
      const std::size_t b = idx.path_offsets_[a.node];
      const std::size_t end = idx.path_offsets_[a.node + 1];
      for (std::size_t k = b; k < end; ++k) {
        const EdgeId e = idx.path_flat_[k];
        if (acc[e] == 0.0) touched.push_back(e);
        acc[e] += a.mass;
      }
    }
    std::sort(touched.begin(), touched.end());
    profile.entries.reserve(touched.size());
    for (EdgeId e : touched) {
      profile.entries.push_back({e, acc[e]});
      acc[e] = 0.0;
    }
    return profile;
  }

  std::vector<double> acc(idx.num_nodes(), 0.0);
  for (const Atom& a : mu.atoms()) acc[a.node] += a.mass;
  for (auto it = idx.order_.rbegin(); it != idx.order_.rend(); ++it) {
    const NodeId v = *it;
    if (v == idx.root_ || acc[v] == 0.0) continue;
    profile.entries.push_back({idx.parent_edge_[v], acc[v]});
    acc[idx.parent_node_[v]] += acc[v];
  }
  std::sort(profile.entries.begin(), profile.entries.end(),
            [](const EdgeMass& a, const EdgeMass& b) { return a.edge < b.edge; });
  return profile;
}

std::string root_index_to_json(const RootIndex& idx, const Graph& g) {
  nlohmann::json parents = nlohmann::json::array();
  for (EdgeId e : idx.parent_edges()) {
    parents.push_back(e == kNoEdge ? -1 : static_cast<long long>(e));
  }
  nlohmann::json doc = {
      {"root", g.label(idx.root())},
      {"num_nodes", g.num_nodes()},
      {"num_edges", g.num_edges()},
      {"labels", g.labels()},
      {"dist", idx.distances()},
      {"parent_edge", std::move(parents)},
  };
  return doc.dump() + "\n";
}

RootIndex root_index_from_json(std::string_view text, const Graph& g) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed index JSON: ") + e.what());
  }
  try {
    if (doc.at("num_nodes").get<std::size_t>() != g.num_nodes() ||
        doc.at("num_edges").get<std::size_t>() != g.num_edges()) {
      throw ValidationError("index was built for a different graph");
    }
    if (doc.contains("labels") && doc["labels"].get<std::vector<std::string>>() !=
                                      std::vector<std::string>(g.labels().begin(), g.labels().end())) {
      throw ValidationError("index label table does not match the graph");
    }
    const NodeId root = g.node(doc.at("root").get<std::string>());
    auto dist = doc.at("dist").get<std::vector<double>>();
    std::vector<EdgeId> parent;
    for (const auto& p : doc.at("parent_edge")) {
      const long long e = p.get<long long>();
      parent.push_back(e < 0 ? kNoEdge : static_cast<EdgeId>(e));
    }
    return restore_root_index(g, root, std::move(dist), std::move(parent));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad index JSON: ") + e.what());
  }
}

void save_root_index(const RootIndex& idx, const Graph& g, const std::filesystem::path& path) {
  write_text_file(path, root_index_to_json(idx, g));
}

RootIndex load_root_index(const std::filesystem::path& path, const Graph& g) {
  return root_index_from_json(read_text_file(path), g);
}

}  // namespace sobograph
