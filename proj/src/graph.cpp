#include "sobograph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <random>
#include <stdexcept>
#include <utility>

#include "sobograph/error.hpp"
#include "sobograph/summation.hpp"

namespace sobograph {

Graph::Graph(std::size_t num_nodes, std::vector<Edge> edges, std::vector<std::string> labels,
             std::vector<std::vector<double>> coords)
    : edges_(std::move(edges)), labels_(std::move(labels)), coords_(std::move(coords)) {
  if (labels_.empty()) {
    labels_.reserve(num_nodes);
    for (std::size_t i = 0; i < num_nodes; ++i) labels_.push_back(std::to_string(i));
  }
  if (labels_.size() != num_nodes) throw ValidationError("label count does not match node count");
  if (!coords_.empty() && coords_.size() != num_nodes) {
    throw ValidationError("coordinate count does not match node count");
  }
  for (NodeId v = 0; v < num_nodes; ++v) {
    if (!label_index_.emplace(labels_[v], v).second) {
      throw ValidationError("duplicate node label '" + labels_[v] + "'");
    }
  }

  std::vector<std::pair<NodeId, NodeId>> pairs;
  pairs.reserve(edges_.size());
  std::vector<std::size_t> degree(num_nodes, 0);
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    const Edge& ed = edges_[e];
    if (ed.u >= num_nodes || ed.v >= num_nodes) {
      throw ValidationError("edge " + std::to_string(e) + " references an unknown node");
    }
    if (ed.u == ed.v) throw ValidationError("edge " + std::to_string(e) + " is a self-loop");
    if (!std::isfinite(ed.w) || ed.w <= 0.0) {
      throw ValidationError("edge " + std::to_string(e) + " has non-positive weight");
    }
    pairs.emplace_back(std::min(ed.u, ed.v), std::max(ed.u, ed.v));
    ++degree[ed.u];
    ++degree[ed.v];
    max_weight_ = std::max(max_weight_, ed.w);
  }
  std::sort(pairs.begin(), pairs.end());
  if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end()) {
    throw ValidationError("duplicate edge between the same pair of nodes");
  }

  offsets_.assign(num_nodes + 1, 0);
  for (std::size_t v = 0; v < num_nodes; ++v) offsets_[v + 1] = offsets_[v] + degree[v];
  adjacency_.resize(offsets_.back());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    const Edge& ed = edges_[e];
    adjacency_[cursor[ed.u]++] = {ed.v, e};
    adjacency_[cursor[ed.v]++] = {ed.u, e};
  }
}

std::optional<EdgeId> Graph::find_edge(NodeId u, NodeId v) const {
  if (!contains(u) || !contains(v)) return std::nullopt;
  for (const Adjacent& a : neighbors(u)) {
    if (a.to == v) return a.edge;
  }
  return std::nullopt;
}

std::optional<NodeId> Graph::find(std::string_view label) const {
  auto it = label_index_.find(std::string(label));
  if (it == label_index_.end()) return std::nullopt;
  return it->second;
}

NodeId Graph::node(std::string_view label) const {
  if (auto v = find(label)) return *v;
  throw std::out_of_range("unknown node label '" + std::string(label) + "'");
}

double default_tolerance(const Graph& g) noexcept { return 1e-9 * g.max_weight(); }

bool is_connected(const Graph& g) {
  const std::size_t n = g.num_nodes();
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (const Adjacent& a : g.neighbors(v)) {
      if (!seen[a.to]) {
        seen[a.to] = 1;
        ++count;
        stack.push_back(a.to);
      }
    }
  }
  return count == n;
}

bool is_tree(const Graph& g) { return g.num_nodes() > 0 && g.num_edges() + 1 == g.num_nodes() && is_connected(g); }

std::vector<double> shortest_path_lengths(const Graph& g, NodeId source,
                                          std::span<const NodeId> stop_after, EdgeId skip_edge) {
  if (!g.contains(source)) throw std::out_of_range("unknown node id " + std::to_string(source));
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::size_t n = g.num_nodes();
  std::vector<double> dist(n, kInf);
  std::vector<char> settled(n, 0);
  std::vector<char> wanted;
  std::size_t remaining = 0;
  if (!stop_after.empty()) {
    wanted.assign(n, 0);
    for (NodeId t : stop_after) {
      if (!g.contains(t)) throw std::out_of_range("unknown node id " + std::to_string(t));
      if (!wanted[t]) {
        wanted[t] = 1;
        ++remaining;
      }
    }
  }

  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (settled[v]) continue;
    settled[v] = 1;
    if (!wanted.empty() && wanted[v] && --remaining == 0) break;
    for (const Adjacent& a : g.neighbors(v)) {
      if (a.edge == skip_edge || settled[a.to]) continue;
      const double nd = d + g.edge(a.edge).w;
      if (nd < dist[a.to]) {
        dist[a.to] = nd;
        heap.emplace(nd, a.to);
      }
    }
  }
  return dist;
}

double shortest_path_distance(const Graph& g, NodeId u, NodeId v) {
  if (!g.contains(u) || !g.contains(v)) throw std::out_of_range("unknown node id");
  if (u == v) return 0.0;
  // Always search from the smaller id so that d(u, v) == d(v, u) bitwise.
  if (v < u) std::swap(u, v);
  const NodeId target[] = {v};
  return shortest_path_lengths(g, u, target)[v];
}

double length_measure_total(const Graph& g) {
  CompensatedSum total;
  for (const Edge& e : g.edges()) total += e.w;
  return total.value();
}

ValidationReport validate_graph(const Graph& g, double tol) {
  ValidationReport report;
  if (tol < 0.0) tol = default_tolerance(g);
  report.connected = is_connected(g);
  report.positive_weights = std::all_of(g.edges().begin(), g.edges().end(),
                                        [](const Edge& e) { return e.w > 0.0; });
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    const NodeId target[] = {ed.v};
    const double alt = shortest_path_lengths(g, ed.u, target, e)[ed.v];
    if (alt < ed.w - tol) report.offending_edges.push_back(e);
  }
  report.has_short_cuts = !report.offending_edges.empty();
  return report;
}

Graph jitter_weights(const Graph& g, double eps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  for (Edge& e : edges) {
    double u = unit(rng);
    while (u == 0.0) u = unit(rng);
    e.w *= 1.0 + eps * u;
  }
  return Graph(g.num_nodes(), std::move(edges), {g.labels().begin(), g.labels().end()},
               g.all_coords());
}

Graph edge_subgraph(const Graph& g, std::vector<EdgeId> edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::vector<Edge> kept;
  kept.reserve(edges.size());
  for (EdgeId e : edges) kept.push_back(g.edge(e));
  return Graph(g.num_nodes(), std::move(kept), {g.labels().begin(), g.labels().end()},
               g.all_coords());
}

}  // namespace sobograph
