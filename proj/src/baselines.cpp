#include "sobograph/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "sobograph/detail/disjoint_sets.hpp"
#include "sobograph/error.hpp"
#include "sobograph/sobolev.hpp"
#include "sobograph/summation.hpp"

namespace sobograph {
namespace {

constexpr double kMassBalanceTolerance = 1e-6;

// Basic cells form a spanning tree over m row nodes and n column nodes
// (column j is tree node m + j).
class TransportationSimplex {
 public:
  TransportationSimplex(std::span<const double> supply, std::span<const double> demand,
                        std::span<const double> cost)
      : m_(supply.size()), n_(demand.size()), cost_(cost) {
    double max_cost = 0.0;
    for (double c : cost) max_cost = std::max(max_cost, std::fabs(c));
    eps_ = 1e-11 * (1.0 + max_cost);
    north_west_corner(supply, demand);
  }

  TransportResult run() {
    TransportResult result;
    while (true) {
      compute_duals();
      const std::size_t entering = find_entering();
      if (entering == kNone) break;
      pivot(entering);
      ++result.pivots;
    }
    CompensatedSum total;
    for (const Cell& c : basis_) {
      if (c.x <= 0.0) continue;
      total += c.x * cost_[c.i * n_ + c.j];
      result.plan.push_back({c.i, c.j, c.x});
    }
    result.cost = total.value();
    std::sort(result.plan.begin(), result.plan.end(), [](const auto& a, const auto& b) {
      return a.source != b.source ? a.source < b.source : a.target < b.target;
    });
    return result;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  struct Cell {
    std::size_t i;
    std::size_t j;
    double x;
  };

  void north_west_corner(std::span<const double> supply, std::span<const double> demand) {
    std::vector<double> a(supply.begin(), supply.end());
    std::vector<double> b(demand.begin(), demand.end());
    in_basis_.assign(m_ * n_, 0);
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < m_ && j < n_) {
      const double x = std::min(a[i], b[j]);
      basis_.push_back({i, j, x});
      in_basis_[i * n_ + j] = 1;
      a[i] -= x;
      b[j] -= x;
      if (i + 1 == m_) {
        ++j;
      } else if (j + 1 == n_) {
        ++i;
      } else if (a[i] <= b[j]) {
        ++i;
      } else {
        ++j;
      }
    }
    // Rounding may leave the final cell a hair off; flows stay nonnegative.
    for (Cell& c : basis_) c.x = std::max(c.x, 0.0);
  }

  void build_tree() {
    adj_.assign(m_ + n_, {});
    for (std::size_t k = 0; k < basis_.size(); ++k) {
      adj_[basis_[k].i].push_back(k);
      adj_[m_ + basis_[k].j].push_back(k);
    }
  }

  std::size_t other_end(std::size_t cell, std::size_t node) const {
    const Cell& c = basis_[cell];
    return node < m_ ? m_ + c.j : c.i;
  }

  void compute_duals() {
    build_tree();
    u_.assign(m_, 0.0);
    v_.assign(n_, 0.0);
    std::vector<char> seen(m_ + n_, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      for (std::size_t k : adj_[node]) {
        const std::size_t next = other_end(k, node);
        if (seen[next]) continue;
        seen[next] = 1;
        const Cell& c = basis_[k];
        const double cij = cost_[c.i * n_ + c.j];
        if (node < m_) {
          v_[c.j] = cij - u_[c.i];
        } else {
          u_[c.i] = cij - v_[c.j];
        }
        stack.push_back(next);
      }
    }
  }

  std::size_t find_entering() const {
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        const std::size_t cell = i * n_ + j;
        if (in_basis_[cell]) continue;
        if (cost_[cell] - u_[i] - v_[j] < -eps_) return cell;
      }
    }
    return kNone;
  }

  void pivot(std::size_t entering) {
    const std::size_t ei = entering / n_;
    const std::size_t ej = entering % n_;
    // Tree path from row ei to column ej.
    std::vector<std::size_t> via(m_ + n_, kNone);
    std::vector<char> seen(m_ + n_, 0);
    std::vector<std::size_t> stack{ei};
    seen[ei] = 1;
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      if (node == m_ + ej) break;
      for (std::size_t k : adj_[node]) {
        const std::size_t next = other_end(k, node);
        if (seen[next]) continue;
        seen[next] = 1;
        via[next] = k;
        stack.push_back(next);
      }
    }
    // Walking back from the column, path cells alternate -, +, -, ... and the
    // last one (touching row ei) is negative.
    std::vector<std::size_t> minus;
    std::vector<std::size_t> plus;
    std::size_t node = m_ + ej;
    bool negative = true;
    while (node != ei) {
      const std::size_t k = via[node];
      (negative ? minus : plus).push_back(k);
      negative = !negative;
      node = other_end(k, node);
    }
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t k : minus) theta = std::min(theta, basis_[k].x);
    std::size_t leaving = kNone;
    for (std::size_t k : minus) {
      if (basis_[k].x != theta) continue;
      if (leaving == kNone || cell_id(k) < cell_id(leaving)) leaving = k;
    }
    for (std::size_t k : plus) basis_[k].x += theta;
    for (std::size_t k : minus) basis_[k].x = std::max(basis_[k].x - theta, 0.0);
    in_basis_[cell_id(leaving)] = 0;
    basis_[leaving] = {ei, ej, theta};
    in_basis_[entering] = 1;
  }

  std::size_t cell_id(std::size_t k) const { return basis_[k].i * n_ + basis_[k].j; }

  std::size_t m_;
  std::size_t n_;
  std::span<const double> cost_;
  double eps_;
  std::vector<Cell> basis_;
  std::vector<char> in_basis_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<double> u_;
  std::vector<double> v_;
};

std::vector<EdgeId> kruskal(const Graph& g, const std::vector<double>& keys) {
  std::vector<EdgeId> order(g.num_edges());
  std::iota(order.begin(), order.end(), EdgeId{0});
  std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
    return keys[a] != keys[b] ? keys[a] < keys[b] : a < b;
  });
  detail::DisjointSets sets(g.num_nodes());
  std::vector<EdgeId> chosen;
  for (EdgeId e : order) {
    if (sets.unite(g.edge(e).u, g.edge(e).v)) chosen.push_back(e);
  }
  if (sets.count() != 1) throw ValidationError("spanning tree requested for a disconnected graph");
  return chosen;
}

}  // namespace

CostMatrix support_cost_matrix(const Graph& g, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  mu.check_on(g);
  nu.check_on(g);
  CostMatrix c;
  for (const Atom& a : mu.atoms()) c.nodes.push_back(a.node);
  for (const Atom& a : nu.atoms()) c.nodes.push_back(a.node);
  std::sort(c.nodes.begin(), c.nodes.end());
  c.nodes.erase(std::unique(c.nodes.begin(), c.nodes.end()), c.nodes.end());
  const std::size_t k = c.nodes.size();
  c.values.assign(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::vector<double> d = shortest_path_lengths(g, c.nodes[i], c.nodes);
    for (std::size_t j = 0; j < k; ++j) {
      if (j == i) continue;
      if (!std::isfinite(d[c.nodes[j]])) throw ValidationError("supports lie in different components");
      // Fill symmetrically from the lower-id source so both halves agree bitwise.
      if (j > i) {
        c.values[i * k + j] = d[c.nodes[j]];
        c.values[j * k + i] = d[c.nodes[j]];
      }
    }
  }
  return c;
}

TransportResult solve_transportation(std::span<const double> supply, std::span<const double> demand,
                                     std::span<const double> cost) {
  if (supply.empty() || demand.empty()) throw NumericError("transportation problem is empty");
  if (cost.size() != supply.size() * demand.size()) {
    throw std::invalid_argument("cost matrix has the wrong shape");
  }
  CompensatedSum sa;
  CompensatedSum sb;
  for (double a : supply) {
    if (!(a >= 0.0)) throw NumericError("negative supply");
    sa += a;
  }
  for (double b : demand) {
    if (!(b >= 0.0)) throw NumericError("negative demand");
    sb += b;
  }
  if (std::fabs(sa.value() - sb.value()) > kMassBalanceTolerance) {
    throw NumericError("unbalanced transport: masses differ by " +
                       std::to_string(std::fabs(sa.value() - sb.value())));
  }
  return TransportationSimplex(supply, demand, cost).run();
}

double exact_w1(const Graph& g, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const CostMatrix c = support_cost_matrix(g, mu, nu);
  auto index_of = [&](NodeId v) {
    return static_cast<std::size_t>(std::lower_bound(c.nodes.begin(), c.nodes.end(), v) - c.nodes.begin());
  };
  std::vector<double> supply;
  std::vector<double> demand;
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  for (const Atom& a : mu.atoms()) {
    supply.push_back(a.mass);
    rows.push_back(index_of(a.node));
  }
  for (const Atom& b : nu.atoms()) {
    demand.push_back(b.mass);
    cols.push_back(index_of(b.node));
  }
  std::vector<double> cost(rows.size() * cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) cost[i * cols.size() + j] = c(rows[i], cols[j]);
  }
  return solve_transportation(supply, demand, cost).cost;
}

Graph minimum_spanning_tree(const Graph& g) {
  std::vector<double> keys;
  keys.reserve(g.num_edges());
  for (const Edge& e : g.edges()) keys.push_back(e.w);
  return edge_subgraph(g, kruskal(g, keys));
}

Graph random_spanning_tree(const Graph& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> keys(g.num_edges());
  for (double& k : keys) k = unit(rng);
  return edge_subgraph(g, kruskal(g, keys));
}

double tree_wasserstein(const RootIndex& tree_idx, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (!tree_idx.pruned_edges().empty() || tree_idx.num_edges() + 1 != tree_idx.num_nodes()) {
    throw std::invalid_argument("tree-Wasserstein needs an index built on a tree");
  }
  return sobolev_distance(tree_idx, mu, nu, 1.0);
}

}  // namespace sobograph
