#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sobograph/baselines.hpp"
#include "sobograph/detail/disjoint_sets.hpp"
#include "sobograph/error.hpp"
#include "sobograph/sobolev.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace sobograph;
using namespace sobograph::testing;

namespace {

double total_weight(const Graph& g) {
  double s = 0.0;
  for (const Edge& e : g.edges()) s += e.w;
  return s;
}

// Minimum over every (n-1)-subset of edges that forms a spanning tree.
double brute_force_mst_weight(const Graph& g) {
  const std::size_t n = g.num_nodes();
  const std::size_t m = g.num_edges();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != n - 1) continue;
    detail::DisjointSets ds(n);
    bool ok = true;
    double w = 0.0;
    for (EdgeId e = 0; e < m && ok; ++e) {
      if (!(mask >> e & 1u)) continue;
      ok = ds.unite(g.edge(e).u, g.edge(e).v);
      w += g.edge(e).w;
    }
    if (ok) best = std::min(best, w);
  }
  return best;
}

bool spanning_tree_of(const Graph& t, const Graph& g) {
  if (t.num_nodes() != g.num_nodes() || t.num_edges() + 1 != g.num_nodes() || !is_tree(t)) return false;
  for (const Edge& e : t.edges()) {
    if (!g.has_edge(e.u, e.v)) return false;
  }
  return true;
}

Graph small_random_graph(std::size_t n, std::size_t m, Rng& rng) {
  while (true) {
    std::vector<Edge> edges;
    for (NodeId i = 0; i < n && edges.size() < m; ++i) {
      for (NodeId j = i + 1; j < n && edges.size() < m; ++j) {
        if (uniform(rng, 0.0, 1.0) < 0.6) edges.push_back({i, j, std::round(uniform(rng, 1.0, 6.0))});
      }
    }
    Graph g(n, edges);
    if (is_connected(g)) return g;
  }
}

}  // namespace

TEST_CASE("exact_w1 simple cases") {
  const Graph g = path_graph();
  CHECK(exact_w1(g, DiscreteMeasure::dirac(1), DiscreteMeasure::dirac(2)) == 3.0);
  CHECK(exact_w1(g, DiscreteMeasure::dirac(0), DiscreteMeasure::dirac(2)) == 5.0);
  const DiscreteMeasure mu({{0, 0.25}, {2, 0.75}});
  CHECK(exact_w1(g, mu, mu) == 0.0);
  // Unit 4-cycle: from node 0 to nodes 1 and 2 halves.
  CHECK(exact_w1(cycle4(), DiscreteMeasure::dirac(0), DiscreteMeasure({{1, 0.5}, {2, 0.5}})) ==
        doctest::Approx(1.5));
}

TEST_CASE("transportation simplex matches vertex enumeration") {
  Rng rng(41);
  const Graph t = random_tree(5, rng);
  for (int trial = 0; trial < 40; ++trial) {
    const auto mu = random_measure(5, 3, rng);
    const auto nu = random_measure(5, 3, rng);
    std::vector<double> a, b, c;
    for (const Atom& x : mu.atoms()) a.push_back(x.mass);
    for (const Atom& y : nu.atoms()) b.push_back(y.mass);
    for (const Atom& x : mu.atoms()) {
      for (const Atom& y : nu.atoms()) c.push_back(shortest_path_distance(t, x.node, y.node));
    }
    const double want = brute_force_transport(a, b, c);
    CHECK(exact_w1(t, mu, nu) == doctest::Approx(want).epsilon(1e-12));
    const TransportResult r = solve_transportation(a, b, c);
    CHECK(r.cost == doctest::Approx(want).epsilon(1e-12));
    // Plan is feasible.
    std::vector<double> rows(a.size(), 0.0), cols(b.size(), 0.0);
    for (const auto& cell : r.plan) {
      CHECK(cell.flow > 0.0);
      rows[cell.source] += cell.flow;
      cols[cell.target] += cell.flow;
    }
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(rows[i] == doctest::Approx(a[i]).epsilon(1e-12));
    for (std::size_t j = 0; j < b.size(); ++j) CHECK(cols[j] == doctest::Approx(b[j]).epsilon(1e-12));
  }
}

TEST_CASE("transportation simplex on random dense instances") {
  Rng rng(42);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = 1 + uniform_index(rng, 4);
    const std::size_t n = 1 + uniform_index(rng, 4);
    std::vector<double> a(m), b(n), c(m * n);
    double sa = 0.0, sb = 0.0;
    for (double& x : a) sa += (x = uniform(rng, 0.1, 1.0));
    for (double& x : b) sb += (x = uniform(rng, 0.1, 1.0));
    for (double& x : a) x /= sa;
    for (double& x : b) x /= sb;
    // Integer costs give many ties and degenerate pivots.
    for (double& x : c) x = std::round(uniform(rng, 0.0, 4.0));
    CHECK(solve_transportation(a, b, c).cost == doctest::Approx(brute_force_transport(a, b, c)).epsilon(1e-12));
  }
  // Fully degenerate: identical marginals, Bland's rule keeps it finite.
  const std::vector<double> u{0.25, 0.25, 0.25, 0.25};
  std::vector<double> zero(16, 1.0);
  for (int i = 0; i < 4; ++i) zero[i * 4 + i] = 0.0;
  CHECK(solve_transportation(u, u, zero).cost == doctest::Approx(0.0));
}

TEST_CASE("transportation rejects unequal totals") {
  const std::vector<double> a{0.5, 0.5}, b{0.5, 0.6}, c{0, 1, 1, 0};
  CHECK_THROWS_AS(solve_transportation(a, b, c), NumericError);
  const std::vector<double> near{0.5, 0.5 + 1e-9};
  CHECK_NOTHROW(solve_transportation(a, near, c));
}

TEST_CASE("exact_w1 is a metric") {
  Rng rng(43);
  const Graph g = random_euclidean_graph(30, 30, rng);
  for (int k = 0; k < 60; ++k) {
    const auto x = random_measure_upto(30, 6, rng);
    const auto y = random_measure_upto(30, 6, rng);
    const auto z = random_measure_upto(30, 6, rng);
    const double xy = exact_w1(g, x, y);
    CHECK(xy == doctest::Approx(exact_w1(g, y, x)).epsilon(1e-12));
    CHECK(xy <= exact_w1(g, x, z) + exact_w1(g, z, y) + 1e-9);
    CHECK(xy >= 0.0);
  }
}

TEST_CASE("minimum spanning tree") {
  const Graph tri = triangle(1.0, 2.0, 3.0);
  const Graph mst = minimum_spanning_tree(tri);
  CHECK(mst.num_edges() == 2);
  CHECK(total_weight(mst) == 3.0);
  CHECK(mst.has_edge(0, 1));
  CHECK(mst.has_edge(1, 2));

  const Graph p = path_graph();
  CHECK(minimum_spanning_tree(p) == p);

  Rng rng(44);
  for (int trial = 0; trial < 30; ++trial) {
    const Graph g = small_random_graph(7, 14, rng);
    const Graph t = minimum_spanning_tree(g);
    CHECK(spanning_tree_of(t, g));
    CHECK(total_weight(t) == doctest::Approx(brute_force_mst_weight(g)).epsilon(1e-12));
  }
  const Graph big = random_euclidean_graph(30, 40, rng);
  CHECK(spanning_tree_of(minimum_spanning_tree(big), big));
  CHECK_THROWS_AS(minimum_spanning_tree(Graph(3, {{0, 1, 1.0}})), ValidationError);
}

TEST_CASE("random spanning tree") {
  const Graph c = cycle4();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph t = random_spanning_tree(c, seed);
    CHECK(spanning_tree_of(t, c));
  }
  Rng rng(45);
  const Graph tree = random_tree(20, rng);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Graph t = random_spanning_tree(tree, seed);
    CHECK(t.num_edges() == tree.num_edges());
    for (const Edge& e : tree.edges()) CHECK(t.has_edge(e.u, e.v));
  }
  const Graph g = random_euclidean_graph(40, 60, rng);
  CHECK(random_spanning_tree(g, 9) == random_spanning_tree(g, 9));
  // Different seeds should reach different trees at least sometimes.
  int distinct = 0;
  for (std::uint64_t s = 0; s < 10; ++s) distinct += !(random_spanning_tree(g, s) == random_spanning_tree(g, s + 100));
  CHECK(distinct > 0);
  CHECK_THROWS_AS(random_spanning_tree(Graph(3, {{0, 1, 1.0}}), 1), ValidationError);
}

TEST_CASE("tree Wasserstein agrees with exact W1 and S1 on trees") {
  Rng rng(46);
  int checked = 0;
  while (checked < 100) {
    const Graph g = random_euclidean_graph(30, 25, rng);
    const Graph t = random_spanning_tree(g, rng());
    const RootIndex idx = build_root_index(t, static_cast<NodeId>(uniform_index(rng, 30)));
    for (int k = 0; k < 10; ++k, ++checked) {
      const auto mu = random_measure_upto(30, 8, rng);
      const auto nu = random_measure_upto(30, 8, rng);
      const double tw = tree_wasserstein(idx, mu, nu);
      const double w1 = exact_w1(t, mu, nu);
      CHECK(std::fabs(tw - w1) <= 1e-9 * std::max(1.0, w1));
      CHECK(tw == sobolev_distance(idx, mu, nu, 1.0));
    }
  }
  CHECK(tree_wasserstein(build_root_index(path_graph(), 0), DiscreteMeasure::dirac(1), DiscreteMeasure::dirac(2)) ==
        3.0);
  const Graph pet = petersen();
  CHECK_THROWS_AS(tree_wasserstein(build_root_index(pet, 0), DiscreteMeasure::dirac(1), DiscreteMeasure::dirac(2)),
                  std::invalid_argument);
}

TEST_CASE("W1 lower bound on trees") {
  Rng rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph t = random_tree(25, rng);
    const RootIndex idx = build_root_index(t, 0);
    for (double p : {1.5, 2.0}) {
      const double c = w1_bound_factor(t, p);
      for (int k = 0; k < 5; ++k) {
        const auto mu = random_measure_upto(25, 10, rng);
        const auto nu = random_measure_upto(25, 10, rng);
        CHECK(c * sobolev_distance(idx, mu, nu, p) - exact_w1(t, mu, nu) >= -1e-9);
      }
    }
  }
}
