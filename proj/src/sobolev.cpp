#include "sobograph/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sobograph/error.hpp"
#include "sobograph/summation.hpp"

namespace sobograph {
namespace {

double edge_scale(double w, double p) noexcept {
  if (p == 1.0) return w;
  if (p == 2.0) return std::sqrt(w);
  return std::pow(w, 1.0 / p);
}

void check_measures(const RootIndex& idx, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  for (const DiscreteMeasure* m : {&mu, &nu}) {
    for (const Atom& a : m->atoms()) {
      if (a.node >= idx.num_nodes()) {
        throw std::out_of_range("measure support " + std::to_string(a.node) +
                                " is not a node of the indexed graph");
      }
    }
  }
}

// mu(gamma_e) for every edge (zero off the tree) by one bottom-up pass.
std::vector<double> dense_edge_mass(const RootIndex& idx, const DiscreteMeasure& mu) {
  std::vector<double> below(idx.num_nodes(), 0.0);
  for (const Atom& a : mu.atoms()) below[a.node] += a.mass;
  std::vector<double> out(idx.num_edges(), 0.0);
  const auto order = idx.order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId v = *it;
    if (v == idx.root()) continue;
    out[idx.parent_edge(v)] = below[v];
    below[idx.parent_node(v)] += below[v];
  }
  return out;
}

}  // namespace

double abs_pow(double x, double p) noexcept {
  const double a = std::fabs(x);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  if (a == 0.0) return 0.0;
  return std::exp(p * std::log(a));
}

double root_p(double s, double p) noexcept {
  if (p == 1.0) return s;
  if (p == 2.0) return std::sqrt(s);
  if (s == 0.0) return 0.0;
  return std::pow(s, 1.0 / p);
}

void check_order(double p) {
  if (std::isinf(p)) {
    throw NumericError("p = infinity is not supported; use a finite p >= 1");
  }
  if (!(p >= 1.0)) throw NumericError("order p must be >= 1, got " + std::to_string(p));
}

double lp_pow_distance(std::span<const EdgeMass> x, std::span<const EdgeMass> y, double p) {
  CompensatedSum s;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < x.size() || j < y.size()) {
    if (j == y.size() || (i < x.size() && x[i].edge < y[j].edge)) {
      s += abs_pow(x[i++].value, p);
    } else if (i == x.size() || y[j].edge < x[i].edge) {
      s += abs_pow(y[j++].value, p);
    } else {
      s += abs_pow(x[i++].value - y[j++].value, p);
    }
  }
  return s.value();
}

double lp_distance(const FeatureVector& x, const FeatureVector& y) {
  if (x.p != y.p) throw std::invalid_argument("feature vectors were embedded with different p");
  return root_p(lp_pow_distance(x.entries, y.entries, x.p), x.p);
}

FeatureVector feature_embed(const RootIndex& idx, const EdgeMassProfile& profile, double p) {
  check_order(p);
  FeatureVector f;
  f.p = p;
  f.entries.reserve(profile.entries.size());
  for (const EdgeMass& m : profile.entries) {
    f.entries.push_back({m.edge, edge_scale(idx.edge_weight(m.edge), p) * m.value});
  }
  return f;
}

FeatureVector feature_embed(const RootIndex& idx, const DiscreteMeasure& mu, double p) {
  return feature_embed(idx, edge_mass_profile(idx, mu), p);
}

double sobolev_distance_pow(const RootIndex& idx, const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu, double p) {
  check_order(p);
  check_measures(idx, mu, nu);
  const FeatureVector a = feature_embed(idx, mu, p);
  const FeatureVector b = feature_embed(idx, nu, p);
  return lp_pow_distance(a.entries, b.entries, p);
}

double sobolev_distance(const RootIndex& idx, const DiscreteMeasure& mu,
                        const DiscreteMeasure& nu, double p) {
  return root_p(sobolev_distance_pow(idx, mu, nu, p), p);
}

double sobolev_distance_full(const RootIndex& idx, const DiscreteMeasure& mu,
                             const DiscreteMeasure& nu, double p) {
  check_order(p);
  check_measures(idx, mu, nu);
  const std::vector<double> a = dense_edge_mass(idx, mu);
  const std::vector<double> b = dense_edge_mass(idx, nu);
  CompensatedSum s;
  for (EdgeId e = 0; e < idx.num_edges(); ++e) {
    s += idx.edge_weight(e) * abs_pow(a[e] - b[e], p);
  }
  return root_p(s.value(), p);
}

SliceSpec SliceSpec::uniform(std::vector<NodeId> roots) {
  SliceSpec spec;
  spec.weights.assign(roots.size(), roots.empty() ? 0.0 : 1.0 / static_cast<double>(roots.size()));
  spec.roots = std::move(roots);
  return spec;
}

void SliceSpec::validate() const {
  if (roots.empty()) throw NumericError("slice needs at least one root");
  if (weights.size() != roots.size()) throw NumericError("slice weights do not match roots");
  CompensatedSum s;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw NumericError("slice weights must be nonnegative");
    s += w;
  }
  if (std::fabs(s.value() - 1.0) > 1e-12) throw NumericError("slice weights must sum to 1");
}

double sliced_sobolev(std::span<const RootIndex> indexes, const SliceSpec& spec,
                      const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  spec.validate();
  if (indexes.size() != spec.roots.size()) {
    throw std::invalid_argument("one root index is required per slice root");
  }
  CompensatedSum s;
  for (std::size_t k = 0; k < indexes.size(); ++k) {
    if (indexes[k].root() != spec.roots[k]) {
      throw std::invalid_argument("root index " + std::to_string(k) + " does not match slice root");
    }
    if (spec.weights[k] == 0.0) continue;
    s += spec.weights[k] * sobolev_distance(indexes[k], mu, nu, p);
  }
  return s.value();
}

DiscreteMeasure reconstruct_measure(const RootIndex& idx, const EdgeMassProfile& alpha, double tol) {
  const std::size_t n = idx.num_nodes();
  std::vector<double> own(n, 0.0);       // alpha of the parent edge
  std::vector<double> child_sum(n, 0.0);
  std::vector<NodeId> touched;
  for (const EdgeMass& m : alpha.entries) {
    if (m.edge >= idx.num_edges()) throw std::out_of_range("profile edge id out of range");
    if (!idx.is_tree_edge(m.edge)) {
      if (m.value == 0.0) continue;
      throw KNotSatisfied("profile assigns mass to pruned edge " + std::to_string(m.edge));
    }
    if (m.value < -tol) throw KNotSatisfied("negative profile value on edge " + std::to_string(m.edge));
    const NodeId v = idx.edge_child(m.edge);
    own[v] = m.value;
    child_sum[idx.parent_node(v)] += m.value;
    touched.push_back(v);
    touched.push_back(idx.parent_node(v));
  }
  touched.push_back(idx.root());
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

  std::vector<Atom> atoms;
  for (NodeId v : touched) {
    const double base = v == idx.root() ? 1.0 : own[v];
    const double mass = base - child_sum[v];
    if (mass < -tol) {
      throw KNotSatisfied("reconstructed mass " + std::to_string(mass) + " at node " +
                          std::to_string(v) + " is negative");
    }
    if (mass > 0.0) atoms.push_back({v, mass});
  }
  return DiscreteMeasure(std::move(atoms));
}

double upper_bound_factor(const Graph& g, double p, double q) {
  check_order(p);
  check_order(q);
  if (!(p < q)) throw NumericError("upper bound needs p < q");
  return std::pow(length_measure_total(g), 1.0 / p - 1.0 / q);
}

double w1_bound_factor(const Graph& g, double p) {
  check_order(p);
  return std::pow(length_measure_total(g), 1.0 - 1.0 / p);
}

}  // namespace sobograph
