#pragma once

#include <span>
#include <vector>

#include "sobograph/graph.hpp"
#include "sobograph/measure.hpp"
#include "sobograph/root_index.hpp"

namespace sobograph {

/// Sparse feature vector w_e^{1/p} * mu(gamma_e), ascending edge id.
struct FeatureVector {
  std::vector<EdgeMass> entries;
  double p = 1.0;
};

/// |x|^p: exact for p in {1, 2}, exp(p ln|x|) otherwise, 0 at x = 0.
double abs_pow(double x, double p) noexcept;
/// s^{1/p} for s >= 0, exact for p in {1, 2}.
double root_p(double s, double p) noexcept;

/// Throws NumericError unless p is finite and >= 1.
void check_order(double p);

/// Sum over the union of supports of |x_e - y_e|^p, ascending edge id,
/// compensated. Missing entries count as zero.
double lp_pow_distance(std::span<const EdgeMass> x, std::span<const EdgeMass> y, double p);
/// (lp_pow_distance)^{1/p}.
double lp_distance(const FeatureVector& x, const FeatureVector& y);

FeatureVector feature_embed(const RootIndex& idx, const DiscreteMeasure& mu, double p);
FeatureVector feature_embed(const RootIndex& idx, const EdgeMassProfile& profile, double p);

/// Sobolev transport S_p(mu, nu) for vertex-supported measures with the
/// length measure, summed only over edges on some support's root path.
double sobolev_distance(const RootIndex& idx, const DiscreteMeasure& mu,
                        const DiscreteMeasure& nu, double p);
/// S_p(mu, nu)^p.
double sobolev_distance_pow(const RootIndex& idx, const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu, double p);

/// Reference evaluation summing w_e |mu(gamma_e) - nu(gamma_e)|^p over every
/// edge of the graph, with gamma_e enumerated per edge. O(|E| * |V|) worst
/// case; meant for verification.
double sobolev_distance_full(const RootIndex& idx, const DiscreteMeasure& mu,
                             const DiscreteMeasure& nu, double p);

/// Root weights of a sliced distance (the slicing distribution over roots).
struct SliceSpec {
  std::vector<NodeId> roots;
  std::vector<double> weights;

  /// Uniform weights over `roots`.
  static SliceSpec uniform(std::vector<NodeId> roots);
  /// Throws NumericError unless the weights are nonnegative, sized like
  /// `roots` and sum to 1 within 1e-12.
  void validate() const;
};

double sliced_sobolev(std::span<const RootIndex> indexes, const SliceSpec& spec,
                      const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

/// Inverse of `edge_mass_profile`: rho(root) = 1 - sum of root-edge values,
/// rho(v) = alpha(parent edge of v) - sum of alpha over v's child edges.
/// Throws KNotSatisfied when a reconstructed mass is below -tol or a value is
/// given on a pruned edge. Masses in [-tol, 0) are clamped to zero.
DiscreteMeasure reconstruct_measure(const RootIndex& idx, const EdgeMassProfile& alpha,
                                    double tol = 1e-12);

/// lambda*(G)^{1/q' - 1/p'} (= lambda*^{1/p - 1/q}); S_p <= factor * S_q.
double upper_bound_factor(const Graph& g, double p, double q);

/// lambda*(G)^{1/p'} (= lambda*^{1 - 1/p}); W_1 <= factor * S_p on trees.
double w1_bound_factor(const Graph& g, double p);

}  // namespace sobograph
