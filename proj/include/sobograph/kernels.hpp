#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sobograph/measure.hpp"
#include "sobograph/root_index.hpp"
#include "sobograph/sobolev.hpp"

namespace sobograph {

enum class KernelFamily {
  kSp,     // exp(-t S_p)
  kSpPowP  // exp(-t S_p^p)
};

struct KernelSpec {
  KernelFamily family = KernelFamily::kSp;
  double p = 1.0;
  double t = 1.0;

  /// NumericError unless 1 <= p <= 2 and t > 0 (finite).
  void validate() const;
};

inline constexpr double kGramFloor = 1e-300;

/// Dense symmetric n x n matrix, row-major.
struct GramMatrix {
  std::size_t n = 0;
  std::vector<double> values;
  std::vector<std::string> labels;

  double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values[i * n + j]; }
};

/// Kernel value for a given distance (entries below kGramFloor are clamped).
double kernel_value(const KernelSpec& spec, double sobolev_distance);

/// Gram matrix of `measures`. Each measure is embedded once; the upper
/// triangle is filled row-block-parallel over `threads` workers and mirrored.
/// The result does not depend on `threads`.
GramMatrix gram_matrix(const RootIndex& idx, std::span<const DiscreteMeasure> measures,
                       const KernelSpec& spec, unsigned threads = 1);

/// Same from precomputed embeddings (all with p == spec.p).
GramMatrix gram_matrix(std::span<const FeatureVector> features, const KernelSpec& spec,
                       unsigned threads = 1);

/// Pairwise S_p distances of `measures` (upper triangle mirrored, zero diagonal).
GramMatrix distance_matrix(const RootIndex& idx, std::span<const DiscreteMeasure> measures,
                           double p, unsigned threads = 1);

/// 1/t candidates {q_s, 2 q_s, 5 q_s}, s = 10..90, q_s the lower nearest-rank
/// s% quantile; zero quantiles are skipped. Returns t values, deduplicated and
/// descending. NumericError if the sample is empty, negative, or all zero.
std::vector<double> bandwidth_candidates(std::span<const double> distances);

/// Lower nearest-rank quantile: the ceil(s n / 100)-th smallest value.
double nearest_rank_quantile(std::vector<double> sample, int percent);

/// Smallest eigenvalue (symmetric eigensolver). NumericError if the matrix is
/// asymmetric beyond 1e-12.
double min_eigenvalue(const GramMatrix& m);
/// Spectral norm of a symmetric matrix (largest |eigenvalue|).
double spectral_norm(const GramMatrix& m);

/// Adds `shift` to the diagonal.
void shift_diagonal(GramMatrix& m, double shift);

// Export. CSV: header row of labels then n rows of values (17 significant
// digits). Binary: "SGRM", u32 n (little endian), n*n f64 row-major LE.
std::string gram_to_csv(const GramMatrix& m);
std::string gram_to_binary(const GramMatrix& m);
GramMatrix gram_from_binary(std::string_view bytes);
void save_gram(const GramMatrix& m, const std::filesystem::path& path, bool binary);

}  // namespace sobograph
