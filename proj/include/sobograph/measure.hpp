#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sobograph/graph.hpp"
#include "sobograph/types.hpp"

namespace sobograph {

inline constexpr double kMassTolerance = 1e-9;

struct Atom {
  NodeId node;
  double mass;
  bool operator==(const Atom&) const = default;
};

/// Probability measure on the nodes of a graph, stored as atoms sorted by
/// node id. Zero-mass atoms are dropped, duplicates are merged.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  /// Throws NumericError on negative/non-finite masses or when the total is
  /// not 1 within `kMassTolerance` (unless `normalize`, which rescales).
  explicit DiscreteMeasure(std::vector<Atom> atoms, bool normalize = false);

  static DiscreteMeasure dirac(NodeId v) { return DiscreteMeasure({{v, 1.0}}); }

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::size_t support_size() const noexcept { return atoms_.size(); }
  /// Mass at `v` (0 when absent).
  double mass(NodeId v) const noexcept;
  double total() const noexcept;

  /// Throws `std::out_of_range` if some support is not a node of `g`.
  void check_on(const Graph& g) const;

  bool operator==(const DiscreteMeasure&) const = default;

 private:
  std::vector<Atom> atoms_;
};

/// Total variation distance, 0.5 * sum |mu(v) - nu(v)|.
double total_variation(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// Measure files are TSV: `node_label<TAB>mass` per line, `#` starts a comment.
DiscreteMeasure parse_measure_tsv(std::string_view text, const Graph& g, bool normalize = false);
DiscreteMeasure load_measure(const std::filesystem::path& path, const Graph& g,
                             bool normalize = false);
std::string measure_to_tsv(const DiscreteMeasure& mu, const Graph& g);

struct MeasureSet {
  std::vector<std::string> names;  // file stems, lexicographic
  std::vector<DiscreteMeasure> measures;
};

/// Loads every regular file in `dir`; lexicographic file-name order defines
/// measure indices.
MeasureSet load_measure_dir(const std::filesystem::path& dir, const Graph& g,
                            bool normalize = false);

}  // namespace sobograph
