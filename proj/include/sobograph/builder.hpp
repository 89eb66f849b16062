#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "sobograph/graph.hpp"
#include "sobograph/measure.hpp"

namespace sobograph {

/// Points of uniform dimension, stored row-major.
class PointCloud {
 public:
  PointCloud() = default;
  /// Throws ValidationError on ragged, empty-dimensional or non-finite input.
  explicit PointCloud(const std::vector<std::vector<double>>& points);
  PointCloud(std::size_t dim, std::vector<double> flat);

  std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return data_.empty(); }
  std::span<const double> operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::vector<std::vector<double>> rows() const;
  void push_back(std::span<const double> p);

  bool operator==(const PointCloud&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;
double euclidean_distance(std::span<const double> a, std::span<const double> b) noexcept;

struct Clustering {
  PointCloud centroids;
  std::vector<std::size_t> assignment;  // point -> centroid index
  std::vector<std::size_t> centroid_points;  // centroid -> index of the source point
  std::size_t coincident_points = 0;  // points sharing coordinates with an earlier point
};

/// Gonzalez farthest-point k-center. The first centre is a uniformly random
/// point drawn from `seed`; each next centre is the point farthest from the
/// chosen set (lowest index on ties). Stops after `max_clusters` centres or
/// when every point coincides with a centre. Points go to their nearest
/// centre, lowest centre index on ties.
Clustering farthest_point_clustering(const PointCloud& points, std::size_t max_clusters,
                                     std::uint64_t seed);
/// Same with an explicit first centre.
Clustering farthest_point_clustering_from(const PointCloud& points, std::size_t max_clusters,
                                          std::size_t first);

/// Index of the nearest centroid, lowest index on ties.
std::size_t nearest_centroid(const PointCloud& centroids, std::span<const double> point);

enum class EdgeRule {
  kLog,   // ceil(M ln M) random edges
  kSqrt,  // ceil(M^{3/2}) random edges
};

struct BuildSpec {
  std::size_t max_clusters = 2;  // cluster budget M, >= 2
  EdgeRule edge_rule = EdgeRule::kLog;
  std::uint64_t seed = 0;
};

/// ceil(n ln n) or ceil(n^{3/2}) for n nodes.
std::size_t edge_budget(std::size_t n, EdgeRule rule);

struct RandomGraphStats {
  std::size_t sampled_edges = 0;
  std::size_t components = 0;  // before stitching
  std::size_t stitch_edges = 0;
};

/// Samples min(budget, #pairs) distinct node pairs uniformly without
/// replacement (coincident pairs excluded), weights them by Euclidean
/// distance, then links the resulting components in a random order with one
/// random edge between consecutive components. Deterministic per seed.
Graph build_random_graph(const PointCloud& centroids, const BuildSpec& spec,
                         RandomGraphStats* stats = nullptr);

/// Full pipeline: cluster, then build the graph on the centroids.
struct GraphBuild {
  Clustering clustering;
  Graph graph;
  RandomGraphStats stats;
};
GraphBuild build_graph_metric(const PointCloud& points, const BuildSpec& spec);

struct WeightedPoint {
  std::size_t point;  // index into the clustered cloud
  double mass;
};

/// Sums masses per centroid and normalizes to a probability measure on the
/// graph built over the centroids (node id == centroid index).
DiscreteMeasure project_measure(std::span<const std::size_t> assignment,
                                std::span<const WeightedPoint> raw);

/// Projection for points that are not part of the clustered cloud: each goes
/// to its nearest centroid.
DiscreteMeasure project_raw_measure(const PointCloud& centroids,
                                    std::span<const std::vector<double>> points,
                                    std::span<const double> masses);

/// Whitespace-separated numeric rows; `#` comments and blank lines skipped.
std::vector<std::vector<double>> parse_numeric_rows(std::string_view text);
PointCloud load_points(const std::filesystem::path& path);

}  // namespace sobograph
