#include "sobograph/builder.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "sobograph/detail/disjoint_sets.hpp"
#include "sobograph/error.hpp"
#include "sobograph/graph_io.hpp"

namespace sobograph {
namespace {

std::uint64_t pair_key(std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

// Groups of identical points, as a representative index per point.
std::vector<std::size_t> duplicate_representatives(const PointCloud& pc) {
  std::vector<std::size_t> order(pc.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) {
    const auto pa = pc[a];
    const auto pb = pc[b];
    if (std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end())) return true;
    if (std::equal(pa.begin(), pa.end(), pb.begin())) return a < b;
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  std::vector<std::size_t> rep(pc.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t i = order[k];
    if (k > 0 && std::equal(pc[i].begin(), pc[i].end(), pc[order[k - 1]].begin())) {
      rep[i] = rep[order[k - 1]];
    } else {
      rep[i] = i;
    }
  }
  return rep;
}

}  // namespace

PointCloud::PointCloud(const std::vector<std::vector<double>>& points) {
  for (const auto& p : points) push_back(p);
}

PointCloud::PointCloud(std::size_t dim, std::vector<double> flat) : dim_(dim), data_(std::move(flat)) {
  if (dim_ == 0 || data_.size() % dim_ != 0) throw ValidationError("flat point buffer has the wrong size");
  for (double x : data_) {
    if (!std::isfinite(x)) throw ValidationError("point coordinates must be finite");
  }
}

void PointCloud::push_back(std::span<const double> p) {
  if (p.empty()) throw ValidationError("points need at least one coordinate");
  if (dim_ == 0) dim_ = p.size();
  if (p.size() != dim_) throw ValidationError("points must all have the same dimension");
  for (double x : p) {
    if (!std::isfinite(x)) throw ValidationError("point coordinates must be finite");
  }
  data_.insert(data_.end(), p.begin(), p.end());
}

std::vector<std::vector<double>> PointCloud::rows() const {
  std::vector<std::vector<double>> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.emplace_back((*this)[i].begin(), (*this)[i].end());
  return out;
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) noexcept {
  return std::sqrt(squared_distance(a, b));
}

Clustering farthest_point_clustering_from(const PointCloud& points, std::size_t max_clusters,
                                          std::size_t first) {
  if (points.empty()) throw ValidationError("cannot cluster an empty point cloud");
  if (max_clusters == 0) throw ValidationError("cluster budget must be positive");
  if (first >= points.size()) throw std::out_of_range("first centre index out of range");
  const std::size_t n = points.size();

  Clustering c;
  const auto rep = duplicate_representatives(points);
  for (std::size_t i = 0; i < n; ++i) c.coincident_points += rep[i] != i;

  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  c.assignment.assign(n, 0);
  std::size_t next = first;
  while (true) {
    const std::size_t k = c.centroid_points.size();
    c.centroid_points.push_back(next);
    c.centroids.push_back(points[next]);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = squared_distance(points[i], points[next]);
      if (d < nearest[i]) {
        nearest[i] = d;
        c.assignment[i] = k;
      }
    }
    if (c.centroid_points.size() >= max_clusters) break;
    const auto far = std::max_element(nearest.begin(), nearest.end());
    if (*far == 0.0) break;
    next = static_cast<std::size_t>(far - nearest.begin());
  }
  return c;
}

Clustering farthest_point_clustering(const PointCloud& points, std::size_t max_clusters,
                                     std::uint64_t seed) {
  if (points.empty()) throw ValidationError("cannot cluster an empty point cloud");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
  return farthest_point_clustering_from(points, max_clusters, pick(rng));
}

std::size_t nearest_centroid(const PointCloud& centroids, std::span<const double> point) {
  if (centroids.empty()) throw ValidationError("no centroids");
  if (point.size() != centroids.dim()) throw ValidationError("point dimension mismatch");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < centroids.size(); ++k) {
    const double d = squared_distance(centroids[k], point);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

std::size_t edge_budget(std::size_t n, EdgeRule rule) {
  const double m = static_cast<double>(n);
  const double raw = rule == EdgeRule::kLog ? m * std::log(m) : m * std::sqrt(m);
  return static_cast<std::size_t>(std::ceil(raw));
}

Graph build_random_graph(const PointCloud& centroids, const BuildSpec& spec, RandomGraphStats* stats) {
  const std::size_t n = centroids.size();
  if (n < 2) throw ValidationError("a random graph needs at least two centroids");
  if (n > 0xffffffffu) throw ValidationError("too many centroids");
  std::mt19937_64 rng(spec.seed);

  const auto rep = duplicate_representatives(centroids);
  std::vector<std::size_t> group_size(n, 0);
  for (std::size_t i = 0; i < n; ++i) ++group_size[rep[i]];
  std::size_t coincident_pairs = 0;
  for (std::size_t s : group_size) coincident_pairs += s * (s - (s > 0 ? 1 : 0)) / 2;
  auto coincident = [&](std::size_t a, std::size_t b) { return rep[a] == rep[b]; };

  const std::size_t all_pairs = n * (n - 1) / 2;
  const std::size_t valid_pairs = all_pairs - coincident_pairs;
  const std::size_t target = std::min(edge_budget(n, spec.edge_rule), valid_pairs);

  std::vector<std::pair<std::size_t, std::size_t>> chosen;
  chosen.reserve(target + n);
  if (2 * target >= valid_pairs) {
    std::vector<std::pair<std::size_t, std::size_t>> pool;
    pool.reserve(valid_pairs);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!coincident(a, b)) pool.emplace_back(a, b);
      }
    }
    for (std::size_t k = 0; k < target; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
      std::swap(pool[k], pool[pick(rng)]);
    }
    chosen.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(target));
  } else {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(target * 2);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    while (chosen.size() < target) {
      const std::size_t a = pick(rng);
      const std::size_t b = pick(rng);
      if (a == b || coincident(a, b)) continue;
      if (seen.insert(pair_key(a, b)).second) chosen.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(chosen.begin(), chosen.end());

  detail::DisjointSets sets(n);
  for (const auto& [a, b] : chosen) sets.unite(a, b);
  RandomGraphStats local;
  local.sampled_edges = chosen.size();
  local.components = sets.count();

  // Components listed by smallest member, then visited in a random order.
  std::vector<std::vector<std::size_t>> components;
  {
    std::vector<std::size_t> slot(n, static_cast<std::size_t>(-1));
    for (std::size_t v = 0; v < n; ++v) {
      const std::size_t r = sets.find(v);
      if (slot[r] == static_cast<std::size_t>(-1)) {
        slot[r] = components.size();
        components.emplace_back();
      }
      components[slot[r]].push_back(v);
    }
  }
  std::shuffle(components.begin(), components.end(), rng);
  for (std::size_t k = 1; k < components.size(); ++k) {
    const auto& left = components[k - 1];
    const auto& right = components[k];
    std::uniform_int_distribution<std::size_t> pl(0, left.size() - 1);
    std::uniform_int_distribution<std::size_t> pr(0, right.size() - 1);
    std::size_t a = left[pl(rng)];
    std::size_t b = right[pr(rng)];
    for (int attempt = 0; coincident(a, b) && attempt < 64; ++attempt) {
      a = left[pl(rng)];
      b = right[pr(rng)];
    }
    if (coincident(a, b)) {
      bool found = false;
      for (std::size_t x : left) {
        for (std::size_t y : right) {
          if (!coincident(x, y)) {
            a = x;
            b = y;
            found = true;
            break;
          }
        }
        if (found) break;
      }
      if (!found) throw ValidationError("cannot link components made of coincident points");
    }
    chosen.emplace_back(std::min(a, b), std::max(a, b));
    ++local.stitch_edges;
  }

  std::vector<Edge> edges;
  edges.reserve(chosen.size());
  for (const auto& [a, b] : chosen) {
    edges.push_back({static_cast<NodeId>(a), static_cast<NodeId>(b),
                     euclidean_distance(centroids[a], centroids[b])});
  }
  if (stats) *stats = local;
  return Graph(n, std::move(edges), {}, centroids.rows());
}

GraphBuild build_graph_metric(const PointCloud& points, const BuildSpec& spec) {
  if (spec.max_clusters < 2) throw ValidationError("cluster budget M must be at least 2");
  GraphBuild out;
  out.clustering = farthest_point_clustering(points, spec.max_clusters, spec.seed);
  out.graph = build_random_graph(out.clustering.centroids, spec, &out.stats);
  return out;
}

DiscreteMeasure project_measure(std::span<const std::size_t> assignment,
                                std::span<const WeightedPoint> raw) {
  std::vector<Atom> atoms;
  atoms.reserve(raw.size());
  for (const WeightedPoint& p : raw) {
    if (p.point >= assignment.size()) {
      throw std::out_of_range("point " + std::to_string(p.point) + " has no cluster assignment");
    }
    atoms.push_back({static_cast<NodeId>(assignment[p.point]), p.mass});
  }
  return DiscreteMeasure(std::move(atoms), /*normalize=*/true);
}

DiscreteMeasure project_raw_measure(const PointCloud& centroids,
                                    std::span<const std::vector<double>> points,
                                    std::span<const double> masses) {
  if (points.size() != masses.size()) throw std::invalid_argument("points and masses differ in length");
  std::vector<Atom> atoms;
  atoms.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    atoms.push_back({static_cast<NodeId>(nearest_centroid(centroids, points[i])), masses[i]});
  }
  return DiscreteMeasure(std::move(atoms), /*normalize=*/true);
}

std::vector<std::vector<double>> parse_numeric_rows(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r' ||
                                   line[pos] == ',')) {
        ++pos;
      }
      if (pos >= line.size()) break;
      if (line[pos] == '#') break;
      double x = 0.0;
      auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + line.size(), x);
      if (ec != std::errc()) throw ParseError("cannot parse number", line_no);
      pos = static_cast<std::size_t>(ptr - line.data());
      row.push_back(x);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

PointCloud load_points(const std::filesystem::path& path) {
  try {
    return PointCloud(parse_numeric_rows(read_text_file(path)));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace sobograph
