#include "sobograph/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "sobograph/baselines.hpp"
#include "sobograph/builder.hpp"
#include "sobograph/error.hpp"
#include "sobograph/graph_io.hpp"
#include "sobograph/kernels.hpp"
#include "sobograph/measure.hpp"
#include "sobograph/root_index.hpp"
#include "sobograph/sobolev.hpp"
#include "sobograph/summation.hpp"

namespace sobograph::cli {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SOBOGRAPH_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ParseError(std::string("SOBOGRAPH_SEED is not an unsigned integer: ") + env);
    }
  }
  return 0;
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string format_general(double v) {
  // shortest string that round-trips
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct Options {
  std::string graph;
  std::string root = "auto";
  std::string index_file;
  double tol = -1.0;
  double p = 1.0;
  bool normalize = false;
  bool jitter = false;
  std::string ties = "strict";
  std::uint64_t seed = 0;
  unsigned threads = 1;

  // validate / build-graph / gram / bench specifics
  std::string out;
  std::string mu;
  std::string nu;
  std::string method = "sobolev";
  std::string tree = "random";
  bool all_roots = false;
  std::string points;
  std::size_t clusters = 0;
  std::string edges = "log";
  std::string raw_measures;
  std::string measures_out;
  std::string measures;
  std::string family = "sp";
  double t = -1.0;
  std::string format;
  double diag_shift = 0.0;
  bool print_bandwidths = false;
  std::vector<std::string> roots;
  std::vector<double> weights;
  std::size_t num_roots = 0;
  std::size_t w1_pairs = 0;
};

// Graph plus the root index used by a command. Jitter may replace the graph.
struct Prepared {
  Graph graph;
  RootIndex index;
  bool jittered = false;
  double tol = -1.0;
  double build_seconds = 0.0;
};

RootIndexOptions index_options(const Options& o, double tol) {
  RootIndexOptions opts;
  opts.tol = tol;
  if (o.ties == "lexicographic") {
    opts.ties = TiePolicy::kLexicographic;
  } else if (o.ties != "strict") {
    throw ParseError("--break-ties must be strict or lexicographic");
  }
  return opts;
}

constexpr double kJitter = 1e-9;

// The default tie tolerance is as wide as the jitter, so perturbed graphs are
// compared at 1e-12 relative unless --tol was given.
double jittered_tol(const Options& o, const Graph& g) {
  return o.tol >= 0.0 ? o.tol : 1e-12 * g.max_weight();
}

Graph jitter(const Options& o, const Graph& g, std::ostream& err) {
  err << "notice: no unique-path root; jittering weights by " << kJitter << " (seed " << o.seed << ")\n";
  return jitter_weights(g, kJitter, o.seed);
}

NodeId resolve_root(const Options& o, Graph& g, bool& jittered, double& tol, std::ostream& err) {
  tol = o.tol;
  if (o.root != "auto") {
    auto v = g.find(o.root);
    if (!v) throw ParseError("unknown root label '" + o.root + "'");
    return *v;
  }
  try {
    return select_central_root(g, o.tol, o.threads);
  } catch (const EmptyRootSetError&) {
    if (!o.jitter) throw;
    g = jitter(o, g, err);
    jittered = true;
    tol = jittered_tol(o, g);
    return select_central_root(g, tol, o.threads);
  }
}

Prepared prepare(const Options& o, std::ostream& err) {
  Prepared p;
  p.graph = load_graph(o.graph);
  const auto t0 = Clock::now();
  if (!o.index_file.empty()) {
    p.index = load_root_index(o.index_file, p.graph);
  } else {
    const NodeId root = resolve_root(o, p.graph, p.jittered, p.tol, err);
    try {
      p.index = build_root_index(p.graph, root, index_options(o, p.tol));
    } catch (const AmbiguousPathError& e) {
      err << "offending node: " << p.graph.label(e.node()) << " (root " << p.graph.label(root) << ")\n";
      throw;
    }
  }
  p.build_seconds = seconds_since(t0);
  return p;
}

void add_graph_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--graph", o.graph, "graph JSON file")->required();
  cmd->add_option("--tol", o.tol, "tie / short-cut tolerance (default 1e-9 * max weight)");
}

void add_root_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--root", o.root, "root node label, or 'auto' for the most central unique-path root");
  cmd->add_option("--index", o.index_file, "persisted root index to load instead of building one");
  cmd->add_option("--break-ties", o.ties, "strict (default) or lexicographic");
  cmd->add_flag("--jitter", o.jitter, "perturb weights when no unique-path root exists");
}

int cmd_validate(const Options& o, std::ostream& out) {
  const Graph g = load_graph(o.graph);
  const ValidationReport r = validate_graph(g, o.tol);
  out << "nodes\t" << g.num_nodes() << "\n";
  out << "edges\t" << g.num_edges() << "\n";
  out << "connected\t" << (r.connected ? "true" : "false") << "\n";
  out << "positive_weights\t" << (r.positive_weights ? "true" : "false") << "\n";
  out << "short_cuts\t";
  if (r.offending_edges.empty()) out << "none";
  for (std::size_t k = 0; k < r.offending_edges.size(); ++k) {
    const Edge& e = g.edge(r.offending_edges[k]);
    out << (k ? "," : "") << g.label(e.u) << "-" << g.label(e.v);
  }
  out << "\n";
  out << "length_total\t" << format_general(length_measure_total(g)) << "\n";
  if (!r.connected) {
    out << "roots: none (graph is disconnected)\n";
    return 2;
  }
  std::vector<NodeId> roots;
  try {
    roots = enumerate_root_candidates(g, o.tol);
  } catch (const EmptyRootSetError&) {
    out << "roots: none\nno unique-path root\n";
    return 2;
  }
  if (roots.size() == g.num_nodes()) {
    out << "roots: all\n";
  } else {
    out << "roots: " << roots.size() << " of " << g.num_nodes() << "\t";
    for (std::size_t k = 0; k < roots.size(); ++k) out << (k ? "," : "") << g.label(roots[k]);
    out << "\n";
  }
  return 0;
}

EdgeRule parse_edge_rule(const std::string& s) {
  if (s == "log") return EdgeRule::kLog;
  if (s == "sqrt") return EdgeRule::kSqrt;
  throw ParseError("--edges must be log or sqrt");
}

int cmd_build_graph(const Options& o, std::ostream& out, std::ostream& err) {
  const PointCloud points = load_points(o.points);
  BuildSpec spec;
  spec.max_clusters = o.clusters;
  spec.edge_rule = parse_edge_rule(o.edges);
  spec.seed = o.seed;
  const GraphBuild built = build_graph_metric(points, spec);
  if (built.clustering.coincident_points > 0) {
    err << "notice: merged " << built.clustering.coincident_points << " coincident points\n";
  }
  save_graph(built.graph, o.out);
  out << "nodes\t" << built.graph.num_nodes() << "\n";
  out << "sampled_edges\t" << built.stats.sampled_edges << "\n";
  out << "components\t" << built.stats.components << "\n";
  out << "stitch_edges\t" << built.stats.stitch_edges << "\n";
  out << "edges\t" << built.graph.num_edges() << "\n";

  if (!o.raw_measures.empty()) {
    if (o.measures_out.empty()) throw ParseError("--raw-measures needs --measures-out");
    fs::create_directories(o.measures_out);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(o.raw_measures)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      auto rows = parse_numeric_rows(read_text_file(f));
      std::vector<std::vector<double>> pts;
      std::vector<double> masses;
      for (auto& row : rows) {
        if (row.size() != points.dim() + 1) {
          throw ParseError(f.string() + ": raw measure rows need " + std::to_string(points.dim()) +
                           " coordinates and a mass");
        }
        masses.push_back(row.back());
        row.pop_back();
        pts.push_back(std::move(row));
      }
      const DiscreteMeasure mu = project_raw_measure(built.clustering.centroids, pts, masses);
      write_text_file(fs::path(o.measures_out) / (f.stem().string() + ".tsv"),
                      measure_to_tsv(mu, built.graph));
    }
    out << "measures\t" << files.size() << "\n";
  }
  return 0;
}

int cmd_index(const Options& o, std::ostream& out, std::ostream& err) {
  Prepared p = prepare(o, err);
  if (p.jittered) save_graph(p.graph, fs::path(o.out).replace_extension(".graph.json"));
  save_root_index(p.index, p.graph, o.out);
  out << "root\t" << p.graph.label(p.index.root()) << "\n";
  out << "tree_edges\t" << p.graph.num_nodes() - 1 << "\n";
  out << "pruned_edges\t" << p.index.pruned_edges().size() << "\n";
  out << "average_depth\t" << format_general(p.index.average_depth()) << "\n";
  out << "mode\t" << (p.index.mode() == ProfileMode::kPathLists ? "path-lists" : "subtree-sums")
      << "\n";
  return 0;
}

double tree_baseline(const Options& o, const Graph& g, const DiscreteMeasure& mu,
                     const DiscreteMeasure& nu) {
  Graph tree;
  if (is_tree(g)) {
    tree = g;
  } else if (o.tree == "mst") {
    tree = minimum_spanning_tree(g);
  } else if (o.tree == "random") {
    tree = random_spanning_tree(g, o.seed);
  } else {
    throw ParseError("--tree must be random or mst");
  }
  NodeId root = 0;
  if (o.root != "auto") root = tree.node(o.root);
  return tree_wasserstein(build_root_index(tree, root), mu, nu);
}

int cmd_dist(const Options& o, std::ostream& out, std::ostream& err) {
  check_order(o.p);
  if (o.method == "w1" || o.method == "tw") {
    const Graph g = load_graph(o.graph);
    const DiscreteMeasure mu = load_measure(o.mu, g, o.normalize);
    const DiscreteMeasure nu = load_measure(o.nu, g, o.normalize);
    const double d = o.method == "w1" ? exact_w1(g, mu, nu) : tree_baseline(o, g, mu, nu);
    out << format_distance(d) << "\n";
    return 0;
  }
  if (o.method != "sobolev") throw ParseError("--method must be sobolev, tw or w1");
  if (o.all_roots) {
    Graph g = load_graph(o.graph);
    std::vector<NodeId> roots;
    double tol = o.tol;
    try {
      roots = enumerate_root_candidates(g, tol);
    } catch (const EmptyRootSetError&) {
      if (!o.jitter) throw;
      g = jitter(o, g, err);
      tol = jittered_tol(o, g);
      roots = enumerate_root_candidates(g, tol);
    }
    const DiscreteMeasure mu = load_measure(o.mu, g, o.normalize);
    const DiscreteMeasure nu = load_measure(o.nu, g, o.normalize);
    std::vector<RootIndex> indexes;
    for (NodeId r : roots) indexes.push_back(build_root_index(g, r, index_options(o, tol)));
    out << format_distance(sliced_sobolev(indexes, SliceSpec::uniform(roots), mu, nu, o.p)) << "\n";
    return 0;
  }
  const Prepared p = prepare(o, err);
  const DiscreteMeasure mu = load_measure(o.mu, p.graph, o.normalize);
  const DiscreteMeasure nu = load_measure(o.nu, p.graph, o.normalize);
  out << format_distance(sobolev_distance(p.index, mu, nu, o.p)) << "\n";
  return 0;
}

int cmd_slice(const Options& o, std::ostream& out) {
  check_order(o.p);
  const Graph g = load_graph(o.graph);
  SliceSpec spec;
  if (!o.roots.empty()) {
    for (const auto& label : o.roots) {
      auto v = g.find(label);
      if (!v) throw ParseError("unknown root label '" + label + "'");
      if (!check_uniqueness(g, *v, o.tol)) {
        throw ValidationError("root '" + label + "' does not have unique shortest paths");
      }
      spec.roots.push_back(*v);
    }
  } else {
    std::vector<NodeId> candidates = enumerate_root_candidates(g, o.tol);
    if (o.num_roots > 0 && o.num_roots < candidates.size()) {
      std::mt19937_64 rng(o.seed);
      std::shuffle(candidates.begin(), candidates.end(), rng);
      candidates.resize(o.num_roots);
      std::sort(candidates.begin(), candidates.end());
    }
    spec.roots = std::move(candidates);
  }
  if (o.weights.empty()) {
    spec = SliceSpec::uniform(std::move(spec.roots));
  } else {
    spec.weights = o.weights;
  }
  spec.validate();
  const DiscreteMeasure mu = load_measure(o.mu, g, o.normalize);
  const DiscreteMeasure nu = load_measure(o.nu, g, o.normalize);
  std::vector<RootIndex> indexes;
  for (NodeId r : spec.roots) indexes.push_back(build_root_index(g, r, index_options(o, o.tol)));
  out << format_distance(sliced_sobolev(indexes, spec, mu, nu, o.p)) << "\n";
  return 0;
}

KernelFamily parse_family(const std::string& s) {
  if (s == "sp") return KernelFamily::kSp;
  if (s == "spp") return KernelFamily::kSpPowP;
  throw ParseError("--family must be sp or spp");
}

std::vector<double> upper_distances(const GramMatrix& d) {
  std::vector<double> v;
  for (std::size_t i = 0; i < d.n; ++i) {
    for (std::size_t j = i + 1; j < d.n; ++j) v.push_back(d(i, j));
  }
  return v;
}

int cmd_gram(const Options& o, std::ostream& out, std::ostream& err) {
  const Prepared p = prepare(o, err);
  const MeasureSet set = load_measure_dir(o.measures, p.graph, o.normalize);
  if (set.measures.empty()) throw ValidationError("measure directory is empty");
  KernelSpec spec{parse_family(o.family), o.p, o.t};
  if (o.print_bandwidths) {
    if (!(o.p >= 1.0 && o.p <= 2.0)) spec.validate();
    GramMatrix d = distance_matrix(p.index, set.measures, o.p, o.threads);
    std::vector<double> sample = upper_distances(d);
    if (spec.family == KernelFamily::kSpPowP) {
      for (double& x : sample) x = abs_pow(x, o.p);
    }
    for (double t : bandwidth_candidates(sample)) out << format_general(t) << "\n";
    return 0;
  }
  spec.validate();
  GramMatrix g = gram_matrix(p.index, set.measures, spec, o.threads);
  g.labels = set.names;
  if (o.diag_shift != 0.0) shift_diagonal(g, o.diag_shift);
  bool binary = fs::path(o.out).extension() == ".bin";
  if (o.format == "bin") binary = true;
  else if (o.format == "csv") binary = false;
  else if (!o.format.empty()) throw ParseError("--format must be csv or bin");
  save_gram(g, o.out, binary);
  out << "measures\t" << g.n << "\n";
  return 0;
}

int cmd_bench(const Options& o, std::ostream& out, std::ostream& err) {
  const auto t_all = Clock::now();
  const Prepared p = prepare(o, err);
  const MeasureSet set = load_measure_dir(o.measures, p.graph, o.normalize);
  if (set.measures.empty()) throw ValidationError("measure directory is empty");
  KernelSpec spec{parse_family(o.family), o.p, o.t > 0.0 ? o.t : 1.0};
  spec.validate();

  const auto t_embed = Clock::now();
  std::vector<FeatureVector> features;
  features.reserve(set.measures.size());
  for (const auto& mu : set.measures) features.push_back(feature_embed(p.index, mu, o.p));
  const double embed_s = seconds_since(t_embed);

  const auto t_fill = Clock::now();
  const GramMatrix g = gram_matrix(features, spec, o.threads);
  const double fill_s = seconds_since(t_fill);
  const double total_s = seconds_since(t_all);

  CompensatedSum checksum;
  for (double v : g.values) checksum += v;
  const std::size_t n = set.measures.size();
  const double pairs = static_cast<double>(n * (n - 1) / 2);

  out << "stage\tseconds\n";
  out << "preprocessing\t" << format_general(p.build_seconds) << "\n";
  out << "embedding\t" << format_general(embed_s) << "\n";
  out << "gram_fill\t" << format_general(fill_s) << "\n";
  out << "gram_total_including_preprocessing\t" << format_general(p.build_seconds + embed_s + fill_s)
      << "\n";
  out << "wall_total\t" << format_general(total_s) << "\n";
  const double per_pair = pairs > 0 ? (embed_s + fill_s) / pairs : 0.0;
  out << "sobolev_per_pair\t" << format_general(per_pair) << "\n";
  if (o.w1_pairs > 0 && n >= 2) {
    std::size_t done = 0;
    const auto t_w1 = Clock::now();
    for (std::size_t i = 0; i < n && done < o.w1_pairs; ++i) {
      for (std::size_t j = i + 1; j < n && done < o.w1_pairs; ++j, ++done) {
        (void)exact_w1(p.graph, set.measures[i], set.measures[j]);
      }
    }
    const double w1_per_pair = seconds_since(t_w1) / static_cast<double>(done);
    out << "w1_per_pair\t" << format_general(w1_per_pair) << "\n";
    out << "w1_over_sobolev\t" << format_general(per_pair > 0 ? w1_per_pair / per_pair : 0.0) << "\n";
  }
  out << "gram_checksum\t" << format_general(checksum.value()) << "\n";
  return 0;
}

}  // namespace

std::string format_distance(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.12g", value);
  return buf;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Sobolev transport distances on graph metrics"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed_opt;
  std::optional<unsigned> threads_opt;

  auto* validate = app.add_subcommand("validate", "check connectivity, short cuts and unique-path roots");
  add_graph_options(validate, o);

  auto* build = app.add_subcommand("build-graph", "cluster points and build a random graph metric");
  build->add_option("--points", o.points, "points TSV, one vector per line")->required();
  build->add_option("--M", o.clusters, "cluster budget")->required();
  build->add_option("--edges", o.edges, "log (M ln M) or sqrt (M^1.5)");
  build->add_option("--seed", seed_opt, "random seed (default $SOBOGRAPH_SEED or 0)");
  build->add_option("--out", o.out, "output graph JSON")->required();
  build->add_option("--raw-measures", o.raw_measures, "directory of raw measures (coords + mass per row)");
  build->add_option("--measures-out", o.measures_out, "where projected measures are written");

  auto* index = app.add_subcommand("index", "build and persist a root index");
  add_graph_options(index, o);
  add_root_options(index, o);
  index->add_option("--out", o.out, "output index JSON")->required();
  index->add_option("--seed", seed_opt, "seed for --jitter");
  index->add_option("--threads", threads_opt, "workers for root selection");

  auto* dist = app.add_subcommand("dist", "distance between two measures");
  add_graph_options(dist, o);
  add_root_options(dist, o);
  dist->add_option("--mu", o.mu, "first measure TSV")->required();
  dist->add_option("--nu", o.nu, "second measure TSV")->required();
  dist->add_option("--p", o.p, "order p >= 1");
  dist->add_option("--method", o.method, "sobolev, tw or w1");
  dist->add_option("--tree", o.tree, "spanning tree for tw on non-trees: random or mst");
  dist->add_option("--seed", seed_opt, "seed for random trees and --jitter");
  dist->add_flag("--all-roots", o.all_roots, "sliced distance over every unique-path root");
  dist->add_flag("--normalize", o.normalize, "rescale measures to unit mass");
  dist->add_option("--threads", threads_opt, "workers for root selection");

  auto* slice = app.add_subcommand("slice", "sliced distance over several roots");
  add_graph_options(slice, o);
  slice->add_option("--mu", o.mu, "first measure TSV")->required();
  slice->add_option("--nu", o.nu, "second measure TSV")->required();
  slice->add_option("--p", o.p, "order p >= 1");
  slice->add_option("--roots", o.roots, "root labels (default: all unique-path roots)")->delimiter(',');
  slice->add_option("--weights", o.weights, "root weights summing to 1 (default uniform)")->delimiter(',');
  slice->add_option("--num-roots", o.num_roots, "sample this many roots from the candidates");
  slice->add_option("--seed", seed_opt, "seed for root sampling");
  slice->add_option("--break-ties", o.ties, "strict (default) or lexicographic");
  slice->add_flag("--normalize", o.normalize, "rescale measures to unit mass");

  auto* gram = app.add_subcommand("gram", "kernel Gram matrix of a measure directory");
  add_graph_options(gram, o);
  add_root_options(gram, o);
  gram->add_option("--measures", o.measures, "directory of measure TSV files")->required();
  gram->add_option("--family", o.family, "sp: exp(-t S_p), spp: exp(-t S_p^p)");
  gram->add_option("--p", o.p, "order in [1, 2]");
  gram->add_option("--t", o.t, "bandwidth t > 0");
  gram->add_option("--out", o.out, "output file (.bin selects the binary layout)");
  gram->add_option("--format", o.format, "csv or bin");
  gram->add_option("--threads", threads_opt, "worker threads (default: logical cores)");
  gram->add_option("--diag-shift", o.diag_shift, "value added to the diagonal");
  gram->add_option("--seed", seed_opt, "seed for --jitter");
  gram->add_flag("--print-bandwidths", o.print_bandwidths, "print candidate t values and exit");
  gram->add_flag("--normalize", o.normalize, "rescale measures to unit mass");

  auto* bench = app.add_subcommand("bench", "time preprocessing and Gram computation");
  add_graph_options(bench, o);
  add_root_options(bench, o);
  bench->add_option("--measures", o.measures, "directory of measure TSV files")->required();
  bench->add_option("--family", o.family, "sp or spp");
  bench->add_option("--p", o.p, "order in [1, 2]");
  bench->add_option("--t", o.t, "bandwidth (default 1)");
  bench->add_option("--threads", threads_opt, "worker threads (default: logical cores)");
  bench->add_option("--w1-pairs", o.w1_pairs, "also time exact W1 on this many pairs");
  bench->add_option("--seed", seed_opt, "seed for --jitter");
  bench->add_flag("--normalize", o.normalize, "rescale measures to unit mass");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    o.seed = seed_opt ? *seed_opt : default_seed();
    o.threads = threads_opt ? std::max(1u, *threads_opt) : default_threads();
    if (validate->parsed()) return cmd_validate(o, out);
    if (build->parsed()) return cmd_build_graph(o, out, err);
    if (index->parsed()) return cmd_index(o, out, err);
    if (dist->parsed()) return cmd_dist(o, out, err);
    if (slice->parsed()) return cmd_slice(o, out);
    if (gram->parsed()) {
      if (!o.print_bandwidths && o.out.empty()) throw ParseError("gram needs --out");
      if (!o.print_bandwidths && o.t <= 0.0) throw ParseError("gram needs --t > 0");
      return cmd_gram(o, out, err);
    }
    if (bench->parsed()) return cmd_bench(o, out, err);
  } catch (const AmbiguousPathError& e) {
    err << "assumption violated: " << e.what() << "\n";
    return e.exit_code();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace sobograph::cli
