#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <unistd.h>

#include "sobograph/cli.hpp"
#include "sobograph/graph_io.hpp"
#include "sobograph/kernels.hpp"
#include "sobograph/root_index.hpp"
#include "support/fixtures.hpp"

using namespace sobograph;
using namespace sobograph::testing;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sobograph");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("sobograph_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string line_value(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + "\t", 0) == 0) return line.substr(key.size() + 1);
  }
  return {};
}

}  // namespace

TEST_CASE("validate") {
  TempDir dir;
  Rng rng(71);
  save_graph(random_tree(12, rng), dir / "tree.json");
  save_graph(cycle4(), dir / "c4.json");
  save_graph(triangle(1, 1, 3), dir / "tri.json");
  save_graph(Graph(4, {{0, 1, 1.0}, {2, 3, 1.0}}), dir / "split.json");
  write_text_file(dir / "bad.json", "{\"nodes\": [\"a\", \"b\"],\n \"edges\": [[0, 1, 1.0]\n");

  Result r = run_cli({"validate", "--graph", dir / "tree.json"});
  CHECK(r.code == 0);
  CHECK(r.out.find("roots: all") != std::string::npos);
  CHECK(line_value(r.out, "connected") == "true");

  r = run_cli({"validate", "--graph", dir / "c4.json"});
  CHECK(r.code == 2);
  CHECK(r.out.find("no unique-path root") != std::string::npos);

  r = run_cli({"validate", "--graph", dir / "tri.json"});
  CHECK(line_value(r.out, "short_cuts") == "0-2");

  r = run_cli({"validate", "--graph", dir / "split.json"});
  CHECK(r.code == 2);
  CHECK(line_value(r.out, "connected") == "false");

  r = run_cli({"validate", "--graph", dir / "bad.json"});
  CHECK(r.code == 1);
  CHECK(r.err.find("line") != std::string::npos);

  r = run_cli({"validate", "--graph", dir / "missing.json"});
  CHECK(r.code == 1);
  CHECK(run_cli({"frobnicate"}).code == 1);
}

TEST_CASE("dist") {
  TempDir dir;
  save_graph(path_graph(), dir / "path.json");
  write_text_file(dir / "a.tsv", "a\t1\n");
  write_text_file(dir / "b.tsv", "# dirac at b\nb\t1.0\n");
  write_text_file(dir / "mix.tsv", "a\t0.5\nb\t0.5\n");
  write_text_file(dir / "off.tsv", "a\t0.5\nb\t0.49\n");

  Result r = run_cli({"dist", "--graph", dir / "path.json", "--mu", dir / "a.tsv", "--nu", dir / "b.tsv", "--p", "1"});
  CHECK(r.code == 0);
  CHECK(r.out == "3.00000000000\n");
  r = run_cli({"dist", "--graph", dir / "path.json", "--mu", dir / "a.tsv", "--nu", dir / "a.tsv"});
  CHECK(r.out == "0\n");
  r = run_cli({"dist", "--graph", dir / "path.json", "--mu", dir / "a.tsv", "--nu", dir / "b.tsv", "--p", "2",
               "--root", "z0"});
  CHECK(r.out == "1.73205080757\n");

  // Off by 0.01: rejected unless normalized.
  r = run_cli({"dist", "--graph", dir / "path.json", "--mu", dir / "a.tsv", "--nu", dir / "off.tsv"});
  CHECK(r.code == 4);
  r = run_cli({"dist", "--graph", dir / "path.json", "--mu", dir / "a.tsv", "--nu", dir / "off.tsv", "--normalize"});
  CHECK(r.code == 0);
  CHECK(run_cli({"dist", "--graph", dir / "path.json", "--mu", dir / "a.tsv", "--nu", dir / "b.tsv", "--p", "0.5"})
            .code == 4);
}

TEST_CASE("dist methods agree on trees") {
  TempDir dir;
  Rng rng(72);
  const Graph t = random_tree(25, rng);
  save_graph(t, dir / "t.json");
  for (int k = 0; k < 10; ++k) {
    write_text_file(dir / "mu.tsv", measure_to_tsv(random_measure_upto(25, 6, rng), t));
    write_text_file(dir / "nu.tsv", measure_to_tsv(random_measure_upto(25, 6, rng), t));
    const std::vector<std::string> base{"dist", "--graph", dir / "t.json", "--mu", dir / "mu.tsv", "--nu", dir / "nu.tsv"};
    auto with = [&](std::vector<std::string> extra) {
      auto a = base;
      a.insert(a.end(), extra.begin(), extra.end());
      return run_cli(a);
    };
    const Result s = with({"--p", "1"});
    const Result w = with({"--method", "w1"});
    const Result tw = with({"--method", "tw"});
    REQUIRE(s.code == 0);
    const double sv = std::stod(s.out);
    CHECK(std::stod(w.out) == doctest::Approx(sv).epsilon(1e-10));
    CHECK(std::stod(tw.out) == doctest::Approx(sv).epsilon(1e-10));
    CHECK(std::stod(with({"--all-roots"}).out) == doctest::Approx(sv).epsilon(1e-10));
  }
}

TEST_CASE("ambiguity surfaces as exit 3") {
  TempDir dir;
  const Graph c = cycle4();
  save_graph(c, dir / "c4.json");
  write_text_file(dir / "a.tsv", "0\t1\n");
  write_text_file(dir / "b.tsv", "2\t1\n");
  Result r = run_cli({"dist", "--graph", dir / "c4.json", "--mu", dir / "a.tsv", "--nu", dir / "b.tsv", "--root", "0"});
  CHECK(r.code == 3);
  CHECK(r.err.find("offending node: 2") != std::string::npos);
  r = run_cli({"dist", "--graph", dir / "c4.json", "--mu", dir / "a.tsv", "--nu", dir / "b.tsv"});
  CHECK(r.code == 2);
  r = run_cli({"dist", "--graph", dir / "c4.json", "--mu", dir / "a.tsv", "--nu", dir / "b.tsv", "--jitter"});
  CHECK(r.code == 0);
  CHECK(r.err.find("jitter") != std::string::npos);
  r = run_cli({"dist", "--graph", dir / "c4.json", "--mu", dir / "a.tsv", "--nu", dir / "b.tsv", "--root", "0",
               "--break-ties", "lexicographic"});
  CHECK(r.code == 0);
  CHECK(r.out == "2.00000000000\n");
}

TEST_CASE("slice") {
  TempDir dir;
  save_graph(star(3), dir / "s.json");
  write_text_file(dir / "a.tsv", "2\t1\n");
  write_text_file(dir / "b.tsv", "0\t0.5\n3\t0.5\n");
  const Result one = run_cli({"slice", "--graph", dir / "s.json", "--mu", dir / "a.tsv", "--nu", dir / "b.tsv", "--roots", "0"});
  const Result two = run_cli({"slice", "--graph", dir / "s.json", "--mu", dir / "a.tsv", "--nu", dir / "b.tsv", "--roots", "1"});
  const Result both = run_cli({"slice", "--graph", dir / "s.json", "--mu", dir / "a.tsv", "--nu", dir / "b.tsv", "--roots",
                               "0,1", "--weights", "0.5,0.5", "--p", "1"});
  REQUIRE(both.code == 0);
  CHECK(std::stod(both.out) == doctest::Approx(0.5 * (std::stod(one.out) + std::stod(two.out))).epsilon(1e-11));
  CHECK(run_cli({"slice", "--graph", dir / "s.json", "--mu", dir / "a.tsv", "--nu", dir / "b.tsv", "--roots", "0,1",
                 "--weights", "0.6,0.6"})
            .code == 4);
}

TEST_CASE("gram and bench") {
  TempDir dir;
  Rng rng(73);
  const Graph g = random_euclidean_graph(30, 30, rng);
  save_graph(g, dir / "g.json");
  fs::create_directories(dir / "ms");
  fs::create_directories(dir / "empty");
  for (int k = 0; k < 8; ++k) {
    write_text_file(dir / ("ms/m" + std::to_string(k) + ".tsv"), measure_to_tsv(random_measure_upto(30, 5, rng), g));
  }
  Result r = run_cli({"gram", "--graph", dir / "g.json", "--measures", dir / "ms", "--p", "1.5", "--t", "0.5", "--out",
                      dir / "k.bin", "--threads", "1"});
  REQUIRE(r.code == 0);
  CHECK(line_value(r.out, "measures") == "8");
  const GramMatrix k1 = gram_from_binary(read_text_file(dir / "k.bin"));
  CHECK(k1.n == 8);
  r = run_cli({"gram", "--graph", dir / "g.json", "--measures", dir / "ms", "--p", "1.5", "--t", "0.5", "--out",
               dir / "k8.bin", "--threads", "8"});
  CHECK(read_text_file(dir / "k8.bin") == read_text_file(dir / "k.bin"));
  r = run_cli({"gram", "--graph", dir / "g.json", "--measures", dir / "ms", "--p", "1.5", "--t", "0.5", "--out",
               dir / "k.csv", "--diag-shift", "0.25"});
  CHECK(read_text_file(dir / "k.csv").rfind("m0,m1,", 0) == 0);
  r = run_cli({"gram", "--graph", dir / "g.json", "--measures", dir / "ms", "--print-bandwidths"});
  CHECK(r.code == 0);
  CHECK(!r.out.empty());
  CHECK(run_cli({"gram", "--graph", dir / "g.json", "--measures", dir / "ms", "--p", "3", "--t", "1", "--out", dir / "x.csv"}).code ==
        4);

  r = run_cli({"bench", "--graph", dir / "g.json", "--measures", dir / "ms", "--w1-pairs", "5", "--threads", "2"});
  CHECK(r.code == 0);
  CHECK(!line_value(r.out, "preprocessing").empty());
  CHECK(!line_value(r.out, "w1_over_sobolev").empty());
  const Result again = run_cli({"bench", "--graph", dir / "g.json", "--measures", dir / "ms", "--threads", "1"});
  CHECK(line_value(again.out, "gram_checksum") == line_value(r.out, "gram_checksum"));
  CHECK(run_cli({"bench", "--graph", dir / "g.json", "--measures", dir / "empty"}).code == 2);
}

TEST_CASE("build-graph and index") {
  TempDir dir;
  Rng rng(74);
  std::string pts;
  for (int i = 0; i < 200; ++i) pts += std::to_string(uniform(rng, 0, 1)) + " " + std::to_string(uniform(rng, 0, 1)) + "\n";
  write_text_file(dir / "pts.txt", pts);
  fs::create_directories(dir / "raw");
  write_text_file(dir / "raw/doc1.txt", "0.1 0.1 2\n0.9 0.9 2\n");
  write_text_file(dir / "raw/doc2.txt", "0.5 0.5 1\n");

  Result r = run_cli({"build-graph", "--points", dir / "pts.txt", "--M", "40", "--edges", "sqrt", "--seed", "5", "--out",
                      dir / "g.json", "--raw-measures", dir / "raw", "--measures-out", dir / "ms"});
  REQUIRE(r.code == 0);
  CHECK(line_value(r.out, "nodes") == "40");
  CHECK(line_value(r.out, "measures") == "2");
  const Graph g = load_graph(dir / "g.json");
  CHECK(is_connected(g));
  const std::string first = read_text_file(dir / "g.json");
  r = run_cli({"build-graph", "--points", dir / "pts.txt", "--M", "40", "--edges", "sqrt", "--seed", "5", "--out",
               dir / "g2.json"});
  CHECK(read_text_file(dir / "g2.json") == first);
  ::setenv("SOBOGRAPH_SEED", "5", 1);
  r = run_cli({"build-graph", "--points", dir / "pts.txt", "--M", "40", "--edges", "sqrt", "--out", dir / "g3.json"});
  ::unsetenv("SOBOGRAPH_SEED");
  CHECK(read_text_file(dir / "g3.json") == first);

  r = run_cli({"index", "--graph", dir / "g.json", "--out", dir / "idx.json"});
  REQUIRE(r.code == 0);
  const RootIndex idx = load_root_index(dir / "idx.json", g);
  CHECK(g.label(idx.root()) == line_value(r.out, "root"));

  const Result a = run_cli({"dist", "--graph", dir / "g.json", "--index", dir / "idx.json", "--mu", dir / "ms/doc1.tsv",
                            "--nu", dir / "ms/doc2.tsv", "--p", "2"});
  const Result b = run_cli({"dist", "--graph", dir / "g.json", "--mu", dir / "ms/doc1.tsv", "--nu", dir / "ms/doc2.tsv",
                            "--p", "2", "--root", g.label(idx.root())});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
}
