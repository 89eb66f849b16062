#include "sobograph/kernels.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>

#include "sobograph/error.hpp"
#include "sobograph/graph_io.hpp"
#include "sobograph/sobolev.hpp"

namespace sobograph {
namespace {

// Rows are dealt out round-robin so that workers get similar triangle areas.
template <typename Fn>
void fill_upper(std::size_t n, unsigned threads, Fn&& entry, GramMatrix& out) {
  auto work = [&](std::size_t first) {
    for (std::size_t i = first; i < n; i += threads) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double v = entry(i, j);
        out(i, j) = v;
        out(j, i) = v;
      }
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1 || n < 2) {
    work(0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned k = 0; k < threads; ++k) pool.emplace_back(work, k);
  for (auto& t : pool) t.join();
}

std::vector<FeatureVector> embed_all(const RootIndex& idx, std::span<const DiscreteMeasure> measures,
                                     double p) {
  std::vector<FeatureVector> features;
  features.reserve(measures.size());
  for (const DiscreteMeasure& mu : measures) features.push_back(feature_embed(idx, mu, p));
  return features;
}

Eigen::MatrixXd to_eigen(const GramMatrix& m) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(m.n), static_cast<Eigen::Index>(m.n));
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = 0; j < m.n; ++j) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
    }
  }
  return a;
}

Eigen::VectorXd symmetric_eigenvalues(const GramMatrix& m) {
  if (m.n == 0) throw NumericError("empty matrix");
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = i + 1; j < m.n; ++j) {
      if (std::fabs(m(i, j) - m(j, i)) > 1e-12) throw NumericError("matrix is not symmetric");
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(m), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("eigensolver did not converge");
  return solver.eigenvalues();
}

void append_le(std::string& out, const void* src, std::size_t bytes) {
  const auto* p = static_cast<const char*>(src);
  if constexpr (std::endian::native == std::endian::little) {
    out.append(p, bytes);
  } else {
    for (std::size_t k = bytes; k-- > 0;) out.push_back(p[k]);
  }
}

void read_le(std::string_view in, std::size_t offset, void* dst, std::size_t bytes) {
  auto* d = static_cast<char*>(dst);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(d, in.data() + offset, bytes);
  } else {
    for (std::size_t k = 0; k < bytes; ++k) d[bytes - 1 - k] = in[offset + k];
  }
}

}  // namespace

void KernelSpec::validate() const {
  if (!(p >= 1.0 && p <= 2.0)) {
    throw NumericError("kernels require 1 <= p <= 2 (positive definiteness is only guaranteed there)");
  }
  if (!(t > 0.0) || !std::isfinite(t)) throw NumericError("kernel bandwidth t must be positive");
}

double kernel_value(const KernelSpec& spec, double distance) {
  const double arg = spec.family == KernelFamily::kSp ? distance : abs_pow(distance, spec.p);
  return std::max(std::exp(-spec.t * arg), kGramFloor);
}

GramMatrix gram_matrix(std::span<const FeatureVector> features, const KernelSpec& spec, unsigned threads) {
  spec.validate();
  for (const FeatureVector& f : features) {
    if (f.p != spec.p) throw std::invalid_argument("features were embedded with a different p");
  }
  GramMatrix g;
  g.n = features.size();
  g.values.assign(g.n * g.n, 1.0);
  fill_upper(
      g.n, threads,
      [&](std::size_t i, std::size_t j) {
        const double pow_dist = lp_pow_distance(features[i].entries, features[j].entries, spec.p);
        const double arg = spec.family == KernelFamily::kSp ? root_p(pow_dist, spec.p) : pow_dist;
        return std::max(std::exp(-spec.t * arg), kGramFloor);
      },
      g);
  return g;
}

GramMatrix gram_matrix(const RootIndex& idx, std::span<const DiscreteMeasure> measures,
                       const KernelSpec& spec, unsigned threads) {
  spec.validate();
  const auto features = embed_all(idx, measures, spec.p);
  return gram_matrix(features, spec, threads);
}

GramMatrix distance_matrix(const RootIndex& idx, std::span<const DiscreteMeasure> measures, double p,
                           unsigned threads) {
  const auto features = embed_all(idx, measures, p);
  GramMatrix d;
  d.n = features.size();
  d.values.assign(d.n * d.n, 0.0);
  fill_upper(
      d.n, threads, [&](std::size_t i, std::size_t j) { return lp_distance(features[i], features[j]); },
      d);
  return d;
}

double nearest_rank_quantile(std::vector<double> sample, int percent) {
  if (sample.empty()) throw NumericError("quantile of an empty sample");
  if (percent <= 0 || percent > 100) throw std::invalid_argument("percent must be in (0, 100]");
  const std::size_t n = sample.size();
  std::size_t rank = (static_cast<std::size_t>(percent) * n + 99) / 100;
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(sample.begin(), sample.begin() + static_cast<std::ptrdiff_t>(rank - 1), sample.end());
  return sample[rank - 1];
}

std::vector<double> bandwidth_candidates(std::span<const double> distances) {
  if (distances.empty()) throw NumericError("bandwidth selection needs at least one distance");
  std::vector<double> sorted(distances.begin(), distances.end());
  for (double d : sorted) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw NumericError("distances must be finite and nonnegative");
  }
  std::sort(sorted.begin(), sorted.end());
  if (sorted.back() == 0.0) throw NumericError("all distances are zero; no bandwidth can be derived");
  const std::size_t n = sorted.size();
  std::vector<double> ts;
  for (int s = 10; s <= 90; s += 10) {
    const std::size_t rank = std::max<std::size_t>(1, (static_cast<std::size_t>(s) * n + 99) / 100);
    const double q = sorted[rank - 1];
    if (q == 0.0) continue;
    for (double m : {1.0, 2.0, 5.0}) ts.push_back(1.0 / (m * q));
  }
  std::sort(ts.begin(), ts.end(), std::greater<>());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

double min_eigenvalue(const GramMatrix& m) { return symmetric_eigenvalues(m).minCoeff(); }

double spectral_norm(const GramMatrix& m) { return symmetric_eigenvalues(m).cwiseAbs().maxCoeff(); }

void shift_diagonal(GramMatrix& m, double shift) {
  for (std::size_t i = 0; i < m.n; ++i) m(i, i) += shift;
}

std::string gram_to_csv(const GramMatrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.n; ++i) {
    if (i) out += ',';
    out += i < m.labels.size() ? m.labels[i] : std::to_string(i);
  }
  out += '\n';
  char buf[64];
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = 0; j < m.n; ++j) {
      if (j) out += ',';
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, m(i, j), std::chars_format::general, 17);
      out.append(buf, end);
    }
    out += '\n';
  }
  return out;
}

std::string gram_to_binary(const GramMatrix& m) {
  if (m.n > 0xffffffffu) throw std::length_error("matrix too large for the binary layout");
  std::string out = "SGRM";
  const auto n = static_cast<std::uint32_t>(m.n);
  append_le(out, &n, sizeof n);
  for (double v : m.values) append_le(out, &v, sizeof v);
  return out;
}

GramMatrix gram_from_binary(std::string_view bytes) {
  if (bytes.size() < 8 || bytes.substr(0, 4) != "SGRM") throw ParseError("not an SGRM gram file");
  std::uint32_t n = 0;
  read_le(bytes, 4, &n, sizeof n);
  const std::size_t need = 8 + static_cast<std::size_t>(n) * n * sizeof(double);
  if (bytes.size() != need) throw ParseError("SGRM file has the wrong length");
  GramMatrix m;
  m.n = n;
  m.values.resize(static_cast<std::size_t>(n) * n);
  for (std::size_t k = 0; k < m.values.size(); ++k) {
    read_le(bytes, 8 + k * sizeof(double), &m.values[k], sizeof(double));
  }
  return m;
}

void save_gram(const GramMatrix& m, const std::filesystem::path& path, bool binary) {
  write_text_file(path, binary ? gram_to_binary(m) : gram_to_csv(m));
}

}  // namespace sobograph
