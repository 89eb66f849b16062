#include "sobograph/measure.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "sobograph/error.hpp"
#include "sobograph/graph_io.hpp"
#include "sobograph/summation.hpp"

namespace sobograph {

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms, bool normalize) {
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.mass) || a.mass < 0.0) {
      throw NumericError("measure has a negative or non-finite mass at node " +
                         std::to_string(a.node));
    }
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.node < b.node; });
  for (const Atom& a : atoms) {
    if (a.mass == 0.0) continue;
    if (!atoms_.empty() && atoms_.back().node == a.node) {
      atoms_.back().mass += a.mass;
    } else {
      atoms_.push_back(a);
    }
  }
  const double sum = total();
  if (atoms_.empty()) throw NumericError("measure has no positive mass");
  if (normalize) {
    for (Atom& a : atoms_) a.mass /= sum;
  } else if (std::fabs(sum - 1.0) > kMassTolerance) {
    throw NumericError("measure masses sum to " + std::to_string(sum) + ", expected 1");
  }
}

double DiscreteMeasure::mass(NodeId v) const noexcept {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), v,
                             [](const Atom& a, NodeId x) { return a.node < x; });
  return it != atoms_.end() && it->node == v ? it->mass : 0.0;
}

double DiscreteMeasure::total() const noexcept {
  CompensatedSum s;
  for (const Atom& a : atoms_) s += a.mass;
  return s.value();
}

void DiscreteMeasure::check_on(const Graph& g) const {
  for (const Atom& a : atoms_) {
    if (!g.contains(a.node)) {
      throw std::out_of_range("measure support " + std::to_string(a.node) +
                              " is not a node of the graph");
    }
  }
}

double total_variation(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  CompensatedSum s;
  auto a = mu.atoms().begin();
  auto b = nu.atoms().begin();
  while (a != mu.atoms().end() || b != nu.atoms().end()) {
    if (b == nu.atoms().end() || (a != mu.atoms().end() && a->node < b->node)) {
      s += a++->mass;
    } else if (a == mu.atoms().end() || b->node < a->node) {
      s += b++->mass;
    } else {
      s += std::fabs(a++->mass - b++->mass);
    }
  }
  return 0.5 * s.value();
}

DiscreteMeasure parse_measure_tsv(std::string_view text, const Graph& g, bool normalize) {
  std::vector<Atom> atoms;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError("expected `label<TAB>mass`", line_no);
    }
    const std::string_view label = line.substr(0, tab);
    std::string_view num = line.substr(tab + 1);
    while (!num.empty() && (num.front() == ' ' || num.front() == '\t')) num.remove_prefix(1);
    while (!num.empty() && (num.back() == ' ' || num.back() == '\t')) num.remove_suffix(1);
    double mass = 0.0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), mass);
    if (ec != std::errc() || ptr != num.data() + num.size()) {
      throw ParseError("cannot parse mass '" + std::string(num) + "'", line_no);
    }
    auto node = g.find(label);
    if (!node) throw ParseError("unknown node label '" + std::string(label) + "'", line_no);
    if (mass < 0.0 || !std::isfinite(mass)) throw ParseError("mass must be nonnegative", line_no);
    atoms.push_back({*node, mass});
  }
  return DiscreteMeasure(std::move(atoms), normalize);
}

DiscreteMeasure load_measure(const std::filesystem::path& path, const Graph& g, bool normalize) {
  try {
    return parse_measure_tsv(read_text_file(path), g, normalize);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError(path.string() + ": " + e.what());
  }
}

std::string measure_to_tsv(const DiscreteMeasure& mu, const Graph& g) {
  std::string out;
  char buf[64];
  for (const Atom& a : mu.atoms()) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, a.mass);
    out += g.label(a.node);
    out += '\t';
    out.append(buf, end);
    out += '\n';
  }
  return out;
}

MeasureSet load_measure_dir(const std::filesystem::path& dir, const Graph& g, bool normalize) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
    return a.filename().string() < b.filename().string();
  });
  MeasureSet set;
  for (const auto& f : files) {
    set.names.push_back(f.stem().string());
    set.measures.push_back(load_measure(f, g, normalize));
  }
  return set;
}

}  // namespace sobograph
