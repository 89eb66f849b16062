#include "sobograph/graph_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "sobograph/error.hpp"

namespace sobograph {
namespace {

using nlohmann::json;

// Line of every object element of the top-level arrays, keyed by array name.
// Only used to attach line numbers to semantic errors after a successful parse.
std::map<std::string, std::vector<std::size_t>> element_lines(std::string_view text) {
  std::map<std::string, std::vector<std::size_t>> lines;
  std::size_t line = 1;
  int depth = 0;
  std::string last_key;
  std::string array_key;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
    } else if (c == '"') {
      std::string token;
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\') ++i;
        else token.push_back(text[i]);
      }
      if (depth == 1) last_key = token;
    } else if (c == '{' || c == '[') {
      if (depth == 1 && c == '[') array_key = last_key;
      if (depth == 2 && c == '{') lines[array_key].push_back(line);
      ++depth;
    } else if (c == '}' || c == ']') {
      --depth;
    }
  }
  return lines;
}

std::string label_of(const json& j, const char* what, std::size_t line) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw ParseError(std::string(what) + " must be a string or integer label", line);
}

}  // namespace

Graph parse_graph_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed graph JSON: ") + e.what());
  }
  const auto lines = element_lines(text);
  auto line_at = [&](const char* key, std::size_t i) -> std::size_t {
    auto it = lines.find(key);
    if (it == lines.end() || i >= it->second.size()) return 0;
    return it->second[i];
  };
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array() ||
      !doc.contains("edges") || !doc["edges"].is_array()) {
    throw ParseError("graph JSON needs top-level \"nodes\" and \"edges\" arrays", 1);
  }

  std::vector<std::string> labels;
  std::vector<std::vector<double>> coords;
  std::map<std::string, NodeId> ids;
  const json& nodes = doc["nodes"];
  bool any_coords = false;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const json& n = nodes[i];
    const std::size_t line = line_at("nodes", i);
    if (!n.is_object() || !n.contains("id")) throw ParseError("node entry needs an \"id\"", line);
    std::string label = label_of(n["id"], "node id", line);
    if (!ids.emplace(label, static_cast<NodeId>(labels.size())).second) {
      throw ParseError("duplicate node label '" + label + "'", line);
    }
    labels.push_back(std::move(label));
    std::vector<double> c;
    if (n.contains("coords")) {
      if (!n["coords"].is_array()) throw ParseError("coords must be an array", line);
      for (const json& x : n["coords"]) {
        if (!x.is_number()) throw ParseError("coords must be numeric", line);
        c.push_back(x.get<double>());
      }
      any_coords = true;
    }
    coords.push_back(std::move(c));
  }
  if (any_coords) {
    for (std::size_t i = 0; i < coords.size(); ++i) {
      if (coords[i].size() != coords[0].size()) {
        throw ParseError("all nodes need coords of the same dimension", line_at("nodes", i));
      }
    }
  } else {
    coords.clear();
  }

  std::vector<Edge> edges;
  const json& es = doc["edges"];
  for (std::size_t i = 0; i < es.size(); ++i) {
    const json& e = es[i];
    const std::size_t line = line_at("edges", i);
    if (!e.is_object() || !e.contains("u") || !e.contains("v") || !e.contains("w")) {
      throw ParseError("edge entry needs \"u\", \"v\" and \"w\"", line);
    }
    auto resolve = [&](const char* key) {
      const std::string label = label_of(e[key], "edge endpoint", line);
      auto it = ids.find(label);
      if (it == ids.end()) throw ParseError("edge references unknown node '" + label + "'", line);
      return it->second;
    };
    const NodeId u = resolve("u");
    const NodeId v = resolve("v");
    if (!e["w"].is_number()) throw ParseError("edge weight must be numeric", line);
    const double w = e["w"].get<double>();
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw ParseError("edge weight must be positive, got " + e["w"].dump(), line);
    }
    if (u == v) throw ParseError("self-loop on node '" + labels[u] + "'", line);
    edges.push_back({u, v, w});
  }
  try {
    const std::size_t n = labels.size();
    return Graph(n, std::move(edges), std::move(labels), std::move(coords));
  } catch (const ValidationError& e) {
    throw ParseError(e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

Graph load_graph(const std::filesystem::path& path) {
  try {
    return parse_graph_json(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string graph_to_json(const Graph& g) {
  json nodes = json::array();
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    json n = {{"id", g.label(v)}};
    if (g.has_coords()) n["coords"] = g.all_coords()[v];
    nodes.push_back(std::move(n));
  }
  json edges = json::array();
  for (const Edge& e : g.edges()) {
    edges.push_back({{"u", g.label(e.u)}, {"v", g.label(e.v)}, {"w", e.w}});
  }
  // One element per line keeps error line numbers meaningful after edits.
  std::string out = "{\n  \"nodes\": [\n";
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    out += "    " + nodes[i].dump() + (i + 1 < nodes.size() ? ",\n" : "\n");
  }
  out += "  ],\n  \"edges\": [\n";
  for (std::size_t i = 0; i < edges.size(); ++i) {
    out += "    " + edges[i].dump() + (i + 1 < edges.size() ? ",\n" : "\n");
  }
  out += "  ]\n}\n";
  return out;
}

void save_graph(const Graph& g, const std::filesystem::path& path) {
  write_text_file(path, graph_to_json(g));
}

}  // namespace sobograph
