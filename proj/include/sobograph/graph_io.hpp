#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "sobograph/graph.hpp"

namespace sobograph {

// Graph files are JSON:
//   { "nodes": [{"id": label, "coords": [..]}], "edges": [{"u": label, "v": label, "w": real}] }
// Labels may be JSON strings or integers. Node order in the file defines
// dense ids.

Graph parse_graph_json(std::string_view text);
Graph load_graph(const std::filesystem::path& path);
std::string graph_to_json(const Graph& g);
void save_graph(const Graph& g, const std::filesystem::path& path);

/// Reads the whole file or throws IoError.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace sobograph
