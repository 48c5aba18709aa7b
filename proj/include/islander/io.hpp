#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "islander/grid.hpp"
#include "islander/partition.hpp"

namespace islander {

enum class GridFormat { native, matpower };

/// Native grid document:
///   {"nodes": [{"id": <bus>, "p": <MW>[, "kind": ...]}, ...],
///    "edges": [[<bus>, <bus>], ...]}
/// "kind" is written only when it differs from the sign of p.
Grid parse_native_grid(std::string_view text, const std::string& source = "<native>");
std::string dump_native_grid(const Grid& grid);

/// Reads the bus, gen and branch matrices of a MATPOWER case file.
/// p_i = sum of in-service PG at bus i minus PD_i. Parallel branches collapse,
/// out-of-service branches are dropped.
Grid parse_matpower(std::string_view text, const std::string& source = "<matpower>");

Grid load_grid(const std::filesystem::path& path, GridFormat format);
/// Picks matpower for a ".m" extension, native otherwise.
Grid load_grid(const std::filesystem::path& path);
void save_grid(const Grid& grid, const std::filesystem::path& path);

/// Partition document: {"<island index>": [<bus>, ...], ...}
Partition parse_partition(const Grid& grid, std::string_view text, const std::string& source = "<partition>");
std::string dump_partition(const Grid& grid, const Partition& part);
Partition load_partition(const Grid& grid, const std::filesystem::path& path);

/// Cut-set text: one "i-j" bus pair per line, '#' starts a comment.
std::vector<std::pair<BusLabel, BusLabel>> parse_cut_set(std::string_view text,
                                                         const std::string& source = "<cut-set>");
std::vector<std::pair<BusLabel, BusLabel>> load_cut_set(const std::filesystem::path& path);
std::string format_cut_set(const Grid& grid, std::span<const Edge> edges);
/// "i-j" with bus labels.
std::string format_edge(const Grid& grid, const Edge& edge);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace islander
