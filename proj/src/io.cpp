#include "islander/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "islander/errors.hpp"
#include "islander/graph.hpp"

namespace islander {

using nlohmann::json;

namespace {

std::size_t line_of(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

json parse_json(std::string_view text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(source, line_of(text, e.byte), "", e.what());
    }
}

BusLabel json_label(const json& value, const std::string& source, const std::string& field) {
    if (value.is_number_integer()) return value.get<BusLabel>();
    if (value.is_number_float()) {
        const double d = value.get<double>();
        if (std::floor(d) == d && std::abs(d) < 9.0e15) return static_cast<BusLabel>(d);
    }
    throw ParseError(source, 0, field, "expected an integer bus id");
}

std::string number_text(double v) { return json(v).dump(); }

// --- MATPOWER ---------------------------------------------------------------

struct MatrixRow {
    std::size_t line = 0;
    std::vector<double> values;
};

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::optional<std::vector<MatrixRow>> matpower_matrix(std::string_view text, std::string_view name,
                                                      const std::string& source) {
    const std::string key = "mpc." + std::string(name);
    std::size_t pos = 0;
    while ((pos = text.find(key, pos)) != std::string_view::npos) {
        const std::size_t after = pos + key.size();
        if ((pos > 0 && ident_char(text[pos - 1])) || (after < text.size() && ident_char(text[after]))) {
            pos = after;
            continue;
        }
        std::size_t i = after;
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size() || text[i] != '=') {
            pos = after;
            continue;
        }
        ++i;
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size() || text[i] != '[') {
            pos = after;
            continue;
        }
        ++i;

        std::vector<MatrixRow> rows;
        MatrixRow row;
        std::size_t line = line_of(text, i);
        row.line = line;
        auto flush = [&] {
            if (!row.values.empty()) rows.push_back(std::move(row));
            row = MatrixRow{};
            row.line = line;
        };
        while (true) {
            if (i >= text.size()) throw ParseError(source, line, key, "unterminated matrix");
            const char c = text[i];
            if (c == ']') break;
            if (c == '%') {
                while (i < text.size() && text[i] != '\n') ++i;
                continue;
            }
            if (c == '\n') {
                flush();
                ++line;
                row.line = line;
                ++i;
                continue;
            }
            if (c == ';') {
                flush();
                ++i;
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
                ++i;
                continue;
            }
            if (text.compare(i, 3, "...") == 0) {  // continuation
                while (i < text.size() && text[i] != '\n') ++i;
                ++line;
                ++i;
                continue;
            }
            std::size_t end = i;
            while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end])) && text[end] != ',' &&
                   text[end] != ';' && text[end] != ']' && text[end] != '%')
                ++end;
            std::string_view token = text.substr(i, end - i);
            double value = 0.0;
            const char* first = token.data();
            if (!token.empty() && token.front() == '+') ++first;
            const auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), value);
            if (ec != std::errc{} || ptr != token.data() + token.size())
                throw ParseError(source, line, fmt::format("{} column {}", key, row.values.size() + 1),
                                 fmt::format("not a number: '{}'", token));
            row.values.push_back(value);
            i = end;
        }
        flush();
        return rows;
    }
    return std::nullopt;
}

BusLabel integral_label(double v, const std::string& source, std::size_t line, const std::string& field) {
    if (!std::isfinite(v) || std::floor(v) != v) throw ParseError(source, line, field, "bus number is not an integer");
    return static_cast<BusLabel>(v);
}

}  // namespace

// --- native grid --------------------------------------------------------------

Grid parse_native_grid(std::string_view text, const std::string& source) {
    const json doc = parse_json(text, source);
    if (!doc.is_object()) throw ParseError(source, 0, "", "expected a JSON object");
    if (!doc.contains("nodes") || !doc["nodes"].is_array()) throw ParseError(source, 0, "nodes", "missing array");
    if (!doc.contains("edges") || !doc["edges"].is_array()) throw ParseError(source, 0, "edges", "missing array");

    GridSpec spec;
    const auto& nodes = doc["nodes"];
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const auto& n = nodes[k];
        const std::string field = fmt::format("nodes[{}]", k);
        if (!n.is_object() || !n.contains("id") || !n.contains("p"))
            throw ParseError(source, 0, field, "expected {\"id\", \"p\"}");
        if (!n["p"].is_number()) throw ParseError(source, 0, field + ".p", "expected a number");
        GridSpec::Node node{json_label(n["id"], source, field + ".id"), n["p"].get<double>(), std::nullopt};
        if (n.contains("kind")) {
            const auto kind = n["kind"].is_string() ? parse_node_kind(n["kind"].get<std::string>()) : std::nullopt;
            if (!kind) throw ParseError(source, 0, field + ".kind", "expected generator|load|passive");
            node.kind = kind;
        }
        spec.nodes.push_back(node);
    }
    const auto& edges = doc["edges"];
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const auto& e = edges[k];
        const std::string field = fmt::format("edges[{}]", k);
        if (!e.is_array() || e.size() != 2) throw ParseError(source, 0, field, "expected [i, j]");
        spec.edges.emplace_back(json_label(e[0], source, field), json_label(e[1], source, field));
    }
    return Grid::build(spec, DuplicateEdges::reject);
}

std::string dump_native_grid(const Grid& grid) {
    std::string out = "{\n  \"nodes\": [\n";
    for (const auto& n : grid.nodes()) {
        out += fmt::format("    {{\"id\": {}, \"p\": {}", n.label, number_text(n.p));
        if (n.kind != kind_from_power(n.p)) out += fmt::format(", \"kind\": \"{}\"", to_string(n.kind));
        out += n.id + 1 < grid.size() ? "},\n" : "}\n";
    }
    out += "  ],\n  \"edges\": [\n";
    const auto edges = grid.edges();
    for (std::size_t k = 0; k < edges.size(); ++k)
        out += fmt::format("    [{}, {}]{}\n", grid.label(edges[k].a), grid.label(edges[k].b),
                           k + 1 < edges.size() ? "," : "");
    out += "  ]\n}\n";
    return out;
}

// --- MATPOWER -----------------------------------------------------------------

Grid parse_matpower(std::string_view text, const std::string& source) {
    constexpr std::size_t BUS_I = 0, PD = 2;
    constexpr std::size_t GEN_BUS = 0, PG = 1, GEN_STATUS = 7;
    constexpr std::size_t F_BUS = 0, T_BUS = 1, BR_STATUS = 10;

    const auto bus = matpower_matrix(text, "bus", source);
    const auto gen = matpower_matrix(text, "gen", source);
    const auto branch = matpower_matrix(text, "branch", source);
    if (!bus) throw ParseError(source, 0, "mpc.bus", "matrix not found");
    if (!gen) throw ParseError(source, 0, "mpc.gen", "matrix not found");
    if (!branch) throw ParseError(source, 0, "mpc.branch", "matrix not found");

    GridSpec spec;
    std::map<BusLabel, std::size_t> position;
    for (const auto& row : *bus) {
        if (row.values.size() <= PD)
            throw ParseError(source, row.line, "mpc.bus", fmt::format("expected at least {} columns", PD + 1));
        const BusLabel label = integral_label(row.values[BUS_I], source, row.line, "mpc.bus BUS_I");
        if (!std::isfinite(row.values[PD])) throw ParseError(source, row.line, "mpc.bus PD", "not finite");
        if (!position.emplace(label, spec.nodes.size()).second)
            throw ParseError(source, row.line, "mpc.bus BUS_I", fmt::format("duplicate bus {}", label));
        spec.nodes.push_back({label, 0.0 - row.values[PD], std::nullopt});
    }

    std::vector<char> has_generator(spec.nodes.size(), 0);
    for (const auto& row : *gen) {
        if (row.values.size() <= GEN_STATUS)
            throw ParseError(source, row.line, "mpc.gen", fmt::format("expected at least {} columns", GEN_STATUS + 1));
        const BusLabel label = integral_label(row.values[GEN_BUS], source, row.line, "mpc.gen GEN_BUS");
        const auto it = position.find(label);
        if (it == position.end())
            throw ParseError(source, row.line, "mpc.gen GEN_BUS", fmt::format("unknown bus {}", label));
        if (row.values[GEN_STATUS] <= 0) continue;
        if (!std::isfinite(row.values[PG])) throw ParseError(source, row.line, "mpc.gen PG", "not finite");
        spec.nodes[it->second].p += row.values[PG];
        has_generator[it->second] = 1;
    }
    for (std::size_t k = 0; k < spec.nodes.size(); ++k) {
        auto& node = spec.nodes[k];
        node.kind = has_generator[k] ? NodeKind::generator : kind_from_power(node.p);
    }

    for (const auto& row : *branch) {
        if (row.values.size() <= BR_STATUS)
            throw ParseError(source, row.line, "mpc.branch", fmt::format("expected at least {} columns", BR_STATUS + 1));
        const BusLabel f = integral_label(row.values[F_BUS], source, row.line, "mpc.branch F_BUS");
        const BusLabel t = integral_label(row.values[T_BUS], source, row.line, "mpc.branch T_BUS");
        if (!position.contains(f) || !position.contains(t))
            throw ParseError(source, row.line, "mpc.branch", fmt::format("branch {}-{} references an unknown bus", f, t));
        if (row.values[BR_STATUS] <= 0) continue;
        if (f == t) continue;  // a zero-length branch does not change topology
        spec.edges.emplace_back(f, t);
    }
    return Grid::build(spec, DuplicateEdges::collapse);
}

// --- files --------------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(fmt::format("write failed: {}", path.string()));
}

Grid load_grid(const std::filesystem::path& path, GridFormat format) {
    const std::string text = read_text_file(path);
    return format == GridFormat::matpower ? parse_matpower(text, path.string()) : parse_native_grid(text, path.string());
}

Grid load_grid(const std::filesystem::path& path) {
    return load_grid(path, path.extension() == ".m" ? GridFormat::matpower : GridFormat::native);
}

void save_grid(const Grid& grid, const std::filesystem::path& path) { write_text_file(path, dump_native_grid(grid)); }

// --- partitions ---------------------------------------------------------------

Partition parse_partition(const Grid& grid, std::string_view text, const std::string& source) {
    const json doc = parse_json(text, source);
    if (!doc.is_object() || doc.empty()) throw ParseError(source, 0, "", "expected {\"<island>\": [bus, ...]}");
    std::vector<std::vector<NodeId>> islands(doc.size());
    std::vector<char> present(doc.size(), 0);
    for (const auto& [key, members] : doc.items()) {
        std::size_t index = 0;
        const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), index);
        if (ec != std::errc{} || ptr != key.data() + key.size() || index >= doc.size() || present[index])
            throw ParseError(source, 0, key, fmt::format("island keys must be 0..{}", doc.size() - 1));
        present[index] = 1;
        if (!members.is_array()) throw ParseError(source, 0, key, "expected an array of bus ids");
        for (const auto& m : members) {
            const BusLabel label = json_label(m, source, key);
            const auto id = grid.find(label);
            if (!id) throw PartitionError(fmt::format("{}: island {} lists unknown bus {}", source, key, label));
            islands[index].push_back(*id);
        }
    }
    return Partition::from_islands(grid, islands);
}

std::string dump_partition(const Grid& grid, const Partition& part) {
    const auto islands = part.islands();
    std::string out = "{\n";
    for (std::size_t l = 0; l < islands.size(); ++l) {
        out += fmt::format("  \"{}\": [", l);
        for (std::size_t k = 0; k < islands[l].size(); ++k)
            out += fmt::format("{}{}", k ? ", " : "", grid.label(islands[l][k]));
        out += l + 1 < islands.size() ? "],\n" : "]\n";
    }
    out += "}\n";
    return out;
}

Partition load_partition(const Grid& grid, const std::filesystem::path& path) {
    return parse_partition(grid, read_text_file(path), path.string());
}

// --- cut-sets -----------------------------------------------------------------

std::vector<std::pair<BusLabel, BusLabel>> parse_cut_set(std::string_view text, const std::string& source) {
    std::vector<std::pair<BusLabel, BusLabel>> out;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        ++line_no;
        start = end + 1;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (std::isspace(static_cast<unsigned char>(line[i])) || line[i] == ',')) ++i;
            if (i >= line.size()) break;
            std::size_t j = i;
            while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line[j] != ',') ++j;
            const std::string_view token = line.substr(i, j - i);
            const auto dash = token.find('-', 1);
            BusLabel a = 0, b = 0;
            bool ok = dash != std::string_view::npos;
            if (ok) {
                const auto ra = std::from_chars(token.data(), token.data() + dash, a);
                const auto rb = std::from_chars(token.data() + dash + 1, token.data() + token.size(), b);
                ok = ra.ec == std::errc{} && ra.ptr == token.data() + dash && rb.ec == std::errc{} &&
                     rb.ptr == token.data() + token.size();
            }
            if (!ok) throw ParseError(source, line_no, "", fmt::format("expected 'i-j', got '{}'", token));
            out.emplace_back(a, b);
            i = j;
        }
        if (end == text.size()) break;
    }
    return out;
}

std::vector<std::pair<BusLabel, BusLabel>> load_cut_set(const std::filesystem::path& path) {
    return parse_cut_set(read_text_file(path), path.string());
}

std::string format_edge(const Grid& grid, const Edge& edge) {
    const BusLabel a = grid.label(edge.a);
    const BusLabel b = grid.label(edge.b);
    return fmt::format("{}-{}", std::min(a, b), std::max(a, b));
}

std::string format_cut_set(const Grid& grid, std::span<const Edge> edges) {
    std::vector<std::pair<BusLabel, BusLabel>> labelled;
    for (const auto& e : edges)
        labelled.emplace_back(std::min(grid.label(e.a), grid.label(e.b)), std::max(grid.label(e.a), grid.label(e.b)));
    std::sort(labelled.begin(), labelled.end());
    std::string out;
    for (const auto& [a, b] : labelled) out += fmt::format("{}-{}\n", a, b);
    return out;
}

}  // namespace islander
