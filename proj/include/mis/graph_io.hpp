#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mis/graph.hpp"

namespace mis {

struct ParseError : std::runtime_error {
    int line = 0;
    ParseError(int line_no, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

namespace detail {

inline bool parse_fields(std::string_view s, std::vector<std::int64_t>& out) {
    out.clear();
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        if (i >= s.size()) break;
        std::int64_t value = 0;
        const auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + s.size(), value);
        if (ec != std::errc{}) return false;
        const std::size_t end = static_cast<std::size_t>(ptr - s.data());
        if (end < s.size() && s[end] != ' ' && s[end] != '\t' && s[end] != '\r') return false;
        out.push_back(value);
        i = end;
    }
    return true;
}

}  // namespace detail

// METIS graph format: '%' comment lines, header "n m [fmt]", then line i holds
// the 1-indexed neighbors of vertex i. Only unweighted graphs are accepted.
inline Graph load_metis(std::istream& in) {
    std::string line;
    std::vector<std::int64_t> fields;
    int line_no = 0;

    NodeID n = 0;
    std::int64_t m = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line[0] == '%') continue;
        if (!detail::parse_fields(line, fields) || fields.size() < 2 || fields.size() > 3)
            throw ParseError(line_no, "malformed header, expected \"n m [fmt]\"");
        if (fields[0] < 0 || fields[1] < 0)
            throw ParseError(line_no, "negative count in header");
        if (fields.size() == 3 && fields[2] != 0)
            throw ParseError(line_no, "weighted graphs are not supported (fmt must be 0)");
        n = static_cast<NodeID>(fields[0]);
        m = fields[1];
        have_header = true;
        break;
    }
    if (!have_header) throw ParseError(line_no, "missing header");

    std::vector<std::vector<NodeID>> adj(static_cast<std::size_t>(n));
    std::vector<int> line_of(static_cast<std::size_t>(n), 0);
    NodeID v = 0;
    while (v < n) {
        if (!std::getline(in, line))
            throw ParseError(line_no, "unexpected end of file, expected " + std::to_string(n) +
                                          " adjacency lines");
        ++line_no;
        if (!line.empty() && line[0] == '%') continue;
        if (!detail::parse_fields(line, fields))
            throw ParseError(line_no, "malformed adjacency line");
        for (std::int64_t u1 : fields) {
            if (u1 < 1 || u1 > n)
                throw ParseError(line_no, "neighbor id " + std::to_string(u1) +
                                              " out of range [1," + std::to_string(n) + "]");
            const NodeID u = static_cast<NodeID>(u1 - 1);
            if (u == v) throw ParseError(line_no, "self-loop at vertex " + std::to_string(u1));
            adj[static_cast<std::size_t>(v)].push_back(u);
        }
        line_of[static_cast<std::size_t>(v)] = line_no;
        ++v;
    }

    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    for (NodeID a = 0; a < n; ++a) {
        for (NodeID b : adj[static_cast<std::size_t>(a)]) {
            const auto& back = adj[static_cast<std::size_t>(b)];
            if (!std::binary_search(back.begin(), back.end(), a))
                throw ParseError(line_of[static_cast<std::size_t>(a)],
                                 "asymmetric adjacency: vertex " + std::to_string(a + 1) +
                                     " lists " + std::to_string(b + 1) + " but not vice versa");
        }
    }

    Graph g = Graph::from_adjacency(std::move(adj));
    if (g.num_edges() != m)
        throw ParseError(line_no, "header claims " + std::to_string(m) + " edges but " +
                                      std::to_string(g.num_edges()) + " were read");
    return g;
}

inline void write_metis(std::ostream& out, const Graph& g) {
    out << g.num_vertices() << ' ' << g.num_edges() << '\n';
    for (NodeID v = 0; v < g.num_vertices(); ++v) {
        bool first = true;
        for (NodeID u : g.neighbors(v)) {
            if (!first) out << ' ';
            out << (u + 1);
            first = false;
        }
        out << '\n';
    }
}

// Edge list: one "u v" pair per line, 0-indexed, '#' comments. The vertex
// count is the largest endpoint plus one.
inline Graph load_edge_list(std::istream& in) {
    std::string line;
    std::vector<std::int64_t> fields;
    std::vector<std::pair<NodeID, NodeID>> edges;
    int line_no = 0;
    NodeID n = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line[0] == '#') continue;
        if (!detail::parse_fields(line, fields))
            throw ParseError(line_no, "malformed edge line");
        if (fields.empty()) continue;
        if (fields.size() != 2) throw ParseError(line_no, "expected \"u v\"");
        if (fields[0] < 0 || fields[1] < 0)
            throw ParseError(line_no, "negative vertex id");
        if (fields[0] == fields[1])
            throw ParseError(line_no, "self-loop at vertex " + std::to_string(fields[0]));
        const NodeID u = static_cast<NodeID>(fields[0]);
        const NodeID v = static_cast<NodeID>(fields[1]);
        edges.emplace_back(u, v);
        n = std::max(n, static_cast<NodeID>(std::max(u, v) + 1));
    }
    return Graph::from_edge_list(n, edges);
}

inline Graph load_graph_file(const std::string& path, const std::string& format) {
    std::ifstream in(path);
    if (!in) throw GraphError("cannot open " + path);
    if (format == "metis") return load_metis(in);
    if (format == "edgelist") return load_edge_list(in);
    throw GraphError("unknown graph format: " + format);
}

inline std::string to_metis_string(const Graph& g) {
    std::ostringstream out;
    write_metis(out, g);
    return out.str();
}

}  // namespace mis
