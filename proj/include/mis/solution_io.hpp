#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "mis/graph.hpp"
#include "mis/graph_io.hpp"

namespace mis {

// Solution file: one vertex id per line in ascending order, then a trailing
// "# size k" line so the count can be read without parsing the whole file.
inline void write_solution(std::ostream& out, const VertexSet& solution) {
    solution.for_each([&](NodeID v) { out << v << '\n'; });
    out << "# size " << solution.size() << '\n';
}

inline void write_solution_file(const std::string& path, const VertexSet& solution) {
    std::ofstream out(path);
    if (!out) throw GraphError("cannot open " + path + " for writing");
    write_solution(out, solution);
}

inline std::vector<NodeID> read_solution(std::istream& in) {
    std::vector<NodeID> vertices;
    std::string line;
    std::vector<std::int64_t> fields;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line[0] == '#') continue;
        if (!detail::parse_fields(line, fields))
            throw ParseError(line_no, "malformed solution line");
        if (fields.empty()) continue;
        if (fields.size() != 1 || fields[0] < 0)
            throw ParseError(line_no, "expected a single vertex id");
        vertices.push_back(static_cast<NodeID>(fields[0]));
    }
    return vertices;
}

struct ImprovementPoint {
    double t_seconds = 0.0;
    std::int64_t size = 0;
    int level = 0;
};

inline void write_convergence(std::ostream& out, const std::vector<ImprovementPoint>& points) {
    out << "t_seconds,size,level\n";
    char buf[64];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof(buf), "%.6f", p.t_seconds);
        out << buf << ',' << p.size << ',' << p.level << '\n';
    }
}

}  // namespace mis
