#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sbmsel/errors.hpp"
#include "sbmsel/graph.hpp"

namespace sbmsel {

struct EdgeListReport {
    Graph graph;
    int self_loops_dropped = 0;
    int isolated_removed = 0;
    std::vector<int> original_ids;  // compacted id -> original id
};

// Whitespace-separated "<u> <v>" per line, 0-based ids, '#' comments.
// Duplicates (either orientation) collapse; self-loops are dropped and
// counted. With remove_isolated, nodes of degree zero are removed and ids
// compacted, matching the real-network preprocessing workflow.
inline EdgeListReport read_edge_list_report(std::istream& in, bool remove_isolated = true) {
    std::vector<std::pair<int, int>> edges;
    int max_id = -1;
    int self_loops = 0;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv(line);
        const auto first = sv.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || sv[first] == '#') continue;
        std::istringstream ls(line);
        long long u, v;
        if (!(ls >> u >> v) || u < 0 || v < 0)
            throw parse_error("edge list: malformed line " + std::to_string(line_no));
        std::string trailing;
        if (ls >> trailing && !trailing.empty() && trailing[0] != '#')
            throw parse_error("edge list: trailing tokens on line " + std::to_string(line_no));
        if (u == v) { ++self_loops; continue; }
        max_id = std::max(max_id, static_cast<int>(std::max(u, v)));
        edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
    }
    if (edges.empty()) throw std::invalid_argument("edge list: empty graph");

    EdgeListReport rep;
    rep.self_loops_dropped = self_loops;
    if (!remove_isolated) {
        rep.graph = Graph(max_id + 1, std::move(edges));
        rep.original_ids.resize(max_id + 1);
        for (int i = 0; i <= max_id; ++i) rep.original_ids[i] = i;
        return rep;
    }
    std::vector<int> remap(max_id + 1, -1);
    for (auto [u, v] : edges) remap[u] = remap[v] = 0;
    int next = 0;
    for (int i = 0; i <= max_id; ++i) {
        if (remap[i] == 0) {
            remap[i] = next++;
            rep.original_ids.push_back(i);
        } else {
            ++rep.isolated_removed;
        }
    }
    for (auto& [u, v] : edges) { u = remap[u]; v = remap[v]; }
    rep.graph = Graph(next, std::move(edges));
    return rep;
}

inline EdgeListReport read_edge_list_report(const std::string& path,
                                            bool remove_isolated = true) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("edge list: cannot open " + path);
    return read_edge_list_report(in, remove_isolated);
}

inline Graph read_edge_list(const std::string& path, bool remove_isolated = true) {
    return read_edge_list_report(path, remove_isolated).graph;
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
    for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

inline void write_edge_list(const std::string& path, const Graph& g) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("edge list: cannot open " + path + " for writing");
    write_edge_list(out, g);
}

} // namespace sbmsel
