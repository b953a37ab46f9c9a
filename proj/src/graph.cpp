#include "lpm/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

namespace lpm {

Graph Graph::from_edges(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges) {
    Graph g(n);
    for (auto [i, j] : edges) {
        if (i >= n || j >= n)
            throw ConfigError("edge (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range for n=" +
                              std::to_string(n));
        if (i == j) throw ConfigError("self-loop at node " + std::to_string(i));
        g.adj_[i].push_back(j);
        g.adj_[j].push_back(i);
    }
    std::size_t total = 0;
    for (auto& nb : g.adj_) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        total += nb.size();
    }
    g.m_und_ = total / 2;
    return g;
}

bool Graph::has_edge(NodeId i, NodeId j) const {
    const auto& nb = adj_[i];
    return std::binary_search(nb.begin(), nb.end(), j);
}

std::vector<std::pair<NodeId, NodeId>> Graph::edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(m_und_);
    for (NodeId i = 0; i < adj_.size(); ++i)
        for (NodeId j : adj_[i])
            if (i < j) out.emplace_back(i, j);
    return out;
}

void write_edge_list(const std::filesystem::path& path, const Graph& g) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << "# n=" << g.n() << "\n";
    for (auto [i, j] : g.edges()) os << i << " " << j << "\n";
}

Graph read_edge_list(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open graph file " + path.string());
    std::string line;
    long n = -1;
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto pos = line.find("n=");
            if (pos != std::string::npos) n = std::stol(line.substr(pos + 2));
            continue;
        }
        std::istringstream ls(line);
        long i = -1, j = -1;
        if (!(ls >> i >> j) || i < 0 || j < 0)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": malformed edge line");
        edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
    }
    if (n < 0) throw ConfigError(path.string() + ": missing '# n=<count>' header");
    return Graph::from_edges(static_cast<std::size_t>(n), edges);
}

}  // namespace lpm
