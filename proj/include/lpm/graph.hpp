#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "lpm/types.hpp"

namespace lpm {

/// Undirected simple graph. Each undirected edge is stored once per endpoint,
/// so iterating every adjacency list visits the directed pair set.
class Graph {
public:
    Graph() = default;
    explicit Graph(std::size_t n) : adj_(n) {}

    /// Deduplicates repeated and reversed pairs; throws ConfigError on
    /// self-loops or out-of-range ids.
    static Graph from_edges(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges);

    std::size_t n() const { return adj_.size(); }
    std::size_t m_und() const { return m_und_; }
    std::size_t directed_edge_count() const { return 2 * m_und_; }

    std::span<const NodeId> neighbors(NodeId i) const { return adj_[i]; }
    std::size_t degree(NodeId i) const { return adj_[i].size(); }
    bool has_edge(NodeId i, NodeId j) const;

    /// Each undirected edge once, with first < second.
    std::vector<std::pair<NodeId, NodeId>> edges() const;

private:
    std::vector<std::vector<NodeId>> adj_;
    std::size_t m_und_ = 0;
};

/// Plain-text edge list: a `# n=<count>` header, then one "i j" pair per line.
void write_edge_list(const std::filesystem::path& path, const Graph& g);
/// Throws ConfigError when the file is missing or malformed.
Graph read_edge_list(const std::filesystem::path& path);

}  // namespace lpm
