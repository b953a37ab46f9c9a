#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "lpm/graph.hpp"
#include "lpm/types.hpp"

namespace lpm {

/// Grid key (g, h) = (zx / 3, zy / 3) stored as the integers (zx, zy).
/// The box with this key is centered at (b g - b/2, b h - b/2).
struct BoxKey {
    int zx = 0;
    int zy = 0;

    double g() const { return zx / 3.0; }
    double h() const { return zy / 3.0; }
    friend bool operator==(const BoxKey&, const BoxKey&) = default;
    friend auto operator<=>(const BoxKey&, const BoxKey&) = default;
};

Point box_center(BoxKey key, double b);

/// Key minimizing the sup-norm distance from p to the box center, ties broken
/// by smallest g, then smallest h.
BoxKey box_assign(Point p, double b);

struct Partition {
    std::vector<BlockId> assign;
    std::vector<std::size_t> block_sizes;
    std::vector<BoxKey> box_keys;  // empty unless built from boxes
    double b = 0.0;

    std::size_t n() const { return assign.size(); }
    std::size_t K() const { return block_sizes.size(); }
    /// Node ids of each block in increasing order.
    std::vector<std::vector<NodeId>> members() const;

    static Partition singletons(std::size_t n);
    /// Blocks must be numbered 0..K-1 and all nonempty (ConfigError otherwise).
    static Partition from_assignment(std::vector<BlockId> assign);
};

/// Assigns every node with box_assign, drops empty boxes and numbers blocks
/// in order of first occurrence by node index.
Partition build_partition(const Embedding& tau, double b);

/// Largest distance between two nodes sharing a block.
double max_intra_block_distance(const Embedding& tau, const Partition& part);

/// True iff every intra-block pair is within distance b.
bool is_b_good(const Embedding& tau, const Partition& part, double b);

struct SpectralOptions {
    double tol = 1e-8;
    int max_iter = 5000;
};

/// Two leading nontrivial eigenvectors of D^{-1/2}(A + I)D^{-1/2}, scaled by
/// their eigenvalues and rescaled into the unit square. Only components at
/// least half the size of the largest one are embedded; nodes of smaller
/// components are placed at the square's center. Throws DegenerateInputError
/// for n < 3.
Embedding spectral_embed(const Graph& g, const SpectralOptions& opts = {});

/// CSV `node_id,block_id` plus a JSON sidecar with b, K and the box keys.
void write_partition(const std::filesystem::path& csv, const Partition& part);
Partition read_partition(const std::filesystem::path& csv);

}  // namespace lpm
