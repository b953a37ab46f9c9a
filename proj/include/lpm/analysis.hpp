#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lpm/graph.hpp"
#include "lpm/link.hpp"
#include "lpm/partition.hpp"
#include "lpm/sampler.hpp"
#include "lpm/types.hpp"

namespace lpm {

/// Constants of the analytic log-link bound: |D^alpha g| <= M_g alpha! rho_g^-|alpha|.
struct BoundParams {
    double mg = 1.0;
    double rho = 1.0;

    double bg() const { return 2.0 / rho; }
};

struct TaylorBound {
    double r = 0.0;   // n(n-1)/2 M_g (B_g b)^(kappa+1)
    double tv = 0.0;  // exp(2 r) - 1
};

/// Deterministic bound on |L~ - L| over S_{a,b}. Overflow gives +infinity.
/// ConfigError for n < 1, kappa < 0, b < 0, M_g < 0 or rho <= 0.
TaylorBound taylor_error_bound(std::size_t n, int kappa, double b, const BoundParams& bp);

/// |L~(tau) - L(tau)| with both sides computed from scratch.
double empirical_taylor_error(const Graph& g, const Embedding& tau, const LinkParams& theta, const Partition& part,
                              int kappa);

struct AlignedEmbedding {
    std::array<double, 4> rotation{1, 0, 0, 1};  // row-major 2x2
    Point translation;
    double scale = 1.0;
    Embedding points;
    double mse = 0.0;  // mean over points of the squared residual norm
};

/// Orthogonal map (rotation or reflection), translation and optionally a
/// scale minimizing sum |s R x_i + t - y_i|^2. ConfigError for unequal sizes
/// or fewer than two points.
AlignedEmbedding procrustes_align(const Embedding& x, const Embedding& y, bool allow_scale = false);

/// Applies an alignment to other points.
Embedding apply_alignment(const AlignedEmbedding& a, const Embedding& x);

/// Pointwise mean of sampled embeddings. ConfigError when empty.
Embedding posterior_mean(const std::vector<Sample>& samples);
LinkParams posterior_mean_theta(const std::vector<Sample>& samples);

/// Procrustes-aligns the posterior mean of a onto that of b and returns the MSE.
double posterior_mean_mse(const std::vector<Sample>& a, const std::vector<Sample>& b, bool allow_scale = false);

struct GridSpec {
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    int nx = 100, ny = 100;

    Point cell(int ix, int iy) const {
        return {x0 + (ix + 0.5) * (x1 - x0) / nx, y0 + (iy + 0.5) * (y1 - y0) / ny};
    }
};

enum class Evaluator { exact, fast, faster };

Evaluator parse_evaluator(const std::string& s);
std::string to_string(Evaluator e);

struct ContourOptions {
    Evaluator evaluator = Evaluator::exact;
    int kappa = 4;       // fast only; faster uses 1
    double b = 0.1;      // box side of the partition built from tau_frozen
    bool truncate = false;
    TruncGaussPrior prior;
};

struct ContourGrid {
    GridSpec grid;
    std::vector<double> log_density;  // ix-major, unnormalized
    std::vector<double> prob;         // sums to one
};

/// Conditional density of tau_node on a grid with every other position
/// fixed, normalized by log-sum-exp. ConfigError if the grid leaves the
/// prior's domain.
ContourGrid single_node_contour(const Graph& g, const Embedding& tau_frozen, NodeId node, const LinkParams& theta,
                                const GridSpec& grid, const ContourOptions& opts = {});

struct Peers {
    NodeId center = 0;
    std::array<NodeId, 3> nodes{};  // nearby, intermediate, well separated
};

/// Terciles of true distance from center; the median node of each tercile.
Peers select_peers(const Embedding& truth, NodeId center);
/// Center drawn uniformly from the seed, then select_peers.
Peers select_peers_seeded(const Embedding& truth, std::uint64_t seed);

struct RankSummary {
    double mean = 0.0, q05 = 0.0, q50 = 0.0, q95 = 0.0;
};

struct DistanceStats {
    NodeId center = 0;
    std::vector<NodeId> peers;
    std::vector<std::vector<double>> distances;  // [peer][sample]
    std::vector<RankSummary> order_stats;        // [rank - 1], nearest first
};

/// Per-sample distances from the center to each peer, and the sorted
/// distances to all other nodes summarized by rank (up to max_rank).
/// ConfigError for fewer than two samples.
DistanceStats distance_statistics(const std::vector<Sample>& samples, NodeId center, const std::vector<NodeId>& peers,
                                  std::size_t max_rank = 20);

/// Gaussian KDE with Silverman's bandwidth, evaluated at `at`.
std::vector<double> gaussian_kde(const std::vector<double>& values, const std::vector<double>& at);
double silverman_bandwidth(const std::vector<double>& values);

/// Linear-interpolated quantile of unsorted values, q in [0, 1].
double quantile(std::vector<double> values, double q);

struct BenchSpec {
    Algo algo = Algo::faster;
    std::vector<std::size_t> sizes{2000, 4000};
    double density = 0.0;  // edge probability; <= 0 samples the graph from the model
    double b = 0.1;
    int kappa = 1;
    std::size_t sweeps = 5;
    std::size_t warmup = 1;
    std::size_t repeats = 3;
    std::uint64_t seed = 1;
};

struct BenchRow {
    Algo algo = Algo::faster;
    std::size_t n = 0, K = 0;
    int kappa = 0;
    double b = 0.0;
    double median_sweep_ms = 0.0;
    std::size_t reps = 0;
};

/// Median wall-clock time per sweep for each size. Positions are drawn from
/// the prior and the partition built from them, so K is fixed by b.
std::vector<BenchRow> bench_sweep(const BenchSpec& spec);

}  // namespace lpm
