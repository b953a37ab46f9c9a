#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "lpm/graph.hpp"
#include "lpm/link.hpp"
#include "lpm/multi_index.hpp"
#include "lpm/partition.hpp"
#include "lpm/types.hpp"

namespace lpm {

enum class MomentMode : std::uint32_t { full = 0, first_order = 1 };

/// E_{i,t}: number of neighbors of node i in block t, stored densely n x K.
struct BlockEdgeCounts {
    std::size_t n = 0;
    std::size_t K = 0;
    std::vector<std::uint32_t> counts;

    std::uint32_t operator()(NodeId i, BlockId t) const { return counts[i * K + t]; }
    std::span<const std::uint32_t> row(NodeId i) const { return {counts.data() + i * K, K}; }
};

BlockEdgeCounts precompute_block_edge_counts(const Graph& g, const Partition& part);

/// Block moments of an embedding under a fixed partition.
///
///   m1[s][t][a]  sum over directed edges (i, j), a(i)=s, a(j)=t, of tau_i^(a1,a2) tau_j^(a3,a4)
///   mc[s][t][a]  the same sum over all ordered pairs i != j
///   q1[i][t][g]  sum over neighbors j of i in block t of tau_j^g   (full mode only)
///   qc[t][g]     sum over nodes j in block t of tau_j^g
///
/// Pair-indexed arrays are dense (s, t, alpha) with alpha in the canonical
/// order of the index set; both orientations (s, t) and (t, s) are stored.
/// In first-order mode the index set has order 1.
class MomentStore {
public:
    std::shared_ptr<const MultiIndexSet> idx;
    MomentMode mode = MomentMode::full;
    std::vector<BlockId> assign;
    std::vector<std::size_t> block_sizes;
    Embedding points;
    std::vector<double> m1, mc, q1, qc;
    /// Low-order parts of q1 and qc: the running sums are kept in
    /// double-double precision and q1, qc hold their rounded values.
    std::vector<double> q1_lo, qc_lo;
    std::vector<Point> centers;
    std::uint64_t revision = 0;

    std::size_t n() const { return assign.size(); }
    std::size_t K() const { return block_sizes.size(); }
    std::size_t A() const { return idx->size(); }
    std::size_t P() const { return idx->proj_size(); }
    int kappa() const { return idx->kappa(); }

    std::span<const double> m1_slice(BlockId s, BlockId t) const { return {m1.data() + (s * K() + t) * A(), A()}; }
    std::span<const double> mc_slice(BlockId s, BlockId t) const { return {mc.data() + (s * K() + t) * A(), A()}; }
    std::span<const double> q1_slice(NodeId i, BlockId t) const { return {q1.data() + (i * K() + t) * P(), P()}; }
    std::span<const double> qc_slice(BlockId t) const { return {qc.data() + t * P(), P()}; }

    /// M0 = Mc - M1, the moments over non-adjacent ordered pairs.
    double m0(BlockId s, BlockId t, std::size_t a) const {
        const std::size_t o = (s * K() + t) * A() + a;
        return mc[o] - m1[o];
    }
    /// Q0[i][t][g] = Qc[t][g] - Q1[i][t][g] - 1{a(i)=t} tau_i^g.
    double q0(NodeId i, BlockId t, std::size_t g) const;
};

/// Builds every moment family from scratch. O(|E| P + n K A + K^2 A).
MomentStore initialize_qm(const Embedding& tau, const Graph& g, const Partition& part,
                          std::shared_ptr<const MultiIndexSet> idx);

/// First-order store from per-node block edge counts; no q1 is kept.
MomentStore initialize_m(const Embedding& tau, const Graph& g, const Partition& part,
                         const BlockEdgeCounts& counts);

/// T = sum_alpha c_alpha sum_{beta <= alpha} C(alpha, beta) (-Y)^(alpha - beta) M_beta
/// with Y = (ys, yt) and c the jet coefficients.
double taylor_block_sum(std::span<const double> jet, Point ys, Point yt, std::span<const double> m,
                        const PairIndex& idx);

/// Per ordered block pair Taylor terms T1 = T(g1, M1) and T0 = T(g0, Mc - M1).
struct BlockTermCache {
    std::size_t K = 0;
    std::vector<double> t1, t0;

    double total(BlockId s, BlockId t) const { return t1[s * K + t] + t0[s * K + t]; }
};

/// Evaluates block terms for one theta. Uses the difference-variable
/// reduction when the link supports it, otherwise the four-variable jet.
/// Holds scratch buffers: one evaluator per thread.
class BlockTermEvaluator {
public:
    /// automatic picks a compiled fixed-order kernel when one exists for the
    /// link and order, else table; table is the difference-variable reduction
    /// driven by index tables; generic uses four-variable jets.
    enum class Route { automatic, table, generic };

    BlockTermEvaluator(std::shared_ptr<const MultiIndexSet> idx, const LinkFunction& link, const LinkParams& theta,
                       Route route = Route::automatic);

    const LinkParams& theta() const { return theta_; }
    void set_theta(const LinkParams& theta) { theta_ = theta; }
    bool reduced() const { return reduced_; }
    bool fixed_order() const { return fixed_ != nullptr; }

    /// t1 = T(g1, ys, yt, m1), t0 = T(g0, ys, yt, mc - m1).
    void terms(Point ys, Point yt, std::span<const double> m1, std::span<const double> mc, double& t1,
               double& t0);

private:
    std::shared_ptr<const MultiIndexSet> idx_;
    const LinkFunction* link_;
    LinkParams theta_;
    bool reduced_;
    void (*fixed_)(const LinkParams&, Point, const double*, const double*, double&, double&) = nullptr;
    std::vector<double> h1_, h0_, hat1_, hat0_, n1_, n0_, jet1_, jet0_, m0_, dcoef_;
};

/// Fills every cache entry for the store's current state and returns L~.
double compute_block_terms(const MomentStore& store, const LinkParams& theta, BlockTermCache& cache,
                           const LinkFunction& link = gaussian_link());

/// L~ = 1/2 sum_{s,t} [T(g1, M1_{s,t}) + T(g0, Mc_{s,t} - M1_{s,t})].
double approx_log_likelihood(const MomentStore& store, const LinkParams& theta,
                             const LinkFunction& link = gaussian_link());

namespace serial {
/// Literal K^2 double sum over four-variable jets; the reference for the above.
double approx_log_likelihood(const MomentStore& store, const LinkParams& theta,
                             const LinkFunction& link = gaussian_link());
}

/// A proposed move of node k to new_point, expressed as the new values of the
/// affected row M[r][.] (r = a(k)) and the increments of the point moments.
/// Column entries M[.][r] follow by symmetry.
struct ProposedDeltas {
    NodeId k = 0;
    BlockId r = 0;
    Point old_point, new_point;
    std::uint64_t revision = 0;
    std::vector<double> dtau;            // (new)^g - (old)^g over the projected index
    std::vector<double> mono_old, mono_new;
    std::vector<double> qc_row;          // Qc[r] after the move
    std::vector<double> m1_row, mc_row;  // K x A new values of M1[r][t], Mc[r][t]
    Point new_center;
    std::vector<double> t1_row, t0_row;  // new block terms for (r, t)
    double delta_ltilde = 0.0;
    bool has_terms = false;
};

/// Increments Delta tau_k for all projected indices.
void compute_dtau(const MomentStore& store, NodeId k, Point new_point, ProposedDeltas& out);

/// Q-family changes of a move: q1[j][r] += dtau for every neighbor j of k and
/// qc[r] += dtau. They are applied by commit; this only prepares dtau.
ProposedDeltas update_q(const MomentStore& store, NodeId k, Point new_point, const Graph& g);

/// Full-mode M update and Delta L~ over the affected block pairs. Reads the
/// current q1/qc. When cache is null the old terms are recomputed.
void update_m(const MomentStore& store, NodeId k, Point new_point, BlockTermEvaluator& eval,
              const BlockTermCache* cache, ProposedDeltas& out);

/// First-order counterpart driven by block edge counts. ModeError in full mode.
void update_m2(const MomentStore& store, NodeId k, Point new_point, const BlockEdgeCounts& counts,
               BlockTermEvaluator& eval, const BlockTermCache* cache, ProposedDeltas& out);

/// Convenience: dtau, then update_m or update_m2 by mode.
ProposedDeltas propose_move(const MomentStore& store, NodeId k, Point new_point, BlockTermEvaluator& eval,
                            const BlockTermCache* cache, const BlockEdgeCounts* counts = nullptr);
/// Same, reusing the buffers of out.
void propose_move(const MomentStore& store, NodeId k, Point new_point, BlockTermEvaluator& eval,
                  const BlockTermCache* cache, const BlockEdgeCounts* counts, ProposedDeltas& out);

/// Applies a proposal. ConsistencyError when the store changed since the
/// proposal was made. Updates the cache rows/columns and adds delta_ltilde to
/// *ltilde when given.
void commit(MomentStore& store, const ProposedDeltas& deltas, const Graph& g, BlockTermCache* cache = nullptr,
            double* ltilde = nullptr);

/// Debug dump: `<prefix>.bin` (16-byte header: "LPMS", kappa, K, mode as
/// uint32, then m1, mc, qc, q1 as little-endian doubles) and `<prefix>.json`.
void write_moment_dump(const std::filesystem::path& prefix, const MomentStore& store);
MomentStore read_moment_dump(const std::filesystem::path& prefix);

}  // namespace lpm
