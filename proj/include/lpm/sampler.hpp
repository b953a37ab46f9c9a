#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lpm/graph.hpp"
#include "lpm/link.hpp"
#include "lpm/model.hpp"
#include "lpm/moments.hpp"
#include "lpm/partition.hpp"
#include "lpm/types.hpp"

namespace lpm {

enum class Algo { exact, fast, faster };

std::string to_string(Algo a);
/// Parses "exact", "fast" or "faster"; ConfigError otherwise.
Algo parse_algo(const std::string& s);

/// Uniform prior on an axis-aligned box of link parameters, restricted to
/// the valid set (beta0 + beta1 < 1, sigma above the minimum).
struct ThetaBox {
    LinkParams lo{0.01, 0.05, 0.1};
    LinkParams hi{0.5, 0.95, 2.0};

    bool contains(const LinkParams& t) const;
    LinkParams center() const;
    /// 0 inside the box and on the valid set, -infinity elsewhere.
    double log_density(const LinkParams& t) const;
};

struct SamplerConfig {
    Algo algo = Algo::fast;
    int kappa = 4;
    double b = 0.1;
    std::size_t sweeps = 1000;
    std::size_t burn_in = 0;
    std::size_t thinning = 1;
    double embedding_sd = 0.0;  // 0 selects b / 4
    double beta_sd = 0.01;
    double sigma_sd = 0.02;
    TruncGaussPrior prior;
    ThetaBox theta_box;
    std::optional<LinkParams> theta0;  // defaults to the box center
    bool truncate = true;              // restrict fast/faster targets to S_{a,b}
    std::size_t refresh_every = 50;    // 0 disables
    double drift_tolerance = 1e-6;
    bool random_scan = false;
    bool update_theta = true;
    std::array<bool, 3> theta_moves{true, true, true};  // beta0, beta1, sigma
    std::vector<NodeId> frozen;                         // nodes never proposed
    std::uint64_t seed = 1;

    double step_sd() const { return embedding_sd > 0.0 ? embedding_sd : b / 4.0; }
    /// ConfigError on inconsistent settings.
    void validate() const;
};

struct Sample {
    std::size_t sweep = 0;
    Embedding tau;
    LinkParams theta;
};

struct ChainStats {
    std::uint64_t node_proposals = 0, node_accepts = 0;
    std::uint64_t theta_proposals = 0, theta_accepts = 0;
    std::uint64_t truncation_rejects = 0;
    double max_drift = 0.0;
    double init_seconds = 0.0;
    std::vector<double> sweep_seconds;

    double node_acceptance() const {
        return node_proposals ? static_cast<double>(node_accepts) / static_cast<double>(node_proposals) : 0.0;
    }
    double theta_acceptance() const {
        return theta_proposals ? static_cast<double>(theta_accepts) / static_cast<double>(theta_proposals) : 0.0;
    }
};

/// One Markov chain over (tau, theta). The fast algorithm keeps a full-order
/// moment store, the faster one a first-order store driven by block edge
/// counts, and the exact one works on the likelihood directly.
class Chain {
public:
    Chain(const SamplerConfig& config, const Graph& g, const Partition& part, Embedding tau0,
          const LinkFunction& link = gaussian_link());

    const SamplerConfig& config() const { return cfg_; }
    const Embedding& tau() const { return tau_; }
    const LinkParams& theta() const { return theta_; }
    /// Cached L~ for fast/faster, exact L for the exact algorithm.
    double log_likelihood() const { return ltilde_; }
    std::size_t sweeps_done() const { return sweep_; }
    const ChainStats& stats() const { return stats_; }
    const MomentStore* store() const { return store_ ? &*store_ : nullptr; }
    /// Outcome of every proposal so far, in order (true = accepted).
    const std::vector<bool>& decisions() const { return decisions_; }
    void record_decisions(bool on) { record_ = on; }

    /// Gaussian random-walk proposal for node i (two normal draws).
    Point propose_embedding(NodeId i, double step_sd);

    /// One node move through the store (fast: update_m, faster: update_m2)
    /// or the exact delta. Returns whether the move was accepted.
    bool node_step(NodeId i);
    /// Reflected random-walk move of theta with L~ recomputed from the
    /// current summaries.
    bool theta_step();
    /// One theta move (if enabled) followed by a move of every free node.
    void sweep();
    /// Rebuilds the summaries and checks the cached likelihood against them.
    /// NumericalError when the difference exceeds the drift tolerance.
    void refresh();

    /// True when moving node i to p keeps tau in S_{a,b}.
    bool respects_partition(NodeId i, Point p) const;

private:
    SamplerConfig cfg_;
    const Graph* g_;
    Partition part_;
    std::vector<std::vector<NodeId>> members_;
    const LinkFunction* link_;
    Embedding tau_;
    LinkParams theta_;
    double ltilde_ = 0.0;
    std::size_t sweep_ = 0;
    Rng rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
    std::optional<MomentStore> store_;
    std::optional<BlockEdgeCounts> counts_;
    BlockTermCache cache_, scratch_;
    ProposedDeltas proposal_;
    std::unique_ptr<BlockTermEvaluator> eval_;
    std::vector<bool> free_;
    std::vector<bool> decisions_;
    bool record_ = false;
    ChainStats stats_;

    double full_likelihood(const LinkParams& theta, BlockTermCache* cache);
    void rebuild_store();
};

using SampleSink = std::function<void(const Sample&)>;

struct RunResult {
    std::vector<Sample> samples;
    ChainStats stats;
    LinkParams final_theta;
    Embedding final_tau;
    double final_loglik = 0.0;
};

/// Runs config.sweeps sweeps and emits (tau, theta) after every
/// `thinning`-th sweep past burn-in. Samples are passed to sink when given,
/// otherwise collected in the result.
RunResult run_chain(const SamplerConfig& config, const Graph& g, const Partition& part, Embedding tau0,
                    const SampleSink& sink = {});

/// run_chain with the algorithm forced to fast, faster or exact respectively.
RunResult run_fast(SamplerConfig config, const Graph& g, const Partition& part, Embedding tau0,
                   const SampleSink& sink = {});
RunResult run_faster(SamplerConfig config, const Graph& g, const Partition& part, Embedding tau0,
                     const SampleSink& sink = {});
RunResult run_exact_mwg(SamplerConfig config, const Graph& g, Embedding tau0, const SampleSink& sink = {});

/// Whether sweep s (1-based) emits a sample.
bool emits_sample(const SamplerConfig& config, std::size_t s);

/// Reflects x into [lo, hi].
double reflect_into(double x, double lo, double hi);

}  // namespace lpm
