#pragma once

#include <cstdint>
#include <memory>
#include <random>

#include "lpm/graph.hpp"
#include "lpm/jet.hpp"
#include "lpm/link.hpp"
#include "lpm/multi_index.hpp"
#include "lpm/types.hpp"

namespace lpm {

using Rng = std::mt19937_64;

/// Shared, lazily built index tables for a given order.
std::shared_ptr<const MultiIndexSet> multi_index_set(int kappa);

/// Gaussian link probability; validates theta (ConfigError).
double link_prob(const LinkParams& theta, Point x, Point y);

/// g1 = log p for ell = 1, g0 = log(1 - p) for ell = 0. DomainError when p is
/// outside (0, 1).
double log_link(int ell, const LinkParams& theta, Point x, Point y);

/// Taylor jet of g_ell at (ys, yt) up to total order kappa.
Jet<4> log_link_jet(int ell, const LinkParams& theta, Point ys, Point yt, int kappa,
                    double sigma_min = LinkParams::default_sigma_min);

/// Sum over unordered pairs of g1 (edges) or g0 (non-edges). O(n^2).
double exact_log_likelihood(const Graph& g, const Embedding& tau, const LinkParams& theta);

/// L(tau*) - L(tau) where tau* moves node k to tau_k_new. O(n).
double exact_delta_log_likelihood(const Graph& g, const Embedding& tau, NodeId k, Point tau_k_new,
                                  const LinkParams& theta);

namespace serial {
double exact_log_likelihood(const Graph& g, const Embedding& tau, const LinkParams& theta);
}

/// Isotropic Gaussian truncated to the domain square.
struct TruncGaussPrior {
    Point mean{0.5, 0.5};
    double sd = 0.25;
    Domain domain{0.0, 1.0};

    /// Unnormalized log density; -infinity outside the domain.
    double log_density(Point p) const;
    /// Rejection sampling from the untruncated Gaussian.
    Point sample(Rng& rng) const;
};

struct GeneratedNetwork {
    Embedding z;
    Graph graph;
};

/// Draws latent positions from the prior, then each unordered pair
/// independently with probability p_theta. Deterministic given the seed.
GeneratedNetwork sample_graph(std::size_t n, const LinkParams& theta, const TruncGaussPrior& prior,
                              std::uint64_t seed);

}  // namespace lpm
