#include "lpm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <vector>

namespace lpm {

std::shared_ptr<const MultiIndexSet> multi_index_set(int kappa) {
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const MultiIndexSet>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[kappa];
    if (!slot) slot = std::make_shared<const MultiIndexSet>(kappa);
    return slot;
}

double link_prob(const LinkParams& theta, Point x, Point y) {
    theta.validate();
    return gaussian_link().prob(theta, x, y);
}

double log_link(int ell, const LinkParams& theta, Point x, Point y) {
    const double p = link_prob(theta, x, y);
    if (!(p > 0.0 && p < 1.0)) throw DomainError("log_link: probability outside (0,1)");
    return ell == 1 ? std::log(p) : std::log1p(-p);
}

Jet<4> log_link_jet(int ell, const LinkParams& theta, Point ys, Point yt, int kappa, double sigma_min) {
    theta.validate(sigma_min);
    auto set = multi_index_set(kappa);
    Jet<4> out(set->pairs());
    gaussian_link().log_link_jet(ell, theta, ys, yt, set->pairs(), out.coeffs());
    return out;
}

namespace {

// Contribution of one unordered pair.
inline double pair_term(bool edge, const LinkParams& theta, double inv2s2, Point a, Point b) {
    const double p = theta.beta0 + theta.beta1 * std::exp(-squared_distance(a, b) * inv2s2);
    return edge ? std::log(p) : std::log1p(-p);
}

// Sum over j > i of the pair terms involving i, walking i's sorted neighbor list.
double row_sum(const Graph& g, const Embedding& tau, const LinkParams& theta, double inv2s2, NodeId i) {
    const auto nb = g.neighbors(i);
    auto it = std::upper_bound(nb.begin(), nb.end(), i);
    double s = 0.0;
    for (NodeId j = i + 1; j < g.n(); ++j) {
        bool edge = false;
        if (it != nb.end() && *it == j) {
            edge = true;
            ++it;
        }
        s += pair_term(edge, theta, inv2s2, tau[i], tau[j]);
    }
    return s;
}

}  // namespace

namespace serial {

double exact_log_likelihood(const Graph& g, const Embedding& tau, const LinkParams& theta) {
    theta.validate();
    const double inv2s2 = 1.0 / (2.0 * theta.sigma * theta.sigma);
    double total = 0.0;
    for (NodeId i = 0; i < g.n(); ++i) total += row_sum(g, tau, theta, inv2s2, i);
    return total;
}

}  // namespace serial

double exact_log_likelihood(const Graph& g, const Embedding& tau, const LinkParams& theta) {
    theta.validate();
    const double inv2s2 = 1.0 / (2.0 * theta.sigma * theta.sigma);
    const long n = static_cast<long>(g.n());
    std::vector<double> rows(g.n(), 0.0);
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = row_sum(g, tau, theta, inv2s2, static_cast<NodeId>(i));
    double total = 0.0;
    for (double r : rows) total += r;
    return total;
}

double exact_delta_log_likelihood(const Graph& g, const Embedding& tau, NodeId k, Point tau_k_new,
                                  const LinkParams& theta) {
    if (tau_k_new == tau[k]) return 0.0;
    const double inv2s2 = 1.0 / (2.0 * theta.sigma * theta.sigma);
    const auto nb = g.neighbors(k);
    auto it = nb.begin();
    double delta = 0.0;
    for (NodeId j = 0; j < g.n(); ++j) {
        bool edge = false;
        if (it != nb.end() && *it == j) {
            edge = true;
            ++it;
        }
        if (j == k) continue;
        const double pn = theta.beta0 + theta.beta1 * std::exp(-squared_distance(tau_k_new, tau[j]) * inv2s2);
        const double po = theta.beta0 + theta.beta1 * std::exp(-squared_distance(tau[k], tau[j]) * inv2s2);
        delta += edge ? std::log(pn / po) : std::log((1.0 - pn) / (1.0 - po));
    }
    return delta;
}

double TruncGaussPrior::log_density(Point p) const {
    if (!domain.contains(p)) return -std::numeric_limits<double>::infinity();
    return -squared_distance(p, mean) / (2.0 * sd * sd);
}

Point TruncGaussPrior::sample(Rng& rng) const {
    std::normal_distribution<double> nd(0.0, sd);
    for (;;) {
        Point p{mean.x + nd(rng), mean.y + nd(rng)};
        if (domain.contains(p)) return p;
    }
}

GeneratedNetwork sample_graph(std::size_t n, const LinkParams& theta, const TruncGaussPrior& prior,
                              std::uint64_t seed) {
    theta.validate();
    Rng rng(seed);
    GeneratedNetwork out;
    out.z.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.z.push_back(prior.sample(rng));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::pair<NodeId, NodeId>> edges;
    const auto& link = gaussian_link();
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j)
            if (unif(rng) < link.prob(theta, out.z[i], out.z[j])) edges.emplace_back(i, j);
    out.graph = Graph::from_edges(n, edges);
    return out;
}

}  // namespace lpm
