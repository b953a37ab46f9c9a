#include "lpm/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "lpm/model.hpp"
#include "lpm/moments.hpp"

namespace lpm {

TaylorBound taylor_error_bound(std::size_t n, int kappa, double b, const BoundParams& bp) {
    if (n < 1 || kappa < 0 || b < 0.0 || bp.mg < 0.0 || !(bp.rho > 0.0))
        throw ConfigError("taylor_error_bound: need n >= 1, kappa >= 0, b >= 0, M_g >= 0, rho > 0");
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    TaylorBound out;
    out.r = pairs * bp.mg * std::pow(bp.bg() * b, kappa + 1);
    if (!std::isfinite(out.r)) out.r = std::numeric_limits<double>::infinity();
    out.tv = std::expm1(2.0 * out.r);
    if (!std::isfinite(out.tv)) out.tv = std::numeric_limits<double>::infinity();
    return out;
}

double empirical_taylor_error(const Graph& g, const Embedding& tau, const LinkParams& theta, const Partition& part,
                              int kappa) {
    const auto store = initialize_qm(tau, g, part, multi_index_set(kappa));
    return std::abs(approx_log_likelihood(store, theta) - exact_log_likelihood(g, tau, theta));
}

AlignedEmbedding procrustes_align(const Embedding& x, const Embedding& y, bool allow_scale) {
    if (x.size() != y.size()) throw ConfigError("procrustes_align: point sets differ in size");
    if (x.size() < 2) throw ConfigError("procrustes_align: need at least two points");
    const double n = static_cast<double>(x.size());
    Point mx, my;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx = mx + x[i];
        my = my + y[i];
    }
    mx = (1.0 / n) * mx;
    my = (1.0 / n) * my;

    double sxx = 0.0, a_rot = 0.0, b_rot = 0.0, a_ref = 0.0, b_ref = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Point u = x[i] - mx, v = y[i] - my;
        sxx += squared_norm(u);
        a_rot += u.x * v.x + u.y * v.y;
        b_rot += u.x * v.y - u.y * v.x;
        a_ref += u.x * v.x - u.y * v.y;
        b_ref += u.y * v.x + u.x * v.y;
    }

    AlignedEmbedding out;
    if (sxx > 0.0) {
        const double v_rot = std::hypot(a_rot, b_rot), v_ref = std::hypot(a_ref, b_ref);
        if (v_rot >= v_ref) {
            const double c = v_rot > 0.0 ? a_rot / v_rot : 1.0, s = v_rot > 0.0 ? b_rot / v_rot : 0.0;
            out.rotation = {c, -s, s, c};
        } else {
            const double c = a_ref / v_ref, s = b_ref / v_ref;
            out.rotation = {c, s, s, -c};
        }
        if (allow_scale) out.scale = std::max(v_rot, v_ref) / sxx;
    }
    const auto& r = out.rotation;
    const Point rmx{r[0] * mx.x + r[1] * mx.y, r[2] * mx.x + r[3] * mx.y};
    out.translation = my - out.scale * rmx;
    out.points = apply_alignment(out, x);
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sse += squared_distance(out.points[i], y[i]);
    out.mse = sse / n;
    return out;
}

Embedding apply_alignment(const AlignedEmbedding& a, const Embedding& x) {
    Embedding out(x.size());
    const auto& r = a.rotation;
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = a.scale * Point{r[0] * x[i].x + r[1] * x[i].y, r[2] * x[i].x + r[3] * x[i].y} + a.translation;
    return out;
}

Embedding posterior_mean(const std::vector<Sample>& samples) {
    if (samples.empty()) throw ConfigError("posterior_mean: no samples");
    const std::size_t n = samples.front().tau.size();
    Embedding m(n);
    for (const auto& s : samples) {
        if (s.tau.size() != n) throw ConfigError("posterior_mean: samples disagree on the node count");
        for (std::size_t i = 0; i < n; ++i) m[i] = m[i] + s.tau[i];
    }
    const double w = 1.0 / static_cast<double>(samples.size());
    for (auto& p : m) p = w * p;
    return m;
}

LinkParams posterior_mean_theta(const std::vector<Sample>& samples) {
    if (samples.empty()) throw ConfigError("posterior_mean_theta: no samples");
    LinkParams m{0.0, 0.0, 0.0};
    for (const auto& s : samples) {
        m.beta0 += s.theta.beta0;
        m.beta1 += s.theta.beta1;
        m.sigma += s.theta.sigma;
    }
    const double w = 1.0 / static_cast<double>(samples.size());
    return {w * m.beta0, w * m.beta1, w * m.sigma};
}

double posterior_mean_mse(const std::vector<Sample>& a, const std::vector<Sample>& b, bool allow_scale) {
    return procrustes_align(posterior_mean(a), posterior_mean(b), allow_scale).mse;
}

Evaluator parse_evaluator(const std::string& s) {
    if (s == "exact") return Evaluator::exact;
    if (s == "fast") return Evaluator::fast;
    if (s == "faster") return Evaluator::faster;
    throw ConfigError("unknown evaluator '" + s + "' (expected exact, fast or faster)");
}

std::string to_string(Evaluator e) {
    switch (e) {
        case Evaluator::exact: return "exact";
        case Evaluator::fast: return "fast";
        case Evaluator::faster: return "faster";
    }
    return "?";
}

ContourGrid single_node_contour(const Graph& g, const Embedding& tau_frozen, NodeId node, const LinkParams& theta,
                                const GridSpec& grid, const ContourOptions& opts) {
    if (node >= g.n() || tau_frozen.size() != g.n()) throw ConfigError("contour: node or embedding size mismatch");
    if (grid.nx < 1 || grid.ny < 1) throw ConfigError("contour: grid needs at least one cell per axis");
    const Domain& dom = opts.prior.domain;
    if (!(grid.x0 >= dom.lo && grid.x1 <= dom.hi && grid.y0 >= dom.lo && grid.y1 <= dom.hi && grid.x0 < grid.x1 &&
          grid.y0 < grid.y1))
        throw ConfigError("contour: grid must be a nonempty rectangle inside the domain");
    theta.validate();

    ContourGrid out;
    out.grid = grid;
    const std::size_t cells = static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny);
    out.log_density.assign(cells, -std::numeric_limits<double>::infinity());

    std::optional<MomentStore> store;
    std::optional<BlockEdgeCounts> counts;
    Partition part;
    BlockTermCache cache;
    if (opts.evaluator != Evaluator::exact) {
        part = build_partition(tau_frozen, opts.b);
        if (opts.evaluator == Evaluator::fast) {
            store = initialize_qm(tau_frozen, g, part, multi_index_set(opts.kappa));
        } else {
            counts = precompute_block_edge_counts(g, part);
            store = initialize_m(tau_frozen, g, part, *counts);
        }
        compute_block_terms(*store, theta, cache);
    }
    std::vector<NodeId> peers;
    if (store)
        for (NodeId j = 0; j < g.n(); ++j)
            if (j != node && part.assign[j] == part.assign[node]) peers.push_back(j);

    const long nx = grid.nx;
#pragma omp parallel
    {
        std::optional<BlockTermEvaluator> eval;
        if (store) eval.emplace(store->idx, gaussian_link(), theta);
#pragma omp for schedule(static)
        for (long ix = 0; ix < nx; ++ix)
            for (int iy = 0; iy < grid.ny; ++iy) {
                const Point p = grid.cell(static_cast<int>(ix), iy);
                double lp = opts.prior.log_density(p);
                if (std::isinf(lp)) continue;
                if (store) {
                    if (opts.truncate) {
                        bool inside = true;
                        for (NodeId j : peers) inside = inside && distance(p, tau_frozen[j]) <= opts.b;
                        if (!inside) continue;
                    }
                    lp += propose_move(*store, node, p, *eval, &cache, counts ? &*counts : nullptr).delta_ltilde;
                } else {
                    lp += exact_delta_log_likelihood(g, tau_frozen, node, p, theta);
                }
                out.log_density[static_cast<std::size_t>(ix) * static_cast<std::size_t>(grid.ny) +
                                static_cast<std::size_t>(iy)] = lp;
            }
    }
    const double mx = *std::max_element(out.log_density.begin(), out.log_density.end());
    if (std::isinf(mx)) throw DegenerateInputError("contour: target vanishes on the whole grid");
    double z = 0.0;
    out.prob.resize(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        out.prob[c] = std::exp(out.log_density[c] - mx);
        z += out.prob[c];
    }
    for (auto& v : out.prob) v /= z;
    return out;
}

Peers select_peers(const Embedding& truth, NodeId center) {
    if (truth.size() < 4) throw ConfigError("select_peers: need at least four nodes");
    if (center >= truth.size()) throw ConfigError("select_peers: center out of range");
    std::vector<NodeId> others;
    for (NodeId j = 0; j < truth.size(); ++j)
        if (j != center) others.push_back(j);
    std::stable_sort(others.begin(), others.end(), [&](NodeId a, NodeId b) {
        return squared_distance(truth[a], truth[center]) < squared_distance(truth[b], truth[center]);
    });
    Peers p;
    p.center = center;
    const std::size_t m = others.size();
    for (std::size_t k = 0; k < 3; ++k) {
        const std::size_t lo = k * m / 3, hi = (k + 1) * m / 3;
        p.nodes[k] = others[lo + (hi - lo) / 2];
    }
    return p;
}

Peers select_peers_seeded(const Embedding& truth, std::uint64_t seed) {
    if (truth.empty()) throw ConfigError("select_peers: empty embedding");
    Rng rng(seed);
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(truth.size() - 1));
    return select_peers(truth, pick(rng));
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ConfigError("quantile: no values");
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

DistanceStats distance_statistics(const std::vector<Sample>& samples, NodeId center, const std::vector<NodeId>& peers,
                                  std::size_t max_rank) {
    if (samples.size() < 2) throw ConfigError("distance_statistics: need at least two samples");
    const std::size_t n = samples.front().tau.size();
    if (center >= n) throw ConfigError("distance_statistics: center out of range");
    for (NodeId p : peers)
        if (p >= n) throw ConfigError("distance_statistics: peer out of range");
    DistanceStats out;
    out.center = center;
    out.peers = peers;
    out.distances.assign(peers.size(), {});
    const std::size_t ranks = std::min(max_rank, n - 1);
    std::vector<std::vector<double>> by_rank(ranks);
    std::vector<double> d;
    for (const auto& s : samples) {
        for (std::size_t k = 0; k < peers.size(); ++k) out.distances[k].push_back(distance(s.tau[center], s.tau[peers[k]]));
        d.clear();
        for (NodeId j = 0; j < n; ++j)
            if (j != center) d.push_back(distance(s.tau[center], s.tau[j]));
        std::partial_sort(d.begin(), d.begin() + static_cast<long>(ranks), d.end());
        for (std::size_t r = 0; r < ranks; ++r) by_rank[r].push_back(d[r]);
    }
    for (auto& v : by_rank) {
        RankSummary rs;
        rs.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        rs.q05 = quantile(v, 0.05);
        rs.q50 = quantile(v, 0.5);
        rs.q95 = quantile(v, 0.95);
        out.order_stats.push_back(rs);
    }
    return out;
}

double silverman_bandwidth(const std::vector<double>& values) {
    if (values.size() < 2) throw ConfigError("silverman_bandwidth: need at least two values");
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const double iqr = quantile(values, 0.75) - quantile(values, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd > 0.0 ? sd : 1e-12;
    return 0.9 * spread * std::pow(n, -0.2);
}

std::vector<double> gaussian_kde(const std::vector<double>& values, const std::vector<double>& at) {
    const double h = silverman_bandwidth(values);
    const double norm = 1.0 / (static_cast<double>(values.size()) * h * std::sqrt(2.0 * M_PI));
    std::vector<double> out(at.size(), 0.0);
    for (std::size_t k = 0; k < at.size(); ++k) {
        double s = 0.0;
        for (double v : values) {
            const double z = (at[k] - v) / h;
            s += std::exp(-0.5 * z * z);
        }
        out[k] = s * norm;
    }
    return out;
}

std::vector<BenchRow> bench_sweep(const BenchSpec& spec) {
    std::vector<BenchRow> rows;
    if (spec.sweeps == 0) return rows;
    const LinkParams theta{0.1, 0.7, 0.6};
    for (std::size_t n : spec.sizes) {
        GeneratedNetwork net;
        if (spec.density > 0.0) {
            Rng rng(spec.seed);
            TruncGaussPrior prior;
            for (std::size_t i = 0; i < n; ++i) net.z.push_back(prior.sample(rng));
            std::bernoulli_distribution coin(spec.density);
            std::vector<std::pair<NodeId, NodeId>> e;
            for (NodeId i = 0; i < n; ++i)
                for (NodeId j = i + 1; j < n; ++j)
                    if (coin(rng)) e.emplace_back(i, j);
            net.graph = Graph::from_edges(n, e);
        } else {
            net = sample_graph(n, theta, {}, spec.seed);
        }
        const Partition part = spec.algo == Algo::exact ? Partition::singletons(n) : build_partition(net.z, spec.b);
        SamplerConfig cfg;
        cfg.algo = spec.algo;
        cfg.kappa = spec.algo == Algo::faster ? 1 : spec.kappa;
        cfg.b = spec.b;
        cfg.sweeps = spec.warmup + spec.sweeps;
        cfg.theta0 = theta;
        cfg.refresh_every = 0;
        std::vector<double> times;
        for (std::size_t rep = 0; rep < spec.repeats; ++rep) {
            cfg.seed = spec.seed + rep;
            Chain chain(cfg, net.graph, part, net.z);
            for (std::size_t s = 0; s < cfg.sweeps; ++s) chain.sweep();
            const auto& st = chain.stats().sweep_seconds;
            times.insert(times.end(), st.begin() + static_cast<long>(spec.warmup), st.end());
        }
        BenchRow row;
        row.algo = spec.algo;
        row.n = n;
        row.K = part.K();
        row.kappa = cfg.kappa;
        row.b = spec.b;
        row.median_sweep_ms = 1e3 * quantile(times, 0.5);
        row.reps = spec.repeats;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace lpm
