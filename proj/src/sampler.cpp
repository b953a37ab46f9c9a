#include "lpm/sampler.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <utility>

namespace lpm {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}
}  // namespace

std::string to_string(Algo a) {
    switch (a) {
        case Algo::exact: return "exact";
        case Algo::fast: return "fast";
        case Algo::faster: return "faster";
    }
    return "?";
}

Algo parse_algo(const std::string& s) {
    if (s == "exact") return Algo::exact;
    if (s == "fast") return Algo::fast;
    if (s == "faster") return Algo::faster;
    throw ConfigError("unknown algorithm '" + s + "' (expected exact, fast or faster)");
}

bool ThetaBox::contains(const LinkParams& t) const {
    return t.beta0 >= lo.beta0 && t.beta0 <= hi.beta0 && t.beta1 >= lo.beta1 && t.beta1 <= hi.beta1 &&
           t.sigma >= lo.sigma && t.sigma <= hi.sigma;
}

LinkParams ThetaBox::center() const {
    return {0.5 * (lo.beta0 + hi.beta0), 0.5 * (lo.beta1 + hi.beta1), 0.5 * (lo.sigma + hi.sigma)};
}

double ThetaBox::log_density(const LinkParams& t) const {
    return contains(t) && t.valid() ? 0.0 : kNegInf;
}

double reflect_into(double x, double lo, double hi) {
    const double w = hi - lo;
    if (!(w > 0.0)) return lo;
    double y = std::fmod(x - lo, 2.0 * w);
    if (y < 0.0) y += 2.0 * w;
    return y <= w ? lo + y : hi - (y - w);
}

void SamplerConfig::validate() const {
    if (kappa < 0 || kappa > kMaxOrder) throw ConfigError("kappa must be in [0, " + std::to_string(kMaxOrder) + "]");
    if (algo == Algo::faster && kappa != 1) throw ConfigError("the faster algorithm requires kappa = 1");
    if (!(b > 0.0)) throw ConfigError("b must be positive");
    if (sweeps > 0 && burn_in >= sweeps) throw ConfigError("burn_in must be smaller than the number of sweeps");
    if (thinning < 1) throw ConfigError("thinning must be at least 1");
    if (embedding_sd < 0.0 || !(beta_sd > 0.0) || !(sigma_sd > 0.0))
        throw ConfigError("proposal step sizes must be positive");
    if (!(prior.sd > 0.0) || !(prior.domain.hi > prior.domain.lo)) throw ConfigError("invalid embedding prior");
    const auto& lo = theta_box.lo;
    const auto& hi = theta_box.hi;
    if (!(lo.beta0 <= hi.beta0 && lo.beta1 <= hi.beta1 && lo.sigma <= hi.sigma))
        throw ConfigError("theta box bounds are inverted");
    if (lo.beta0 <= 0.0 || lo.beta1 <= 0.0 || lo.sigma < LinkParams::default_sigma_min)
        throw ConfigError("theta box must lie in beta0 > 0, beta1 > 0, sigma >= sigma_min");
    if (theta0) {
        theta0->validate();
        if (!theta_box.contains(*theta0)) throw ConfigError("theta0 lies outside the theta box");
    } else if (!theta_box.center().valid()) {
        throw ConfigError("theta box center is not a valid parameter; give theta0");
    }
    if (!(drift_tolerance > 0.0)) throw ConfigError("drift tolerance must be positive");
}

Chain::Chain(const SamplerConfig& config, const Graph& g, const Partition& part, Embedding tau0,
             const LinkFunction& link)
    : cfg_(config), g_(&g), part_(part), link_(&link), tau_(std::move(tau0)), rng_(config.seed) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg_.validate();
    theta_ = cfg_.theta0 ? *cfg_.theta0 : cfg_.theta_box.center();
    const std::size_t n = g.n();
    if (tau_.size() != n) throw ConfigError("initial embedding has the wrong number of nodes");
    for (NodeId i = 0; i < n; ++i)
        if (!cfg_.prior.domain.contains(tau_[i]))
            throw ConfigError("initial position of node " + std::to_string(i) + " is outside the domain");
    free_.assign(n, true);
    for (NodeId i : cfg_.frozen) {
        if (i >= n) throw ConfigError("frozen node id out of range");
        free_[i] = false;
    }
    if (cfg_.algo == Algo::exact) {
        ltilde_ = exact_log_likelihood(g, tau_, theta_);
    } else {
        if (part_.n() != n) throw ConfigError("partition does not match the graph");
        members_ = part_.members();
        if (cfg_.truncate && !is_b_good(tau_, part_, cfg_.b))
            throw ConfigError("initial embedding is not b-good for the partition");
        if (cfg_.algo == Algo::faster) counts_ = precompute_block_edge_counts(g, part_);
        rebuild_store();
    }
    stats_.init_seconds = seconds_since(t0);
}

void Chain::rebuild_store() {
    if (cfg_.algo == Algo::fast)
        store_ = initialize_qm(tau_, *g_, part_, multi_index_set(cfg_.kappa));
    else
        store_ = initialize_m(tau_, *g_, part_, *counts_);
    eval_ = std::make_unique<BlockTermEvaluator>(store_->idx, *link_, theta_);
    ltilde_ = compute_block_terms(*store_, theta_, cache_, *link_);
}

double Chain::full_likelihood(const LinkParams& theta, BlockTermCache* cache) {
    if (cfg_.algo == Algo::exact) return exact_log_likelihood(*g_, tau_, theta);
    return compute_block_terms(*store_, theta, *cache, *link_);
}

bool Chain::respects_partition(NodeId i, Point p) const {
    if (cfg_.algo == Algo::exact || !cfg_.truncate) return true;
    const double b2 = cfg_.b * cfg_.b;
    for (NodeId j : members_[part_.assign[i]])
        if (j != i && squared_distance(p, tau_[j]) > b2) return false;
    return true;
}

Point Chain::propose_embedding(NodeId i, double step_sd) {
    const double zx = normal_(rng_);
    const double zy = normal_(rng_);
    return {tau_[i].x + step_sd * zx, tau_[i].y + step_sd * zy};
}

bool Chain::node_step(NodeId i) {
    const Point p = propose_embedding(i, cfg_.step_sd());
    const double u = unif_(rng_);
    ++stats_.node_proposals;
    bool accept = false;
    const double lp_new = cfg_.prior.log_density(p);
    if (lp_new == kNegInf) {
        accept = false;
    } else if (!respects_partition(i, p)) {
        ++stats_.truncation_rejects;
    } else if (cfg_.algo == Algo::exact) {
        const double delta = exact_delta_log_likelihood(*g_, tau_, i, p, theta_);
        accept = std::log(u) < delta + lp_new - cfg_.prior.log_density(tau_[i]);
        if (accept) {
            ltilde_ += delta;
            tau_[i] = p;
        }
    } else {
        auto& d = proposal_;
        propose_move(*store_, i, p, *eval_, &cache_, counts_ ? &*counts_ : nullptr, d);
        accept = std::log(u) < d.delta_ltilde + lp_new - cfg_.prior.log_density(tau_[i]);
        if (accept) {
            commit(*store_, d, *g_, &cache_, &ltilde_);
            tau_[i] = p;
        }
    }
    if (accept) ++stats_.node_accepts;
    if (record_) decisions_.push_back(accept);
    return accept;
}

bool Chain::theta_step() {
    const double z[3] = {normal_(rng_), normal_(rng_), normal_(rng_)};
    const double u = unif_(rng_);
    ++stats_.theta_proposals;
    const auto& lo = cfg_.theta_box.lo;
    const auto& hi = cfg_.theta_box.hi;
    LinkParams prop = theta_;
    if (cfg_.theta_moves[0]) prop.beta0 = reflect_into(theta_.beta0 + cfg_.beta_sd * z[0], lo.beta0, hi.beta0);
    if (cfg_.theta_moves[1]) prop.beta1 = reflect_into(theta_.beta1 + cfg_.beta_sd * z[1], lo.beta1, hi.beta1);
    if (cfg_.theta_moves[2]) prop.sigma = reflect_into(theta_.sigma + cfg_.sigma_sd * z[2], lo.sigma, hi.sigma);
    bool accept = false;
    if (cfg_.theta_box.log_density(prop) != kNegInf) {
        const double lnew = full_likelihood(prop, &scratch_);
        accept = std::log(u) < lnew - ltilde_;
        if (accept) {
            theta_ = prop;
            ltilde_ = lnew;
            if (eval_) {
                std::swap(cache_, scratch_);
                eval_->set_theta(theta_);
            }
        }
    }
    if (accept) ++stats_.theta_accepts;
    if (record_) decisions_.push_back(accept);
    return accept;
}

void Chain::sweep() {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg_.update_theta) theta_step();
    const NodeId n = static_cast<NodeId>(tau_.size());
    if (cfg_.random_scan) {
        std::uniform_int_distribution<NodeId> pick(0, n - 1);
        for (NodeId c = 0; c < n; ++c) {
            const NodeId i = pick(rng_);
            if (free_[i]) node_step(i);
        }
    } else {
        for (NodeId i = 0; i < n; ++i)
            if (free_[i]) node_step(i);
    }
    ++sweep_;
    if (cfg_.refresh_every > 0 && sweep_ % cfg_.refresh_every == 0) refresh();
    stats_.sweep_seconds.push_back(seconds_since(t0));
}

void Chain::refresh() {
    const double cached = ltilde_;
    if (cfg_.algo == Algo::exact)
        ltilde_ = exact_log_likelihood(*g_, tau_, theta_);
    else
        rebuild_store();
    const double drift = std::abs(cached - ltilde_);
    stats_.max_drift = std::max(stats_.max_drift, drift);
    if (!(drift <= cfg_.drift_tolerance))
        throw NumericalError("cached log-likelihood drifted by " + std::to_string(drift) + " at sweep " +
                             std::to_string(sweep_));
}

bool emits_sample(const SamplerConfig& config, std::size_t s) {
    return s > config.burn_in && (s - config.burn_in) % config.thinning == 0;
}

RunResult run_chain(const SamplerConfig& config, const Graph& g, const Partition& part, Embedding tau0,
                    const SampleSink& sink) {
    Chain chain(config, g, part, std::move(tau0));
    RunResult out;
    for (std::size_t s = 1; s <= config.sweeps; ++s) {
        chain.sweep();
        if (!emits_sample(config, s)) continue;
        Sample smp{s, chain.tau(), chain.theta()};
        if (sink)
            sink(smp);
        else
            out.samples.push_back(std::move(smp));
    }
    out.stats = chain.stats();
    out.final_theta = chain.theta();
    out.final_tau = chain.tau();
    out.final_loglik = chain.log_likelihood();
    return out;
}

RunResult run_fast(SamplerConfig config, const Graph& g, const Partition& part, Embedding tau0,
                   const SampleSink& sink) {
    config.algo = Algo::fast;
    return run_chain(config, g, part, std::move(tau0), sink);
}

RunResult run_faster(SamplerConfig config, const Graph& g, const Partition& part, Embedding tau0,
                     const SampleSink& sink) {
    config.algo = Algo::faster;
    config.kappa = 1;
    return run_chain(config, g, part, std::move(tau0), sink);
}

RunResult run_exact_mwg(SamplerConfig config, const Graph& g, Embedding tau0, const SampleSink& sink) {
    config.algo = Algo::exact;
    return run_chain(config, g, Partition::singletons(g.n()), std::move(tau0), sink);
}

}  // namespace lpm
