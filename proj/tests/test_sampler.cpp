#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "lpm/model.hpp"
#include "lpm/sampler.hpp"
#include "stationarity.hpp"

using namespace lpm;

namespace {
const LinkParams kTheta{0.1, 0.7, 0.6};

struct Network {
    GeneratedNetwork net;
    Partition part;
};

Network network(std::size_t n, double b, std::uint64_t seed) {
    Network out{sample_graph(n, kTheta, {}, seed), {}};
    out.part = build_partition(out.net.z, b);
    return out;
}

SamplerConfig base_config(Algo algo, int kappa, double b, std::size_t sweeps, std::uint64_t seed) {
    SamplerConfig c;
    c.algo = algo;
    c.kappa = kappa;
    c.b = b;
    c.sweeps = sweeps;
    c.theta0 = kTheta;
    c.seed = seed;
    c.refresh_every = 10;
    return c;
}
}  // namespace

TEST_CASE("algorithm names") {
    for (Algo a : {Algo::exact, Algo::fast, Algo::faster}) CHECK(parse_algo(to_string(a)) == a);
    CHECK_THROWS_AS(parse_algo("slow"), ConfigError);
}

TEST_CASE("reflection stays in the interval and is the identity inside") {
    CHECK(reflect_into(0.3, 0.0, 1.0) == 0.3);
    CHECK(reflect_into(-0.2, 0.0, 1.0) == doctest::Approx(0.2));
    CHECK(reflect_into(1.3, 0.0, 1.0) == doctest::Approx(0.7));
    CHECK(reflect_into(2.3, 0.0, 1.0) == doctest::Approx(0.3));
    Rng rng(1);
    std::normal_distribution<double> z(0.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        const double v = reflect_into(z(rng), 0.1, 0.4);
        CHECK(v >= 0.1);
        CHECK(v <= 0.4);
    }
}

TEST_CASE("config validation") {
    SamplerConfig c;
    CHECK_NOTHROW(c.validate());
    c.algo = Algo::faster;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.burn_in = c.sweeps;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.thinning = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.theta0 = LinkParams{0.6, 0.6, 0.5};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    CHECK(c.step_sd() == doctest::Approx(c.b / 4));
}

TEST_CASE("embedding proposals") {
    auto nw = network(20, 0.3, 2);
    auto cfg = base_config(Algo::fast, 2, 0.3, 0, 3);
    Chain chain(cfg, nw.net.graph, nw.part, nw.net.z);
    const Point here = chain.tau()[4];
    for (int i = 0; i < 100; ++i) CHECK(distance(chain.propose_embedding(4, 1e-12), here) < 1e-10);
    double sx = 0.0, sy = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const Point p = chain.propose_embedding(4, 0.1);
        sx += p.x - here.x;
        sy += p.y - here.y;
    }
    const double se = 0.1 / std::sqrt(static_cast<double>(draws));
    CHECK(std::abs(sx / draws) < 4 * se);
    CHECK(std::abs(sy / draws) < 4 * se);
}

TEST_CASE("zero sweeps emit nothing") {
    auto nw = network(30, 0.3, 4);
    auto res = run_fast(base_config(Algo::fast, 4, 0.3, 0, 1), nw.net.graph, nw.part, nw.net.z);
    CHECK(res.samples.empty());
    CHECK(res.final_tau == nw.net.z);
}

TEST_CASE("thinning schedule") {
    SamplerConfig c;
    c.sweeps = 10000;
    c.burn_in = 5000;
    c.thinning = 20;
    std::size_t count = 0;
    for (std::size_t s = 1; s <= c.sweeps; ++s) count += emits_sample(c, s);
    CHECK(count == 250);
    CHECK_FALSE(emits_sample(c, 5000));
    CHECK(emits_sample(c, 5020));
}

TEST_CASE("runs are deterministic given the seed") {
    auto nw = network(60, 0.2, 5);
    for (Algo a : {Algo::exact, Algo::fast, Algo::faster}) {
        auto cfg = base_config(a, a == Algo::faster ? 1 : 3, 0.2, 20, 9);
        cfg.burn_in = 10;
        cfg.thinning = 5;
        auto r1 = run_chain(cfg, nw.net.graph, nw.part, nw.net.z);
        auto r2 = run_chain(cfg, nw.net.graph, nw.part, nw.net.z);
        REQUIRE(r1.samples.size() == 2);
        CHECK(r1.samples[1].sweep == 20);
        for (std::size_t k = 0; k < r1.samples.size(); ++k) {
            CHECK(r1.samples[k].tau == r2.samples[k].tau);
            CHECK(r1.samples[k].theta == r2.samples[k].theta);
        }
    }
}

TEST_CASE("emitted embeddings stay in the truncation set") {
    auto nw = network(80, 0.15, 6);
    auto cfg = base_config(Algo::fast, 2, 0.15, 30, 10);
    cfg.embedding_sd = 0.08;
    auto res = run_fast(cfg, nw.net.graph, nw.part, nw.net.z);
    REQUIRE(res.samples.size() == 30);
    for (const auto& s : res.samples) CHECK(is_b_good(s.tau, nw.part, 0.15));
    CHECK(res.stats.truncation_rejects > 0);
    CHECK(res.stats.max_drift <= 1e-6);
}

TEST_CASE("theta moves re-evaluate the approximate likelihood") {
    auto nw = network(60, 0.2, 7);
    auto cfg = base_config(Algo::fast, 4, 0.2, 0, 11);
    cfg.refresh_every = 0;
    Chain chain(cfg, nw.net.graph, nw.part, nw.net.z);
    int accepted = 0;
    for (int k = 0; k < 50; ++k) {
        if (chain.theta_step()) ++accepted;
        const double direct = approx_log_likelihood(*chain.store(), chain.theta());
        CHECK(std::abs(chain.log_likelihood() - direct) <= 1e-10 * std::abs(direct));
    }
    CHECK(accepted > 0);
    CHECK(chain.theta() != kTheta);
}

TEST_CASE("faster and fast at first order make the same decisions") {
    auto nw = network(150, 0.15, 8);
    auto cfg = base_config(Algo::fast, 1, 0.15, 0, 12);
    auto cfg2 = cfg;
    cfg2.algo = Algo::faster;
    Chain a(cfg, nw.net.graph, nw.part, nw.net.z), b(cfg2, nw.net.graph, nw.part, nw.net.z);
    a.record_decisions(true);
    b.record_decisions(true);
    double worst = 0.0;
    for (int s = 0; s < 40; ++s) {
        a.sweep();
        b.sweep();
        worst = std::max(worst, std::abs(a.log_likelihood() - b.log_likelihood()) / std::abs(a.log_likelihood()));
    }
    CHECK(a.decisions() == b.decisions());
    CHECK(worst <= 1e-9);
    CHECK(a.tau() == b.tau());
}

TEST_CASE("singleton partitions follow the exact sampler") {
    auto nw = network(40, 0.01, 9);
    auto part = Partition::singletons(40);
    auto cfg = base_config(Algo::fast, 4, 0.01, 0, 13);
    auto cfg_exact = cfg;
    cfg_exact.algo = Algo::exact;
    Chain a(cfg, nw.net.graph, part, nw.net.z), b(cfg_exact, nw.net.graph, part, nw.net.z);
    a.record_decisions(true);
    b.record_decisions(true);
    for (int s = 0; s < 30; ++s) {
        a.sweep();
        b.sweep();
    }
    CHECK(a.decisions() == b.decisions());
    CHECK(std::abs(a.log_likelihood() - b.log_likelihood()) <= 1e-9 * std::abs(b.log_likelihood()));
}

TEST_CASE("drift beyond tolerance is a numerical error") {
    auto nw = network(30, 0.3, 10);
    auto cfg = base_config(Algo::fast, 1, 0.3, 0, 14);
    cfg.drift_tolerance = 1e-300;
    cfg.refresh_every = 1;
    Chain chain(cfg, nw.net.graph, nw.part, nw.net.z);
    bool thrown = false;
    try {
        for (int s = 0; s < 20; ++s) chain.sweep();
    } catch (const NumericalError&) {
        thrown = true;
    }
    CHECK(thrown);
}

TEST_CASE("initial states are validated") {
    auto nw = network(30, 0.1, 11);
    auto cfg = base_config(Algo::fast, 2, 0.1, 0, 1);
    auto far = nw.net.z;
    far[0] = {1.5, 0.5};
    CHECK_THROWS_AS(Chain(cfg, nw.net.graph, nw.part, far), ConfigError);
    auto spread = nw.net.z;
    spread[nw.part.members()[0].front()] = {0.0, 0.0};
    spread[nw.part.members()[0].back()] = {1.0, 1.0};
    if (nw.part.members()[0].size() > 1) CHECK_THROWS_AS(Chain(cfg, nw.net.graph, nw.part, spread), ConfigError);
}

TEST_CASE("three-node marginals match quadrature") {
    for (Algo a : {Algo::exact, Algo::fast, Algo::faster}) {
        CAPTURE(to_string(a));
        const auto grid = oracle::three_node_grid(oracle::ThreeNodeSetup{}, a);
        double sum = 0.0;
        for (double v : grid) sum += v;
        CHECK(sum == doctest::Approx(1.0));
        CHECK(oracle::three_node_tv(a, 200000, 21) <= 0.05);
    }
}

TEST_CASE("theta marginal with a frozen embedding matches quadrature") {
    oracle::ThreeNodeSetup s;
    auto cfg = s.config(Algo::exact, 0, 5);
    cfg.frozen = {0, 1, 2};
    cfg.update_theta = true;
    cfg.theta_moves = {false, false, true};
    cfg.sigma_sd = 0.4;
    const auto& box = cfg.theta_box;
    Chain chain(cfg, s.g, s.part, s.tau0);
    const int bins = 20;
    std::vector<double> hist(bins, 0.0), grid(bins, 0.0);
    const std::size_t sweeps = 200000;
    const double w = box.hi.sigma - box.lo.sigma;
    for (std::size_t k = 0; k < sweeps; ++k) {
        chain.sweep();
        const int c = std::clamp(static_cast<int>((chain.theta().sigma - box.lo.sigma) / w * bins), 0, bins - 1);
        hist[static_cast<std::size_t>(c)] += 1.0 / static_cast<double>(sweeps);
    }
    long double total = 0.0L;
    std::vector<long double> raw(bins, 0.0L);
    for (int k = 0; k < 200; ++k) {
        LinkParams th = s.theta;
        th.sigma = box.lo.sigma + (k + 0.5) * w / 200;
        const long double v = std::exp(oracle::exact_pairs(s.g, s.tau0, th));
        raw[static_cast<std::size_t>(k / 10)] += v;
        total += v;
    }
    for (int k = 0; k < bins; ++k) grid[static_cast<std::size_t>(k)] = static_cast<double>(raw[static_cast<std::size_t>(k)] / total);
    CHECK(oracle::total_variation(hist, grid) <= 0.05);
}
