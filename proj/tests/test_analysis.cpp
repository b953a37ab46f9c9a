#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "lpm/analysis.hpp"
#include "lpm/io.hpp"
#include "lpm/model.hpp"
#include "oracles.hpp"

using namespace lpm;

namespace {
const LinkParams kTheta{0.1, 0.7, 0.6};

Embedding random_points(std::size_t n, Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Embedding x(n);
    for (auto& p : x) p = {u(rng), u(rng)};
    return x;
}

Embedding rigid(const Embedding& x, double angle, Point shift, bool reflect) {
    const double c = std::cos(angle), s = std::sin(angle);
    Embedding y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double px = x[i].x, py = reflect ? -x[i].y : x[i].y;
        y[i] = {c * px - s * py + shift.x, s * px + c * py + shift.y};
    }
    return y;
}

double mse(const Embedding& a, const Embedding& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += squared_distance(a[i], b[i]);
    return s / static_cast<double>(a.size());
}

std::filesystem::path tmp(const std::string& name) { return std::filesystem::temp_directory_path() / name; }
}  // namespace

TEST_CASE("taylor error bound") {
    auto r = taylor_error_bound(10, 1, 0.1, {1.0, 1.0});
    CHECK(r.r == doctest::Approx(1.8).epsilon(1e-14));
    CHECK(r.tv == doctest::Approx(std::exp(3.6) - 1.0));
    for (int k : {0, 1, 5}) CHECK(taylor_error_bound(50, k, 0.0, {2.0, 0.5}).r == 0.0);
    for (int k = 0; k < 8; ++k)
        CHECK(taylor_error_bound(100, k + 1, 0.1, {1.0, 1.0}).r < taylor_error_bound(100, k, 0.1, {1.0, 1.0}).r);
    CHECK(std::isinf(taylor_error_bound(100000, 400, 10.0, {1.0, 0.01}).r));
    CHECK(std::isinf(taylor_error_bound(1000, 1, 1.0, {1.0, 1.0}).tv));
    CHECK_THROWS_AS(taylor_error_bound(10, 1, -0.1, {}), ConfigError);
    CHECK_THROWS_AS(taylor_error_bound(10, 1, 0.1, {1.0, 0.0}), ConfigError);
    // spot check against direct evaluation
    const double direct = 0.5 * 37.0 * 36.0 * 0.3 * std::pow(2.0 / 0.7 * 0.05, 4);
    CHECK(taylor_error_bound(37, 3, 0.05, {0.3, 0.7}).r == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("empirical Taylor error") {
    auto net = sample_graph(50, kTheta, {}, 3);
    const double exact = exact_log_likelihood(net.graph, net.z, kTheta);
    CHECK(empirical_taylor_error(net.graph, net.z, kTheta, Partition::singletons(50), 2) <= 1e-9 * std::abs(exact));
    auto part = build_partition(net.z, 0.2);
    CHECK(empirical_taylor_error(net.graph, net.z, kTheta, part, 4) <
          empirical_taylor_error(net.graph, net.z, kTheta, part, 1));
}

TEST_CASE("procrustes recovers rigid motions") {
    Rng rng(1);
    auto x = random_points(50, rng);
    const double angle = 37.0 * M_PI / 180.0;
    auto a = procrustes_align(x, rigid(x, angle, {1.0, -2.0}, false));
    CHECK(a.mse <= 1e-12);
    CHECK(a.rotation[0] * a.rotation[3] - a.rotation[1] * a.rotation[2] == doctest::Approx(1.0));
    auto r = procrustes_align(x, rigid(x, 0.4, {0.0, 0.0}, true));
    CHECK(r.mse <= 1e-12);
    CHECK(r.rotation[0] * r.rotation[3] - r.rotation[1] * r.rotation[2] == doctest::Approx(-1.0));
    const auto& R = r.rotation;
    CHECK(std::abs(R[0] * R[0] + R[2] * R[2] - 1.0) <= 1e-10);
    CHECK(std::abs(R[0] * R[1] + R[2] * R[3]) <= 1e-10);

    Embedding scaled(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = 2.5 * x[i];
    CHECK(procrustes_align(x, scaled, true).mse <= 1e-12);
    CHECK(procrustes_align(x, scaled, true).scale == doctest::Approx(2.5));
    CHECK(procrustes_align(x, scaled).mse > 0.1);
}

TEST_CASE("procrustes beats identity and random candidates") {
    Rng rng(2);
    std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        auto x = random_points(100, rng), y = random_points(100, rng);
        auto best = procrustes_align(x, y);
        CHECK(best.mse <= mse(x, y) + 1e-15);
        for (int c = 0; c < 100; ++c) {
            auto cand = rigid(x, u(rng), {z(rng), z(rng)}, c % 2 == 1);
            CHECK(best.mse <= mse(cand, y) + 1e-12);
        }
    }
}

TEST_CASE("procrustes degenerate and invalid inputs") {
    Embedding same(5, Point{0.3, 0.3});
    Embedding y{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, 0.5}};
    auto a = procrustes_align(same, y);
    CHECK(a.rotation == std::array<double, 4>{1, 0, 0, 1});
    CHECK(a.points[0].x == doctest::Approx(0.5));
    CHECK_THROWS_AS(procrustes_align(same, Embedding(4)), ConfigError);
    CHECK_THROWS_AS(procrustes_align(Embedding(1), Embedding(1)), ConfigError);
}

TEST_CASE("posterior mean MSE") {
    Rng rng(3);
    std::vector<Sample> s;
    for (int k = 0; k < 5; ++k) s.push_back({static_cast<std::size_t>(k), random_points(20, rng), kTheta});
    CHECK(posterior_mean_mse(s, s) <= 1e-12);
    CHECK_THROWS_AS(posterior_mean({}), ConfigError);
    auto m = posterior_mean(s);
    double x0 = 0.0;
    for (const auto& v : s) x0 += v.tau[0].x / 5.0;
    CHECK(m[0].x == doctest::Approx(x0));
}

TEST_CASE("single node contours") {
    auto net = sample_graph(40, kTheta, {}, 5);
    GridSpec grid{0.0, 1.0, 0.0, 1.0, 30, 30};
    for (auto ev : {Evaluator::exact, Evaluator::fast, Evaluator::faster}) {
        ContourOptions o;
        o.evaluator = ev;
        o.b = 0.125;
        auto c = single_node_contour(net.graph, net.z, 3, kTheta, grid, o);
        double sum = 0.0;
        for (double v : c.prob) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
    GridSpec outside{-0.5, 1.0, 0.0, 1.0, 10, 10};
    CHECK_THROWS_AS(single_node_contour(net.graph, net.z, 3, kTheta, outside), ConfigError);
}

TEST_CASE("exact contour on three nodes matches direct pair sums") {
    auto g = Graph::from_edges(3, std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {1, 2}});
    Embedding tau{{0.2, 0.2}, {0.6, 0.4}, {0.3, 0.9}};
    GridSpec grid{0.0, 1.0, 0.0, 1.0, 15, 15};
    auto c = single_node_contour(g, tau, 1, kTheta, grid);
    const TruncGaussPrior prior;
    std::vector<long double> w;
    long double total = 0.0L;
    for (int ix = 0; ix < 15; ++ix)
        for (int iy = 0; iy < 15; ++iy) {
            auto t = tau;
            t[1] = grid.cell(ix, iy);
            const long double v = std::exp(oracle::exact_pairs(g, t, kTheta) + prior.log_density(t[1]));
            w.push_back(v);
            total += v;
        }
    for (std::size_t k = 0; k < w.size(); ++k) CHECK(std::abs(c.prob[k] - static_cast<double>(w[k] / total)) <= 1e-12);
}

TEST_CASE("approximate contour with singleton blocks equals the exact one") {
    auto net = sample_graph(30, kTheta, {}, 8);
    GridSpec grid{0.1, 0.9, 0.1, 0.9, 12, 12};
    ContourOptions o;
    o.evaluator = Evaluator::fast;
    o.b = 1e-6;
    auto a = single_node_contour(net.graph, net.z, 4, kTheta, grid, o);
    auto e = single_node_contour(net.graph, net.z, 4, kTheta, grid);
    for (std::size_t k = 0; k < a.prob.size(); ++k) CHECK(std::abs(a.prob[k] - e.prob[k]) <= 1e-9);
}

TEST_CASE("peer selection and distance statistics") {
    Rng rng(4);
    auto truth = random_points(61, rng);
    auto p = select_peers(truth, 0);
    const double d0 = distance(truth[0], truth[p.nodes[0]]), d1 = distance(truth[0], truth[p.nodes[1]]),
                 d2 = distance(truth[0], truth[p.nodes[2]]);
    CHECK(d0 < d1);
    CHECK(d1 < d2);
    auto q = select_peers_seeded(truth, 99);
    CHECK(q.center == select_peers_seeded(truth, 99).center);
    CHECK(q.nodes == select_peers_seeded(truth, 99).nodes);

    std::vector<Sample> same(4, Sample{0, truth, kTheta});
    auto st = distance_statistics(same, 0, {p.nodes.begin(), p.nodes.end()}, 5);
    for (const auto& v : st.distances)
        for (double d : v) CHECK(d == v.front());
    CHECK(st.order_stats.size() == 5);
    CHECK(st.order_stats[0].q05 == st.order_stats[0].q95);
    CHECK(st.order_stats[0].mean <= st.order_stats[1].mean);

    std::vector<Sample> moved;
    std::uniform_real_distribution<double> u(0.0, 6.0);
    for (int k = 0; k < 6; ++k) moved.push_back({0, rigid(truth, u(rng), {u(rng), -u(rng)}, k % 2 == 0), kTheta});
    auto sm = distance_statistics(moved, 0, {p.nodes.begin(), p.nodes.end()}, 5);
    for (std::size_t k = 0; k < 3; ++k)
        for (double d : sm.distances[k]) CHECK(d == doctest::Approx(st.distances[k][0]).epsilon(1e-12));
    CHECK_THROWS_AS(distance_statistics({same[0]}, 0, {1}), ConfigError);
}

TEST_CASE("kernel density estimate") {
    std::vector<double> v{0.1, 0.2, 0.25, 0.4, 0.5, 0.55, 0.9};
    const double h = silverman_bandwidth(v);
    CHECK(h > 0.0);
    std::vector<double> at;
    for (int k = 0; k <= 4000; ++k) at.push_back(-2.0 + k * 0.001);
    auto d = gaussian_kde(v, at);
    double integral = 0.0;
    for (double x : d) integral += x * 0.001;
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(quantile({3, 1, 2}, 0.5) == 2.0);
    CHECK(quantile({0, 10}, 0.25) == 2.5);
}

TEST_CASE("bench sweep") {
    BenchSpec s;
    s.sizes = {60, 120};
    s.b = 0.3;
    s.sweeps = 2;
    s.repeats = 2;
    auto rows = bench_sweep(s);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].n == 120);
    CHECK(rows[0].median_sweep_ms > 0.0);
    s.sweeps = 0;
    CHECK(bench_sweep(s).empty());
}

TEST_CASE("csv round trips") {
    Rng rng(6);
    auto tau = random_points(12, rng);
    write_embedding(tmp("lpm_emb.csv"), tau, {{"seed", "6"}});
    CHECK(read_embedding(tmp("lpm_emb.csv")) == tau);
    CHECK(read_csv(tmp("lpm_emb.csv")).meta.at("seed") == "6");

    std::vector<Sample> s{{20, tau, kTheta}, {40, random_points(12, rng), {0.2, 0.5, 0.31}}};
    write_samples(tmp("lpm_s_emb.csv"), tmp("lpm_s_th.csv"), s);
    auto back = read_samples(tmp("lpm_s_emb.csv"), tmp("lpm_s_th.csv"));
    REQUIRE(back.size() == 2);
    CHECK(back[1].sweep == 40);
    CHECK(back[1].tau == s[1].tau);
    CHECK(back[1].theta == s[1].theta);

    CHECK_THROWS_AS(read_csv(tmp("lpm_does_not_exist.csv")), ConfigError);
    CHECK_THROWS_AS(parse_double("1.5x"), ConfigError);
    for (const char* f : {"lpm_emb.csv", "lpm_s_emb.csv", "lpm_s_th.csv"}) std::filesystem::remove(tmp(f));
}
