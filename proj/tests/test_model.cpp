#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "lpm/model.hpp"
#include "oracles.hpp"

using namespace lpm;

namespace {
const LinkParams kTheta{0.1, 0.7, 0.6};

Embedding random_embedding(std::size_t n, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Embedding tau(n);
    for (auto& p : tau) p = {u(rng), u(rng)};
    return tau;
}

Graph random_graph(std::size_t n, double density, Rng& rng) {
    std::bernoulli_distribution coin(density);
    std::vector<std::pair<NodeId, NodeId>> e;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j)
            if (coin(rng)) e.emplace_back(i, j);
    return Graph::from_edges(n, e);
}
}  // namespace

TEST_CASE("multi-index sets have stars-and-bars sizes") {
    for (int k = 0; k <= 6; ++k) {
        MultiIndexSet s(k);
        CHECK(s.size() == static_cast<std::size_t>(binomial(k + 4, 4)));
        CHECK(s.proj_size() == static_cast<std::size_t>(binomial(k + 2, 2)));
    }
    MultiIndexSet s4(4);
    CHECK(s4.size() == 70);
    CHECK(s4.proj_size() == 15);
    CHECK(s4.pairs()[1] == std::array<int, 4>{1, 0, 0, 0});
    CHECK(s4.pairs()[4] == std::array<int, 4>{0, 0, 0, 1});
    for (std::size_t a = 0; a < s4.size(); ++a) {
        CHECK(s4.pairs().find(s4.pairs()[a]) == static_cast<long>(a));
        CHECK(s4.swapped(s4.swapped(a)) == a);
        if (a > 0) CHECK(s4.pairs().degree(a) >= s4.pairs().degree(a - 1));
    }
}

TEST_CASE("link_prob examples") {
    CHECK(link_prob(kTheta, {0.3, 0.3}, {0.3, 0.3}) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(link_prob(kTheta, {0, 0}, {1e3, 0}) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(link_prob(kTheta, {0, 0}, {0.6, 0}) == doctest::Approx(0.1 + 0.7 * std::exp(-0.5)).epsilon(1e-15));
    CHECK(link_prob(kTheta, {0, 0}, {0.6, 0}) == doctest::Approx(0.524571).epsilon(1e-6));
}

TEST_CASE("invalid link parameters are configuration errors") {
    CHECK_THROWS_AS(link_prob({0.0, 0.7, 0.6}, {0, 0}, {1, 1}), ConfigError);
    CHECK_THROWS_AS(link_prob({0.1, 0.0, 0.6}, {0, 0}, {1, 1}), ConfigError);
    CHECK_THROWS_AS(link_prob({0.4, 0.6, 0.6}, {0, 0}, {1, 1}), ConfigError);
    CHECK_THROWS_AS(link_prob({0.1, 0.7, 0.01}, {0, 0}, {1, 1}), ConfigError);
    CHECK_THROWS_AS(sample_graph(5, {0.0, 0.99, 1e6}, {}, 1), ConfigError);
}

TEST_CASE("log_link examples and complement identity") {
    CHECK(log_link(1, kTheta, {0.2, 0.2}, {0.2, 0.2}) == doctest::Approx(std::log(0.8)).epsilon(1e-14));
    CHECK(log_link(0, kTheta, {0.2, 0.2}, {0.2, 0.2}) == doctest::Approx(std::log(0.2)).epsilon(1e-14));
    CHECK(log_link(1, kTheta, {0.2, 0.2}, {0.2, 0.2}) == doctest::Approx(-0.22314).epsilon(1e-5));
    CHECK(log_link(0, kTheta, {0.2, 0.2}, {0.2, 0.2}) == doctest::Approx(-1.60944).epsilon(1e-5));
    Rng rng(7);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    for (int t = 0; t < 2000; ++t) {
        Point x{u(rng), u(rng)}, y{u(rng), u(rng)};
        const double s = std::exp(log_link(1, kTheta, x, y)) + std::exp(log_link(0, kTheta, x, y));
        CHECK(std::abs(s - 1.0) <= 1e-12);
        CHECK(link_prob(kTheta, x, y) == link_prob(kTheta, y, x));
    }
}

TEST_CASE("jet constant term and stationary point") {
    const Point ys{0.2, 0.3}, yt{0.5, 0.1};
    for (int ell : {0, 1}) {
        auto j = log_link_jet(ell, kTheta, ys, yt, 4);
        CHECK(j.size() == 70);
        CHECK(j[0] == doctest::Approx(log_link(ell, kTheta, ys, yt)).epsilon(1e-14));
        auto j1 = log_link_jet(ell, kTheta, ys, ys, 1);
        for (std::size_t i = 1; i < j1.size(); ++i) CHECK(std::abs(j1[i]) <= 1e-15);
    }
    MultiIndexSet s(3);
    auto c = Jet<4>::constant(s.pairs(), -2.5);
    auto e = log(exp(c));
    CHECK(e[0] == doctest::Approx(-2.5));
    for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i] == 0.0);
}

TEST_CASE("jet arithmetic matches polynomial algebra") {
    MultiIndexSet s(4);
    const auto& idx = s.proj();
    auto x = Jet<2>::variable(idx, 0, 0.0);
    auto y = Jet<2>::variable(idx, 1, 0.0);
    // exp(x + y) = sum (x+y)^d / d!
    auto e = exp(x + y);
    CHECK(e.coeff({2, 1}) == doctest::Approx(3.0 / 6.0));
    CHECK(e.coeff({0, 4}) == doctest::Approx(1.0 / 24.0));
    // log(1 + x) = x - x^2/2 + x^3/3 - x^4/4
    auto l = log(1.0 + x);
    CHECK(l.coeff({1, 0}) == doctest::Approx(1.0));
    CHECK(l.coeff({2, 0}) == doctest::Approx(-0.5));
    CHECK(l.coeff({3, 0}) == doctest::Approx(1.0 / 3.0));
    CHECK(l.coeff({4, 0}) == doctest::Approx(-0.25));
    CHECK(l.coeff({1, 1}) == 0.0);
    auto p = (1.0 + x) * (2.0 + y);
    CHECK(p.evaluate({0.3, -0.7}) == doctest::Approx(1.3 * 1.3));
}

TEST_CASE("jet coefficients match finite differences at the documented point") {
    const Point ys{0.2, 0.3}, yt{0.5, 0.1};
    auto set = multi_index_set(4);
    for (int ell : {0, 1}) {
        auto j = log_link_jet(ell, kTheta, ys, yt, 4);
        for (std::size_t a = 0; a < set->size(); ++a) {
            const long double fd = oracle::fd_jet_coefficient(ell, kTheta, ys, yt, set->pairs()[a], 2e-3L);
            const double tol = std::abs(j[a]) < 1e-3 ? 1e-8 : 1e-5 * std::abs(j[a]);
            CHECK(std::abs(j[a] - static_cast<double>(fd)) <= tol);
        }
    }
}

TEST_CASE("difference jets agree with the four-variable jet") {
    auto set = multi_index_set(4);
    Rng rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> h1(set->proj_size()), h0(set->proj_size());
    for (int t = 0; t < 50; ++t) {
        Point ys{u(rng), u(rng)}, yt{u(rng), u(rng)};
        gaussian_link().difference_jets(kTheta, ys - yt, set->proj(), h1, h0);
        auto j1 = log_link_jet(1, kTheta, ys, yt, 4);
        auto j0 = log_link_jet(0, kTheta, ys, yt, 4);
        // alpha = (g1, g2, 0, 0) is the derivative in the difference variable directly
        for (std::size_t g = 0; g < set->proj_size(); ++g) {
            const auto gam = set->proj()[g];
            CHECK(j1.coeff({gam[0], gam[1], 0, 0}) == doctest::Approx(h1[g]).epsilon(1e-12));
            CHECK(j0.coeff({gam[0], gam[1], 0, 0}) == doctest::Approx(h0[g]).epsilon(1e-12));
        }
    }
}

TEST_CASE("exact likelihood small cases") {
    auto one = Graph::from_edges(2, std::vector<std::pair<NodeId, NodeId>>{{0, 1}});
    Graph none(2);
    Embedding tau{{0.3, 0.3}, {0.3, 0.3}};
    CHECK(exact_log_likelihood(one, tau, kTheta) == doctest::Approx(std::log(0.8)).epsilon(1e-14));
    CHECK(exact_log_likelihood(none, tau, kTheta) == doctest::Approx(std::log(0.2)).epsilon(1e-14));
    CHECK(exact_delta_log_likelihood(one, tau, 1, {0.9, 0.3}, kTheta) ==
          doctest::Approx(std::log(0.1 + 0.7 * std::exp(-0.5)) - std::log(0.8)).epsilon(1e-12));
    CHECK(exact_delta_log_likelihood(one, tau, 1, {0.9, 0.3}, kTheta) == doctest::Approx(-0.42203).epsilon(1e-5));
    CHECK(exact_delta_log_likelihood(one, tau, 1, tau[1], kTheta) == 0.0);

    Rng rng(11);
    auto t5 = random_embedding(7, rng);
    Graph empty(7);
    double ref = 0.0;
    for (NodeId i = 0; i < 7; ++i)
        for (NodeId j = i + 1; j < 7; ++j) ref += log_link(0, kTheta, t5[i], t5[j]);
    CHECK(exact_log_likelihood(empty, t5, kTheta) == doctest::Approx(ref).epsilon(1e-13));
}

TEST_CASE("exact likelihood agrees with the long double pair sum and the serial reference") {
    Rng rng(5);
    for (int t = 0; t < 10; ++t) {
        auto tau = random_embedding(80, rng);
        auto g = random_graph(80, 0.2, rng);
        const double l = exact_log_likelihood(g, tau, kTheta);
        CHECK(l == doctest::Approx(static_cast<double>(oracle::exact_pairs(g, tau, kTheta))).epsilon(1e-12));
        CHECK(l == doctest::Approx(serial::exact_log_likelihood(g, tau, kTheta)).epsilon(1e-14));
    }
}

TEST_CASE("exact delta agrees with full recomputation") {
    Rng rng(9);
    std::uniform_int_distribution<int> nd(2, 100);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = static_cast<std::size_t>(nd(rng));
        auto tau = random_embedding(n, rng);
        auto g = random_graph(n, u(rng) * 0.5, rng);
        const NodeId k = static_cast<NodeId>(rng() % n);
        Point np{u(rng), u(rng)};
        auto moved = tau;
        moved[k] = np;
        const double full = exact_log_likelihood(g, moved, kTheta) - exact_log_likelihood(g, tau, kTheta);
        CHECK(std::abs(exact_delta_log_likelihood(g, tau, k, np, kTheta) - full) <= 1e-10);
    }
}

TEST_CASE("graph construction and edge list round trip") {
    std::vector<std::pair<NodeId, NodeId>> e{{0, 1}, {1, 0}, {2, 1}, {0, 1}, {3, 0}};
    auto g = Graph::from_edges(5, e);
    CHECK(g.m_und() == 3);
    CHECK(g.directed_edge_count() == 6);
    CHECK(g.has_edge(1, 2));
    CHECK(g.has_edge(2, 1));
    CHECK_FALSE(g.has_edge(4, 0));
    for (NodeId i = 0; i < 5; ++i)
        for (NodeId j : g.neighbors(i)) CHECK(g.has_edge(j, i));
    std::vector<std::pair<NodeId, NodeId>> loop{{2, 2}};
    CHECK_THROWS_AS(Graph::from_edges(3, loop), ConfigError);

    auto path = std::filesystem::temp_directory_path() / "lpm_test_edges.txt";
    write_edge_list(path, g);
    auto back = read_edge_list(path);
    CHECK(back.n() == 5);
    CHECK(back.edges() == g.edges());
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_edge_list("/nonexistent/graph.txt"), ConfigError);
}

TEST_CASE("sample_graph") {
    auto one = sample_graph(1, kTheta, {}, 3);
    CHECK(one.graph.m_und() == 0);
    auto a = sample_graph(200, kTheta, {}, 42);
    auto b = sample_graph(200, kTheta, {}, 42);
    CHECK(a.z == b.z);
    CHECK(a.graph.edges() == b.graph.edges());
    for (auto p : a.z) CHECK(Domain{}.contains(p));
}

TEST_CASE("sample_graph edge density matches the pairwise mean at n=2000") {
    const std::size_t n = 2000;
    auto net = sample_graph(n, kTheta, {}, 1);
    const auto& link = gaussian_link();
    double sum_p = 0.0, sum_var = 0.0;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j) {
            const double p = link.prob(kTheta, net.z[i], net.z[j]);
            sum_p += p;
            sum_var += p * (1.0 - p);
        }
    const double pairs = n * (n - 1) / 2.0;
    const double expected = sum_p / pairs;
    const double se = std::sqrt(sum_var) / pairs;
    const double observed = static_cast<double>(net.graph.m_und()) / pairs;
    CHECK(std::abs(observed - expected) <= 3.0 * se);
}

TEST_CASE("truncated Gaussian prior") {
    TruncGaussPrior prior;
    CHECK(std::isinf(prior.log_density({1.5, 0.5})));
    CHECK(prior.log_density({0.5, 0.5}) == 0.0);
    Rng rng(1);
    double mx = 0.0;
    for (int i = 0; i < 20000; ++i) mx += prior.sample(rng).x;
    CHECK(mx / 20000 == doctest::Approx(0.5).epsilon(0.01));
}
