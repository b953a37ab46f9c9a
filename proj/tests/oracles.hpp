#pragma once

// Independent reference computations shared by the unit and acceptance tests.
// Nothing here calls into the moment or jet machinery under test.

#include <array>
#include <cmath>
#include <vector>

#include "lpm/graph.hpp"
#include "lpm/link.hpp"
#include "lpm/types.hpp"

namespace oracle {

inline long double log_link_ld(int ell, const lpm::LinkParams& th, long double x1, long double x2,
                               long double y1, long double y2) {
    const long double d2 = (x1 - y1) * (x1 - y1) + (x2 - y2) * (x2 - y2);
    const long double s = th.sigma;
    const long double p = th.beta0 + th.beta1 * std::exp(-d2 / (2.0L * s * s));
    return ell == 1 ? std::log(p) : std::log(1.0L - p);
}

// Fourth-order accurate central stencils for derivatives of order 0..4,
// as (offset, weight) pairs in units of h.
inline const std::vector<std::pair<int, long double>>& central_stencil(int order) {
    static const std::array<std::vector<std::pair<int, long double>>, 5> table = {{
        {{0, 1.0L}},
        {{-2, 1.0L / 12}, {-1, -8.0L / 12}, {1, 8.0L / 12}, {2, -1.0L / 12}},
        {{-2, -1.0L / 12}, {-1, 16.0L / 12}, {0, -30.0L / 12}, {1, 16.0L / 12}, {2, -1.0L / 12}},
        {{-3, 1.0L / 8}, {-2, -1.0L}, {-1, 13.0L / 8}, {1, -13.0L / 8}, {2, 1.0L}, {3, -1.0L / 8}},
        {{-3, -1.0L / 6}, {-2, 2.0L}, {-1, -39.0L / 6}, {0, 56.0L / 6}, {1, -39.0L / 6}, {2, 2.0L}, {3, -1.0L / 6}},
    }};
    return table[static_cast<std::size_t>(order)];
}

/// D^alpha g_ell(ys, yt) / alpha! by a tensor product of central differences.
inline long double fd_jet_coefficient(int ell, const lpm::LinkParams& th, lpm::Point ys, lpm::Point yt,
                                      const std::array<int, 4>& alpha, long double h) {
    const auto& s0 = central_stencil(alpha[0]);
    const auto& s1 = central_stencil(alpha[1]);
    const auto& s2 = central_stencil(alpha[2]);
    const auto& s3 = central_stencil(alpha[3]);
    long double acc = 0.0L;
    for (auto [o0, w0] : s0)
        for (auto [o1, w1] : s1)
            for (auto [o2, w2] : s2)
                for (auto [o3, w3] : s3)
                    acc += w0 * w1 * w2 * w3 *
                           log_link_ld(ell, th, ys.x + o0 * h, ys.y + o1 * h, yt.x + o2 * h, yt.y + o3 * h);
    long double fact = 1.0L;
    int deg = 0;
    for (int a : alpha) {
        deg += a;
        for (int i = 2; i <= a; ++i) fact *= i;
    }
    return acc / (std::pow(h, static_cast<long double>(deg)) * fact);
}

inline long double binom_ld(int n, int k) {
    long double r = 1.0L;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Evaluates sum_a coefs[a] * (xi - ys, xj - yt)^alphas[a] term by term.
inline long double taylor_poly_eval(const std::vector<std::array<int, 4>>& alphas,
                                    const std::vector<double>& coefs, lpm::Point ys, lpm::Point yt,
                                    lpm::Point xi, lpm::Point xj) {
    const long double h[4] = {xi.x - ys.x, xi.y - ys.y, xj.x - yt.x, xj.y - yt.y};
    long double acc = 0.0L;
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        long double m = coefs[a];
        for (int c = 0; c < 4; ++c) m *= std::pow(h[c], static_cast<long double>(alphas[a][c]));
        acc += m;
    }
    return acc;
}

/// Log-likelihood summed pair by pair in long double.
inline long double exact_pairs(const lpm::Graph& g, const lpm::Embedding& tau, const lpm::LinkParams& th) {
    long double acc = 0.0L;
    for (lpm::NodeId i = 0; i < g.n(); ++i)
        for (lpm::NodeId j = i + 1; j < g.n(); ++j)
            acc += log_link_ld(g.has_edge(i, j) ? 1 : 0, th, tau[i].x, tau[i].y, tau[j].x, tau[j].y);
    return acc;
}

}  // namespace oracle

namespace oracle {

inline long double mono_ld(lpm::Point p, int a, int b) {
    return std::pow(static_cast<long double>(p.x), static_cast<long double>(a)) *
           std::pow(static_cast<long double>(p.y), static_cast<long double>(b));
}

/// Pair moments by direct enumeration of ordered pairs i != j. which = 1 keeps
/// edges, 0 keeps non-edges, 2 keeps every pair. Layout (s, t, alpha).
inline std::vector<long double> pair_moments(const lpm::Graph& g, const lpm::Embedding& tau,
                                             const std::vector<lpm::BlockId>& assign, std::size_t K,
                                             const std::vector<std::array<int, 4>>& alphas, int which) {
    const std::size_t A = alphas.size();
    std::vector<long double> m(K * K * A, 0.0L);
    for (lpm::NodeId i = 0; i < g.n(); ++i)
        for (lpm::NodeId j = 0; j < g.n(); ++j) {
            if (i == j) continue;
            const bool e = g.has_edge(i, j);
            if ((which == 1 && !e) || (which == 0 && e)) continue;
            long double* out = m.data() + (assign[i] * K + assign[j]) * A;
            for (std::size_t a = 0; a < A; ++a)
                out[a] += mono_ld(tau[i], alphas[a][0], alphas[a][1]) * mono_ld(tau[j], alphas[a][2], alphas[a][3]);
        }
    return m;
}

/// Sum over non-neighbors j != i in block t of tau_j^gamma.
inline long double missing_point_moment(const lpm::Graph& g, const lpm::Embedding& tau,
                                        const std::vector<lpm::BlockId>& assign, lpm::NodeId i, lpm::BlockId t,
                                        std::array<int, 2> gamma) {
    long double acc = 0.0L;
    for (lpm::NodeId j = 0; j < g.n(); ++j)
        if (j != i && assign[j] == t && !g.has_edge(i, j)) acc += mono_ld(tau[j], gamma[0], gamma[1]);
    return acc;
}

}  // namespace oracle
