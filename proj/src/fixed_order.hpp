#pragma once

#include <array>
#include <cmath>

#include "lpm/link.hpp"
#include "lpm/types.hpp"

// Gaussian-link block terms with the order fixed at compile time. Every loop
// has constant bounds and the index arithmetic folds away; the operations and
// their order match the table-driven route, so results agree bitwise.
namespace lpm::fixed {

constexpr int proj_size(int k) { return (k + 1) * (k + 2) / 2; }
constexpr int pair_size(int k) { return (k + 1) * (k + 2) * (k + 3) * (k + 4) / 24; }
constexpr int proj_pos(int i, int j) { return (i + j) * (i + j + 1) / 2 + j; }

constexpr double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

template <int K>
struct DifferenceTable {
    std::array<int, pair_size(K)> merged{};
    std::array<double, pair_size(K)> coef{};
};

template <int K>
constexpr DifferenceTable<K> make_difference_table() {
    DifferenceTable<K> t;
    int pos = 0;
    for (int d = 0; d <= K; ++d)
        for (int a1 = d; a1 >= 0; --a1)
            for (int a2 = d - a1; a2 >= 0; --a2)
                for (int a3 = d - a1 - a2; a3 >= 0; --a3) {
                    const int a4 = d - a1 - a2 - a3;
                    t.merged[pos] = proj_pos(a1 + a3, a2 + a4);
                    t.coef[pos] = ((a3 + a4) % 2 ? -1.0 : 1.0) * binom(a1 + a3, a1) * binom(a2 + a4, a2);
                    ++pos;
                }
    return t;
}

template <int K>
struct PairTable {
    std::array<int, pair_size(K)> first{}, second{}, merged{};
};

template <int K>
constexpr PairTable<K> make_pair_table() {
    PairTable<K> t;
    int pos = 0;
    for (int d = 0; d <= K; ++d)
        for (int a1 = d; a1 >= 0; --a1)
            for (int a2 = d - a1; a2 >= 0; --a2)
                for (int a3 = d - a1 - a2; a3 >= 0; --a3) {
                    const int a4 = d - a1 - a2 - a3;
                    t.first[pos] = proj_pos(a1, a2);
                    t.second[pos] = proj_pos(a3, a4);
                    t.merged[pos] = proj_pos(a1 + a3, a2 + a4);
                    ++pos;
                }
    return t;
}

// New M1 and Mc rows of block r for a move with increments dt and moved-block
// sums qr, same operations as the table-driven update.
template <int K>
void update_rows(std::size_t blocks, std::size_t r, bool single, const double* m1_row, const double* q1_row,
                 const double* qc, const double* qr, const double* dt, double* o1_row, double* oc_row) {
    constexpr int P = proj_size(K), A = pair_size(K);
    static constexpr PairTable<K> tab = make_pair_table<K>();
    for (std::size_t t = 0; t < blocks; ++t) {
        const double* src1 = m1_row + t * A;
        const double* q1 = q1_row + t * P;
        const double* qt = qc + t * P;
        double* o1 = o1_row + t * A;
        double* oc = oc_row + t * A;
        if (t != r) {
#pragma GCC unroll 128
            for (int a = 0; a < A; ++a) {
                o1[a] = src1[a] + dt[tab.first[a]] * q1[tab.second[a]];
                oc[a] = qr[tab.first[a]] * qt[tab.second[a]];
            }
        } else {
#pragma GCC unroll 128
            for (int a = 0; a < A; ++a) {
                o1[a] = src1[a] + (dt[tab.first[a]] * q1[tab.second[a]] + q1[tab.first[a]] * dt[tab.second[a]]);
                oc[a] = single ? 0.0 : qr[tab.first[a]] * qr[tab.second[a]] - qr[tab.merged[a]];
            }
        }
    }
}

template <int K>
inline void log_jet(const double* p, double* out) {
    out[0] = std::log(p[0]);
    const double inv_p0 = 1.0 / p[0];
#pragma GCC unroll 16
    for (int d = 1; d <= K; ++d) {
#pragma GCC unroll 16
        for (int c = 0; c <= d; ++c) out[proj_pos(d - c, c)] = p[proj_pos(d - c, c)];
#pragma GCC unroll 16
        for (int j = 1; j < d; ++j) {
            const double weight = -static_cast<double>(j) / d;
#pragma GCC unroll 16
            for (int ay = 0; ay <= j; ++ay)
#pragma GCC unroll 16
                for (int by = 0; by <= d - j; ++by)
                    out[proj_pos(d - ay - by, ay + by)] +=
                        weight * out[proj_pos(j - ay, ay)] * p[proj_pos(d - j - by, by)];
        }
#pragma GCC unroll 16
        for (int c = 0; c <= d; ++c) out[proj_pos(d - c, c)] *= inv_p0;
    }
}

template <int K>
void gaussian_terms(const LinkParams& theta, Point w, const double* m1, const double* mc, double& t1, double& t0) {
    constexpr int P = proj_size(K), A = pair_size(K);
    static constexpr DifferenceTable<K> table = make_difference_table<K>();

    const double c = -1.0 / (2.0 * theta.sigma * theta.sigma);
    std::array<double, K + 1> ex, ey;
    ex[0] = ey[0] = 1.0;
    const double lx = 2.0 * c * w.x, ly = 2.0 * c * w.y;
#pragma GCC unroll 16
    for (int i = 1; i <= K; ++i) {
        ex[i] = lx * ex[i - 1];
        ey[i] = ly * ey[i - 1];
        if (i >= 2) {
            ex[i] += 2.0 * c * ex[i - 2];
            ey[i] += 2.0 * c * ey[i - 2];
        }
        ex[i] /= i;
        ey[i] /= i;
    }
    const double e0 = std::exp(c * squared_norm(w));

    std::array<double, P> p, np;
#pragma GCC unroll 16
    for (int d = 0; d <= K; ++d)
#pragma GCC unroll 16
        for (int j = 0; j <= d; ++j) {
            const int g = proj_pos(d - j, j);
            p[g] = theta.beta1 * (e0 * ex[d - j] * ey[j]);
            np[g] = -p[g];
        }
    p[0] += theta.beta0;
    np[0] = 1.0 - p[0];

    std::array<double, P> h1, h0;
    log_jet<K>(p.data(), h1.data());
    log_jet<K>(np.data(), h0.data());

    // re-expand about the origin, x axis then y axis
    const double sx = -w.x, sy = -w.y;
#pragma GCC unroll 16
    for (int j = 0; j <= K; ++j)
#pragma GCC unroll 16
        for (int i0 = 0; i0 < K - j; ++i0)
#pragma GCC unroll 16
            for (int l = K - j - 1; l >= i0; --l) {
                h1[proj_pos(l, j)] += sx * h1[proj_pos(l + 1, j)];
                h0[proj_pos(l, j)] += sx * h0[proj_pos(l + 1, j)];
            }
#pragma GCC unroll 16
    for (int i = 0; i <= K; ++i)
#pragma GCC unroll 16
        for (int i0 = 0; i0 < K - i; ++i0)
#pragma GCC unroll 16
            for (int l = K - i - 1; l >= i0; --l) {
                h1[proj_pos(i, l)] += sy * h1[proj_pos(i, l + 1)];
                h0[proj_pos(i, l)] += sy * h0[proj_pos(i, l + 1)];
            }

    // moments of the coordinate differences tau_i - tau_j
    std::array<double, P> n1{}, n0{};
#pragma GCC unroll 128
    for (int a = 0; a < A; ++a) {
        n1[table.merged[a]] += table.coef[a] * m1[a];
        n0[table.merged[a]] += table.coef[a] * (mc[a] - m1[a]);
    }
    double a1 = 0.0, a0 = 0.0;
#pragma GCC unroll 16
    for (int g = 0; g < P; ++g) {
        a1 += h1[g] * n1[g];
        a0 += h0[g] * n0[g];
    }
    t1 = a1;
    t0 = a0;
}

}  // namespace lpm::fixed
