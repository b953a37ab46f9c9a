#include "lpm/moments.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "fixed_order.hpp"
#include "lpm/model.hpp"

namespace lpm {

namespace {

std::vector<Point> block_centers(const Embedding& tau, const Partition& part) {
    std::vector<Point> c(part.K(), Point{0.0, 0.0});
    for (NodeId i = 0; i < tau.size(); ++i) c[part.assign[i]] = c[part.assign[i]] + tau[i];
    for (std::size_t s = 0; s < c.size(); ++s) c[s] = (1.0 / static_cast<double>(part.block_sizes[s])) * c[s];
    return c;
}

void check_sizes(const Embedding& tau, const Graph& g, const Partition& part) {
    if (tau.size() != g.n() || part.n() != g.n())
        throw ConfigError("moment initialization: embedding, graph and partition sizes differ");
}

MomentStore empty_store(const Embedding& tau, const Partition& part, std::shared_ptr<const MultiIndexSet> idx,
                        MomentMode mode) {
    MomentStore st;
    st.idx = std::move(idx);
    st.mode = mode;
    st.assign = part.assign;
    st.block_sizes = part.block_sizes;
    st.points = tau;
    st.centers = block_centers(tau, part);
    const std::size_t K = part.K();
    st.m1.assign(K * K * st.A(), 0.0);
    st.mc.assign(K * K * st.A(), 0.0);
    st.qc.assign(K * st.P(), 0.0);
    st.qc_lo.assign(K * st.P(), 0.0);
    std::vector<double> mono(st.P());
    for (NodeId i = 0; i < tau.size(); ++i) {
        st.idx->proj().monomials({tau[i].x, tau[i].y}, mono);
        double* q = st.qc.data() + part.assign[i] * st.P();
        for (std::size_t g = 0; g < st.P(); ++g) q[g] += mono[g];
    }
    return st;
}

// Mc[s][t] from Qc for s <= t, mirrored into (t, s).
void fill_mc(MomentStore& st) {
    const std::size_t K = st.K(), A = st.A();
    const auto& idx = *st.idx;
    const long Kl = static_cast<long>(K);
#pragma omp parallel for schedule(dynamic, 4)
    for (long sl = 0; sl < Kl; ++sl) {
        const auto s = static_cast<BlockId>(sl);
        const double* qs = st.qc.data() + s * st.P();
        for (BlockId t = s; t < K; ++t) {
            const double* qt = st.qc.data() + t * st.P();
            double* row = st.mc.data() + (s * K + t) * A;
            double* col = st.mc.data() + (t * K + s) * A;
            // a single-node block has no ordered pairs with itself
            const bool empty = s == t && st.block_sizes[s] == 1;
            for (std::size_t a = 0; a < A; ++a) {
                double v = qs[idx.first(a)] * qt[idx.second(a)];
                if (s == t) v -= qs[idx.merged(a)];
                if (empty) v = 0.0;
                row[a] = v;
                col[idx.swapped(a)] = v;
            }
        }
    }
}

// (hi, lo) += x by error-free transformations, renormalized so that hi is
// the rounded value of the sum.
inline void dd_add(double& hi, double& lo, double x) {
    const double s = hi + x;
    const double bb = s - hi;
    const double e = (hi - (s - bb)) + (x - bb);
    const double t = lo + e;
    hi = s + t;
    lo = t - (hi - s);
}

// Mc[r][.] from the moved block's new Qc row, in the operand order of fill_mc.
void mc_row_from_qc(const MomentStore& store, BlockId r, const double* qr, double* out) {
    const std::size_t K = store.K(), A = store.A(), P = store.P();
    const auto first = store.idx->firsts(), second = store.idx->seconds(), merged = store.idx->mergeds();
    for (BlockId t = 0; t < K; ++t) {
        double* oc = out + t * A;
        if (t != r) {
            const double* qt = store.qc.data() + t * P;
            for (std::size_t a = 0; a < A; ++a) oc[a] = qr[first[a]] * qt[second[a]];
        } else if (store.block_sizes[r] == 1) {
            std::fill(oc, oc + A, 0.0);
        } else {
            for (std::size_t a = 0; a < A; ++a) oc[a] = qr[first[a]] * qr[second[a]] - qr[merged[a]];
        }
    }
}

// Makes the diagonal slices exactly symmetric under alpha -> swapped(alpha).
void symmetrize_diagonal(std::vector<double>& m, std::size_t K, const MultiIndexSet& idx) {
    const std::size_t A = idx.size();
    for (std::size_t s = 0; s < K; ++s) {
        double* d = m.data() + (s * K + s) * A;
        for (std::size_t a = 0; a < A; ++a) {
            const std::size_t b = idx.swapped(a);
            if (b <= a) continue;
            const double v = 0.5 * (d[a] + d[b]);
            d[a] = v;
            d[b] = v;
        }
    }
}

}  // namespace

double MomentStore::q0(NodeId i, BlockId t, std::size_t g) const {
    const std::size_t c = t * P() + g, o = (i * K() + t) * P() + g;
    double v = qc[c] - q1[o];
    if (assign[i] == t) {
        const auto& gam = idx->proj()[g];
        v -= std::pow(points[i].x, gam[0]) * std::pow(points[i].y, gam[1]);
    }
    return v + (qc_lo[c] - q1_lo[o]);
}

BlockEdgeCounts precompute_block_edge_counts(const Graph& g, const Partition& part) {
    if (part.n() != g.n()) throw ConfigError("block edge counts: graph and partition sizes differ");
    BlockEdgeCounts c;
    c.n = g.n();
    c.K = part.K();
    c.counts.assign(c.n * c.K, 0);
    for (NodeId i = 0; i < g.n(); ++i)
        for (NodeId j : g.neighbors(i)) ++c.counts[i * c.K + part.assign[j]];
    return c;
}

MomentStore initialize_qm(const Embedding& tau, const Graph& g, const Partition& part,
                          std::shared_ptr<const MultiIndexSet> idx) {
    check_sizes(tau, g, part);
    MomentStore st = empty_store(tau, part, std::move(idx), MomentMode::full);
    const std::size_t n = st.n(), K = st.K(), A = st.A(), P = st.P();
    const auto& mi = *st.idx;

    std::vector<double> mono(n * P);
    for (NodeId i = 0; i < n; ++i) mi.proj().monomials({tau[i].x, tau[i].y}, {mono.data() + i * P, P});

    st.q1.assign(n * K * P, 0.0);
    st.q1_lo.assign(n * K * P, 0.0);
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j : g.neighbors(i)) {
            double* q = st.q1.data() + (i * K + part.assign[j]) * P;
            const double* mj = mono.data() + j * P;
            for (std::size_t c = 0; c < P; ++c) q[c] += mj[c];
        }

    // M1[s][t][a] = sum_{a(i)=s} tau_i^(a1,a2) Q1[i][t][(a3,a4)], for s <= t, mirrored
    const auto members = part.members();
    const long Kl = static_cast<long>(K);
#pragma omp parallel for schedule(dynamic, 4)
    for (long sl = 0; sl < Kl; ++sl) {
        const auto s = static_cast<BlockId>(sl);
        for (NodeId i : members[s]) {
            const double* mi_ = mono.data() + i * P;
            for (BlockId t = s; t < K; ++t) {
                const double* q = st.q1.data() + (i * K + t) * P;
                if (q[0] == 0.0) continue;
                double* row = st.m1.data() + (s * K + t) * A;
                for (std::size_t a = 0; a < A; ++a) row[a] += mi_[mi.first(a)] * q[mi.second(a)];
            }
        }
        for (BlockId t = s + 1; t < K; ++t) {
            const double* row = st.m1.data() + (s * K + t) * A;
            double* col = st.m1.data() + (t * K + s) * A;
            for (std::size_t a = 0; a < A; ++a) col[mi.swapped(a)] = row[a];
        }
    }
    symmetrize_diagonal(st.m1, K, mi);
    fill_mc(st);
    return st;
}

MomentStore initialize_m(const Embedding& tau, const Graph& g, const Partition& part,
                         const BlockEdgeCounts& counts) {
    check_sizes(tau, g, part);
    if (counts.n != g.n() || counts.K != part.K()) throw ConfigError("initialize_m: edge count table does not match");
    MomentStore st = empty_store(tau, part, multi_index_set(1), MomentMode::first_order);
    const std::size_t K = st.K(), A = st.A();
    // pair index order at order 1: 0, e1, e2, e3, e4
    for (NodeId i = 0; i < tau.size(); ++i) {
        const BlockId s = part.assign[i];
        const auto row = counts.row(i);
        for (BlockId t = 0; t < K; ++t) {
            if (row[t] == 0) continue;
            const double e = row[t];
            double* m = st.m1.data() + (s * K + t) * A;
            m[0] += e;
            m[1] += e * tau[i].x;
            m[2] += e * tau[i].y;
        }
    }
    for (BlockId s = 0; s < K; ++s)
        for (BlockId t = 0; t < K; ++t) {
            const double* m = st.m1.data() + (t * K + s) * A;
            double* o = st.m1.data() + (s * K + t) * A;
            o[3] = m[1];
            o[4] = m[2];
        }
    fill_mc(st);
    return st;
}

double taylor_block_sum(std::span<const double> jet, Point ys, Point yt, std::span<const double> m,
                        const PairIndex& idx) {
    std::array<double, 512> mono_buf;
    std::vector<double> mono_heap;
    std::span<double> mono;
    if (idx.size() <= mono_buf.size()) {
        mono = {mono_buf.data(), idx.size()};
    } else {
        mono_heap.resize(idx.size());
        mono = mono_heap;
    }
    idx.monomials({-ys.x, -ys.y, -yt.x, -yt.y}, mono);
    double acc = 0.0;
    for (const auto& st : idx.shift_terms()) acc += jet[st.alpha] * st.binom * mono[st.power] * m[st.beta];
    return acc;
}

BlockTermEvaluator::BlockTermEvaluator(std::shared_ptr<const MultiIndexSet> idx, const LinkFunction& link,
                                       const LinkParams& theta, Route route)
    : idx_(std::move(idx)), link_(&link), theta_(theta) {
    const std::size_t P = idx_->proj_size(), A = idx_->size();
    h1_.resize(P);
    h0_.resize(P);
    hat1_.resize(P);
    hat0_.resize(P);
    n1_.resize(P);
    n0_.resize(P);
    jet1_.resize(A);
    jet0_.resize(A);
    m0_.resize(A);
    dcoef_.resize(A);
    for (const auto& dt : idx_->difference_terms()) dcoef_[dt.alpha] = dt.coef;
    reduced_ = route != Route::generic && link_->difference_jets(theta_, Point{0.0, 0.0}, idx_->proj(), h1_, h0_);
    if (route == Route::automatic && dynamic_cast<const GaussianLink*>(link_)) {
        switch (idx_->kappa()) {
            case 0: fixed_ = &fixed::gaussian_terms<0>; break;
            case 1: fixed_ = &fixed::gaussian_terms<1>; break;
            case 2: fixed_ = &fixed::gaussian_terms<2>; break;
            case 3: fixed_ = &fixed::gaussian_terms<3>; break;
            case 4: fixed_ = &fixed::gaussian_terms<4>; break;
            default: break;
        }
    }
}

void BlockTermEvaluator::terms(Point ys, Point yt, std::span<const double> m1, std::span<const double> mc,
                               double& t1, double& t0) {
    const MultiIndexSet& idx = *idx_;
    if (!reduced_) {
        const std::size_t A = idx.size();
        link_->log_link_jet(1, theta_, ys, yt, idx.pairs(), jet1_);
        link_->log_link_jet(0, theta_, ys, yt, idx.pairs(), jet0_);
        for (std::size_t a = 0; a < A; ++a) m0_[a] = mc[a] - m1[a];
        t1 = taylor_block_sum(jet1_, ys, yt, m1, idx.pairs());
        t0 = taylor_block_sum(jet0_, ys, yt, m0_, idx.pairs());
        return;
    }
    const Point w = ys - yt;
    if (fixed_) {
        fixed_(theta_, w, m1.data(), mc.data(), t1, t0);
        return;
    }
    const std::size_t P = idx.proj_size(), A = idx.size();
    link_->difference_jets(theta_, w, idx.proj(), h1_, h0_);
    // re-expand the Taylor polynomial in (z - w) as a polynomial in z
    const auto& proj = idx.proj();
    for (std::size_t g = 0; g < P; ++g) {
        hat1_[g] = h1_[g];
        hat0_[g] = h0_[g];
    }
    const std::array<double, 2> shift{-w.x, -w.y};
    for (std::size_t axis = 0; axis < 2; ++axis)
        for (const auto& st : proj.axis_steps(axis)) {
            hat1_[st.dst] += shift[axis] * hat1_[st.src];
            hat0_[st.dst] += shift[axis] * hat0_[st.src];
        }
    // moments of the coordinate differences tau_i - tau_j
    const auto merged = idx.mergeds();
    for (std::size_t g = 0; g < P; ++g) n1_[g] = n0_[g] = 0.0;
    for (std::size_t a = 0; a < A; ++a) {
        n1_[merged[a]] += dcoef_[a] * m1[a];
        n0_[merged[a]] += dcoef_[a] * (mc[a] - m1[a]);
    }
    double a1 = 0.0, a0 = 0.0;
    for (std::size_t g = 0; g < P; ++g) {
        a1 += hat1_[g] * n1_[g];
        a0 += hat0_[g] * n0_[g];
    }
    t1 = a1;
    t0 = a0;
}

double compute_block_terms(const MomentStore& store, const LinkParams& theta, BlockTermCache& cache,
                           const LinkFunction& link) {
    const std::size_t K = store.K();
    cache.K = K;
    cache.t1.assign(K * K, 0.0);
    cache.t0.assign(K * K, 0.0);
    std::vector<double> rows(K, 0.0);
    const long Kl = static_cast<long>(K);
#pragma omp parallel
    {
        BlockTermEvaluator eval(store.idx, link, theta);
#pragma omp for schedule(dynamic, 4)
        for (long sl = 0; sl < Kl; ++sl) {
            const auto s = static_cast<BlockId>(sl);
            double row = 0.0;
            for (BlockId t = s; t < K; ++t) {
                double t1 = 0.0, t0 = 0.0;
                eval.terms(store.centers[s], store.centers[t], store.m1_slice(s, t), store.mc_slice(s, t), t1, t0);
                cache.t1[s * K + t] = cache.t1[t * K + s] = t1;
                cache.t0[s * K + t] = cache.t0[t * K + s] = t0;
                row += (s == t ? 0.5 : 1.0) * (t1 + t0);
            }
            rows[s] = row;
        }
    }
    double total = 0.0;
    for (double r : rows) total += r;
    return total;
}

double approx_log_likelihood(const MomentStore& store, const LinkParams& theta, const LinkFunction& link) {
    theta.validate(0.0);
    BlockTermCache cache;
    return compute_block_terms(store, theta, cache, link);
}

namespace serial {

double approx_log_likelihood(const MomentStore& store, const LinkParams& theta, const LinkFunction& link) {
    theta.validate(0.0);
    const auto& idx = store.idx->pairs();
    const std::size_t K = store.K(), A = store.A();
    std::vector<double> j1(A), j0(A), m0(A);
    double total = 0.0;
    for (BlockId s = 0; s < K; ++s)
        for (BlockId t = 0; t < K; ++t) {
            const Point ys = store.centers[s], yt = store.centers[t];
            link.log_link_jet(1, theta, ys, yt, idx, j1);
            link.log_link_jet(0, theta, ys, yt, idx, j0);
            const auto m1 = store.m1_slice(s, t);
            const auto mc = store.mc_slice(s, t);
            for (std::size_t a = 0; a < A; ++a) m0[a] = mc[a] - m1[a];
            total += 0.5 * (taylor_block_sum(j1, ys, yt, m1, idx) + taylor_block_sum(j0, ys, yt, m0, idx));
        }
    return total;
}

}  // namespace serial

void compute_dtau(const MomentStore& store, NodeId k, Point new_point, ProposedDeltas& out) {
    const std::size_t P = store.P();
    out.k = k;
    out.r = store.assign[k];
    out.old_point = store.points[k];
    out.new_point = new_point;
    out.revision = store.revision;
    out.dtau.resize(P);
    out.mono_old.resize(P);
    out.mono_new.resize(P);
    out.qc_row.resize(P);
    store.idx->proj().monomials({out.old_point.x, out.old_point.y}, out.mono_old);
    store.idx->proj().monomials({new_point.x, new_point.y}, out.mono_new);
    const double* qc = store.qc.data() + out.r * P;
    const double* qc_lo = store.qc_lo.data() + out.r * P;
    for (std::size_t g = 0; g < P; ++g) {
        out.dtau[g] = out.mono_new[g] - out.mono_old[g];
        double hi = qc[g], lo = qc_lo[g];
        dd_add(hi, lo, out.mono_new[g]);
        dd_add(hi, lo, -out.mono_old[g]);
        out.qc_row[g] = hi;
    }
    out.new_center = store.centers[out.r] + (1.0 / static_cast<double>(store.block_sizes[out.r])) * (new_point - out.old_point);
    out.has_terms = false;
    out.delta_ltilde = 0.0;
}

ProposedDeltas update_q(const MomentStore& store, NodeId k, Point new_point, const Graph& g) {
    (void)g;
    ProposedDeltas d;
    compute_dtau(store, k, new_point, d);
    return d;
}

namespace {

// Block terms of the proposed row and the resulting Delta L~. Pairs are
// evaluated in the (min, max) orientation used by compute_block_terms.
void finish_terms(const MomentStore& store, BlockTermEvaluator& eval, const BlockTermCache* cache,
                  ProposedDeltas& out) {
    const std::size_t K = store.K(), A = store.A();
    const auto swapped = [&](std::size_t a) { return store.idx->swapped(a); };
    const BlockId r = out.r;
    out.t1_row.resize(K);
    out.t0_row.resize(K);
    std::vector<double> sw1(A), swc(A);
    double delta = 0.0;
    for (BlockId t = 0; t < K; ++t) {
        const double* row1 = out.m1_row.data() + t * A;
        const double* rowc = out.mc_row.data() + t * A;
        double t1 = 0.0, t0 = 0.0, old1 = 0.0, old0 = 0.0;
        if (t < r) {
            for (std::size_t a = 0; a < A; ++a) {
                sw1[swapped(a)] = row1[a];
                swc[swapped(a)] = rowc[a];
            }
            eval.terms(store.centers[t], out.new_center, sw1, swc, t1, t0);
        } else {
            const Point yt = t == r ? out.new_center : store.centers[t];
            eval.terms(out.new_center, yt, {row1, A}, {rowc, A}, t1, t0);
        }
        out.t1_row[t] = t1;
        out.t0_row[t] = t0;
        if (cache) {
            old1 = cache->t1[r * K + t];
            old0 = cache->t0[r * K + t];
        } else {
            const BlockId lo = std::min(r, t), hi = std::max(r, t);
            eval.terms(store.centers[lo], store.centers[hi], store.m1_slice(lo, hi), store.mc_slice(lo, hi), old1, old0);
        }
        const double d = (t1 - old1) + (t0 - old0);
        delta += t == r ? 0.5 * d : d;
    }
    out.delta_ltilde = delta;
    out.has_terms = true;
}

}  // namespace

void update_m(const MomentStore& store, NodeId k, Point new_point, BlockTermEvaluator& eval,
              const BlockTermCache* cache, ProposedDeltas& out) {
    if (store.mode != MomentMode::full) throw ModeError("update_m requires a full-order moment store");
    if (out.dtau.empty() || out.k != k || out.revision != store.revision || !(out.new_point == new_point))
        compute_dtau(store, k, new_point, out);
    const std::size_t K = store.K(), A = store.A(), P = store.P();
    const auto& idx = *store.idx;
    const auto first = idx.firsts(), second = idx.seconds();
    const BlockId r = out.r;
    const double* dt = out.dtau.data();
    out.m1_row.resize(K * A);
    out.mc_row.resize(K * A);
    const double* m1_row = store.m1.data() + r * K * A;
    const double* q1_row = store.q1.data() + k * K * P;
    const bool single = store.block_sizes[r] == 1;
    switch (store.kappa()) {
        case 0: fixed::update_rows<0>(K, r, single, m1_row, q1_row, store.qc.data(), out.qc_row.data(), dt, out.m1_row.data(), out.mc_row.data()); break;
        case 1: fixed::update_rows<1>(K, r, single, m1_row, q1_row, store.qc.data(), out.qc_row.data(), dt, out.m1_row.data(), out.mc_row.data()); break;
        case 2: fixed::update_rows<2>(K, r, single, m1_row, q1_row, store.qc.data(), out.qc_row.data(), dt, out.m1_row.data(), out.mc_row.data()); break;
        case 3: fixed::update_rows<3>(K, r, single, m1_row, q1_row, store.qc.data(), out.qc_row.data(), dt, out.m1_row.data(), out.mc_row.data()); break;
        case 4: fixed::update_rows<4>(K, r, single, m1_row, q1_row, store.qc.data(), out.qc_row.data(), dt, out.m1_row.data(), out.mc_row.data()); break;
        default:
            for (BlockId t = 0; t < K; ++t) {
                const double* src1 = m1_row + t * A;
                const double* q1 = q1_row + t * P;
                double* o1 = out.m1_row.data() + t * A;
                if (t != r) {
                    for (std::size_t a = 0; a < A; ++a) o1[a] = src1[a] + dt[first[a]] * q1[second[a]];
                } else {
                    // within-block: summed so that alpha and swapped(alpha) round identically
                    for (std::size_t a = 0; a < A; ++a)
                        o1[a] = src1[a] + (dt[first[a]] * q1[second[a]] + q1[first[a]] * dt[second[a]]);
                }
            }
            mc_row_from_qc(store, r, out.qc_row.data(), out.mc_row.data());
    }
    finish_terms(store, eval, cache, out);
}

void update_m2(const MomentStore& store, NodeId k, Point new_point, const BlockEdgeCounts& counts,
               BlockTermEvaluator& eval, const BlockTermCache* cache, ProposedDeltas& out) {
    if (store.mode != MomentMode::first_order) throw ModeError("update_m2 requires a first-order moment store");
    if (out.dtau.empty() || out.k != k || out.revision != store.revision || !(out.new_point == new_point))
        compute_dtau(store, k, new_point, out);
    const std::size_t K = store.K(), A = store.A();
    const BlockId r = out.r;
    const double dx = out.dtau[1], dy = out.dtau[2];
    const auto e = counts.row(k);
    out.m1_row.resize(K * A);
    out.mc_row.resize(K * A);
    for (BlockId t = 0; t < K; ++t) {
        const double* src1 = store.m1.data() + (r * K + t) * A;
        double* o1 = out.m1_row.data() + t * A;
        std::copy(src1, src1 + A, o1);
        const double ekt = e[t];
        o1[1] += ekt * dx;
        o1[2] += ekt * dy;
        if (t == r) {
            o1[3] += ekt * dx;
            o1[4] += ekt * dy;
        }
    }
    mc_row_from_qc(store, r, out.qc_row.data(), out.mc_row.data());
    finish_terms(store, eval, cache, out);
}

ProposedDeltas propose_move(const MomentStore& store, NodeId k, Point new_point, BlockTermEvaluator& eval,
                            const BlockTermCache* cache, const BlockEdgeCounts* counts) {
    ProposedDeltas d;
    propose_move(store, k, new_point, eval, cache, counts, d);
    return d;
}

void propose_move(const MomentStore& store, NodeId k, Point new_point, BlockTermEvaluator& eval,
                  const BlockTermCache* cache, const BlockEdgeCounts* counts, ProposedDeltas& out) {
    compute_dtau(store, k, new_point, out);
    if (store.mode == MomentMode::full) {
        update_m(store, k, new_point, eval, cache, out);
    } else {
        if (!counts) throw ModeError("first-order proposals need block edge counts");
        update_m2(store, k, new_point, *counts, eval, cache, out);
    }
}

void commit(MomentStore& store, const ProposedDeltas& d, const Graph& g, BlockTermCache* cache, double* ltilde) {
    if (d.revision != store.revision) throw ConsistencyError("commit: proposal was made against a stale moment store");
    const std::size_t K = store.K(), A = store.A(), P = store.P();
    if (d.m1_row.size() != K * A || d.mc_row.size() != K * A)
        throw ConsistencyError("commit: proposal has no moment rows");
    const auto& idx = *store.idx;
    const BlockId r = d.r;
    for (BlockId t = 0; t < K; ++t) {
        const double* s1 = d.m1_row.data() + t * A;
        const double* sc = d.mc_row.data() + t * A;
        std::copy(s1, s1 + A, store.m1.data() + (r * K + t) * A);
        std::copy(sc, sc + A, store.mc.data() + (r * K + t) * A);
        if (t == r) continue;
        double* c1 = store.m1.data() + (t * K + r) * A;
        double* cc = store.mc.data() + (t * K + r) * A;
        for (std::size_t a = 0; a < A; ++a) {
            c1[idx.swapped(a)] = s1[a];
            cc[idx.swapped(a)] = sc[a];
        }
    }
    const double* add = d.mono_new.data();
    const double* sub = d.mono_old.data();
    double* qc = store.qc.data() + r * P;
    double* qc_lo = store.qc_lo.data() + r * P;
    for (std::size_t c = 0; c < P; ++c) {
        dd_add(qc[c], qc_lo[c], add[c]);
        dd_add(qc[c], qc_lo[c], -sub[c]);
    }
    if (store.mode == MomentMode::full) {
        for (NodeId j : g.neighbors(d.k)) {
            double* q = store.q1.data() + (j * K + r) * P;
            double* lo = store.q1_lo.data() + (j * K + r) * P;
            for (std::size_t c = 0; c < P; ++c) {
                dd_add(q[c], lo[c], add[c]);
                dd_add(q[c], lo[c], -sub[c]);
            }
        }
    }
    store.points[d.k] = d.new_point;
    store.centers[r] = d.new_center;
    if (cache && d.has_terms) {
        for (BlockId t = 0; t < K; ++t) {
            cache->t1[r * K + t] = cache->t1[t * K + r] = d.t1_row[t];
            cache->t0[r * K + t] = cache->t0[t * K + r] = d.t0_row[t];
        }
    }
    if (ltilde) *ltilde += d.delta_ltilde;
    ++store.revision;
}

void write_moment_dump(const std::filesystem::path& prefix, const MomentStore& store) {
    auto bin = prefix;
    bin += ".bin";
    std::ofstream os(bin, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + bin.string());
    const char magic[4] = {'L', 'P', 'M', 'S'};
    const std::uint32_t header[3] = {static_cast<std::uint32_t>(store.kappa()), static_cast<std::uint32_t>(store.K()),
                                     static_cast<std::uint32_t>(store.mode)};
    os.write(magic, 4);
    os.write(reinterpret_cast<const char*>(header), sizeof(header));
    for (const auto* v : {&store.m1, &store.mc, &store.qc, &store.q1})
        os.write(reinterpret_cast<const char*>(v->data()), static_cast<std::streamsize>(v->size() * sizeof(double)));

    nlohmann::json meta;
    meta["kappa"] = store.kappa();
    meta["K"] = store.K();
    meta["n"] = store.n();
    meta["mode"] = store.mode == MomentMode::full ? "full" : "first_order";
    meta["revision"] = store.revision;
    meta["block_sizes"] = store.block_sizes;
    meta["assign"] = store.assign;
    auto centers = nlohmann::json::array();
    for (auto c : store.centers) centers.push_back({c.x, c.y});
    meta["centers"] = centers;
    auto pts = nlohmann::json::array();
    for (auto p : store.points) pts.push_back({p.x, p.y});
    meta["points"] = pts;
    auto js = prefix;
    js += ".json";
    std::ofstream jo(js);
    jo << meta.dump(1) << "\n";
}

MomentStore read_moment_dump(const std::filesystem::path& prefix) {
    auto js = prefix;
    js += ".json";
    std::ifstream ji(js);
    if (!ji) throw ConfigError("cannot open " + js.string());
    const auto meta = nlohmann::json::parse(ji);
    MomentStore st;
    st.idx = multi_index_set(meta.at("kappa").get<int>());
    st.mode = meta.at("mode").get<std::string>() == "full" ? MomentMode::full : MomentMode::first_order;
    st.revision = meta.at("revision").get<std::uint64_t>();
    st.block_sizes = meta.at("block_sizes").get<std::vector<std::size_t>>();
    st.assign = meta.at("assign").get<std::vector<BlockId>>();
    for (const auto& c : meta.at("centers")) st.centers.push_back({c[0].get<double>(), c[1].get<double>()});
    for (const auto& p : meta.at("points")) st.points.push_back({p[0].get<double>(), p[1].get<double>()});

    auto bin = prefix;
    bin += ".bin";
    std::ifstream is(bin, std::ios::binary);
    if (!is) throw ConfigError("cannot open " + bin.string());
    char magic[4];
    std::uint32_t header[3];
    is.read(magic, 4);
    is.read(reinterpret_cast<char*>(header), sizeof(header));
    if (std::memcmp(magic, "LPMS", 4) != 0) throw ConfigError(bin.string() + ": bad magic");
    if (header[0] != static_cast<std::uint32_t>(st.kappa()) || header[1] != st.K() ||
        header[2] != static_cast<std::uint32_t>(st.mode))
        throw ConfigError(bin.string() + ": header does not match metadata");
    const std::size_t K = st.K(), A = st.A(), P = st.P();
    st.m1.resize(K * K * A);
    st.mc.resize(K * K * A);
    st.qc.resize(K * P);
    st.q1.resize(st.mode == MomentMode::full ? st.n() * K * P : 0);
    st.qc_lo.assign(st.qc.size(), 0.0);
    st.q1_lo.assign(st.q1.size(), 0.0);
    for (auto* v : {&st.m1, &st.mc, &st.qc, &st.q1})
        is.read(reinterpret_cast<char*>(v->data()), static_cast<std::streamsize>(v->size() * sizeof(double)));
    if (!is) throw ConfigError(bin.string() + ": truncated");
    return st;
}

}  // namespace lpm
