#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "lpm/multi_index.hpp"

namespace lpm {

// Allocation-free kernels on coefficient arrays laid out in GradedIndex order.
// Outputs must not alias inputs.
namespace jet_kernels {

template <std::size_t D>
void mul_into(const GradedIndex<D>& idx, std::span<const double> a, std::span<const double> b,
              std::span<double> out) {
    const int k = idx.kappa();
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(idx.size()), 0.0);
    for (int da = 0; da <= k; ++da)
        for (int db = 0; da + db <= k; ++db)
            for (const auto& p : idx.products(da, db)) out[p.c] += a[p.a] * b[p.b];
}

/// Adds sum over (j, d-j) products of a_j * b_{d-j} * weight(j) into out's degree-d block.
template <std::size_t D>
inline void accumulate_homogeneous(const GradedIndex<D>& idx, int d, int j, double weight,
                                   std::span<const double> a, std::span<const double> b,
                                   std::span<double> out) {
    for (const auto& p : idx.products(j, d - j)) out[p.c] += weight * a[p.a] * b[p.b];
}

/// out = exp(p)
template <std::size_t D>
void exp_into(const GradedIndex<D>& idx, std::span<const double> p, std::span<double> out) {
    const int k = idx.kappa();
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(idx.size()), 0.0);
    out[0] = std::exp(p[0]);
    for (int d = 1; d <= k; ++d) {
        for (int j = 1; j <= d; ++j) accumulate_homogeneous(idx, d, j, static_cast<double>(j), p, out, out);
        for (std::size_t i = idx.degree_begin(d); i < idx.degree_end(d); ++i) out[i] /= d;
    }
}

/// out = exp(p) where p has no terms above degree 2 (cheaper recurrence).
template <std::size_t D>
void exp_quadratic_into(const GradedIndex<D>& idx, std::span<const double> p, std::span<double> out) {
    const int k = idx.kappa();
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(idx.size()), 0.0);
    out[0] = std::exp(p[0]);
    for (int d = 1; d <= k; ++d) {
        accumulate_homogeneous(idx, d, 1, 1.0, p, out, out);
        if (d >= 2) accumulate_homogeneous(idx, d, 2, 2.0, p, out, out);
        for (std::size_t i = idx.degree_begin(d); i < idx.degree_end(d); ++i) out[i] /= d;
    }
}

/// out = log(p); requires p[0] > 0.
template <std::size_t D>
void log_into(const GradedIndex<D>& idx, std::span<const double> p, std::span<double> out) {
    const int k = idx.kappa();
    out[0] = std::log(p[0]);
    const double inv_p0 = 1.0 / p[0];
    for (int d = 1; d <= k; ++d) {
        const std::size_t lo = idx.degree_begin(d), hi = idx.degree_end(d);
        for (std::size_t i = lo; i < hi; ++i) out[i] = p[i];
        for (const auto& t : idx.log_terms(d)) out[t.c] += t.weight * out[t.a] * p[t.b];
        for (std::size_t i = lo; i < hi; ++i) out[i] *= inv_p0;
    }
}

}  // namespace jet_kernels

/// Truncated multivariate polynomial of total degree <= kappa in D variables.
/// Coefficient i multiplies x^alpha_i; for a Taylor jet of f at a point it
/// holds D^alpha f / alpha!.
template <std::size_t D>
class Jet {
public:
    explicit Jet(const GradedIndex<D>& idx) : idx_(&idx), c_(idx.size(), 0.0) {}

    static Jet constant(const GradedIndex<D>& idx, double value) {
        Jet j(idx);
        j.c_[0] = value;
        return j;
    }

    /// The jet of x_coord + value.
    static Jet variable(const GradedIndex<D>& idx, std::size_t coord, double value) {
        Jet j = constant(idx, value);
        if (idx.kappa() >= 1) {
            typename GradedIndex<D>::Alpha a{};
            a[coord] = 1;
            j.c_[static_cast<std::size_t>(idx.find(a))] = 1.0;
        }
        return j;
    }

    const GradedIndex<D>& index() const { return *idx_; }
    int kappa() const { return idx_->kappa(); }
    std::size_t size() const { return c_.size(); }
    double operator[](std::size_t i) const { return c_[i]; }
    double& operator[](std::size_t i) { return c_[i]; }
    double coeff(const typename GradedIndex<D>::Alpha& a) const {
        long i = idx_->find(a);
        return i < 0 ? 0.0 : c_[static_cast<std::size_t>(i)];
    }
    std::span<const double> coeffs() const { return c_; }
    std::span<double> coeffs() { return c_; }

    Jet& operator+=(const Jet& o) {
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Jet& operator*=(double s) {
        for (double& v : c_) v *= s;
        return *this;
    }
    Jet& operator+=(double s) {
        c_[0] += s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator+(double s, Jet a) { return a += s; }
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet out(*a.idx_);
        jet_kernels::mul_into(*a.idx_, a.coeffs(), b.coeffs(), out.coeffs());
        return out;
    }
    friend Jet exp(const Jet& a) {
        Jet out(*a.idx_);
        jet_kernels::exp_into(*a.idx_, a.coeffs(), out.coeffs());
        return out;
    }
    friend Jet log(const Jet& a) {
        if (!(a.c_[0] > 0.0)) throw std::domain_error("Jet log: non-positive constant term");
        Jet out(*a.idx_);
        jet_kernels::log_into(*a.idx_, a.coeffs(), out.coeffs());
        return out;
    }

    /// Value of the polynomial at x.
    double evaluate(const std::array<double, D>& x) const {
        std::vector<double> mono(c_.size());
        idx_->monomials(x, mono);
        double s = 0.0;
        for (std::size_t i = 0; i < c_.size(); ++i) s += c_[i] * mono[i];
        return s;
    }

private:
    const GradedIndex<D>* idx_;
    std::vector<double> c_;
};

}  // namespace lpm
