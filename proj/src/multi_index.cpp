#include "lpm/multi_index.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lpm {

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

namespace {

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// Appends all compositions of `total` into D - pos parts, first part largest first.
template <std::size_t D>
void enumerate(int total, std::size_t pos, std::array<int, D>& cur,
               std::vector<std::array<int, D>>& out) {
    if (pos + 1 == D) {
        cur[pos] = total;
        out.push_back(cur);
        return;
    }
    for (int v = total; v >= 0; --v) {
        cur[pos] = v;
        enumerate<D>(total - v, pos + 1, cur, out);
    }
}

}  // namespace

template <std::size_t D>
GradedIndex<D>::GradedIndex(int kappa) : kappa_(kappa) {
    if (kappa < 0 || kappa > kMaxOrder)
        throw std::invalid_argument("GradedIndex: order must be in [0, " + std::to_string(kMaxOrder) + "]");
    degree_start_.push_back(0);
    for (int d = 0; d <= kappa; ++d) {
        Alpha cur{};
        enumerate<D>(d, 0, cur, items_);
        degree_start_.push_back(items_.size());
    }

    std::size_t table = 1;
    for (std::size_t c = 0; c < D; ++c) table *= static_cast<std::size_t>(kappa + 1);
    lookup_.assign(table, -1);
    degree_.resize(items_.size());
    inv_factorial_.resize(items_.size());
    for (std::size_t i = 0; i < items_.size(); ++i) {
        lookup_[code(items_[i])] = static_cast<long>(i);
        int deg = 0;
        double fact = 1.0;
        for (int a : items_[i]) {
            deg += a;
            fact *= factorial(a);
        }
        degree_[i] = deg;
        inv_factorial_[i] = 1.0 / fact;
    }

    products_.resize(static_cast<std::size_t>((kappa + 1) * (kappa + 1)));
    for (std::size_t a = 0; a < items_.size(); ++a) {
        for (std::size_t b = 0; b < items_.size(); ++b) {
            if (degree_[a] + degree_[b] > kappa) continue;
            Alpha sum;
            for (std::size_t c = 0; c < D; ++c) sum[c] = items_[a][c] + items_[b][c];
            products_[static_cast<std::size_t>(degree_[a] * (kappa + 1) + degree_[b])].push_back(
                {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                 static_cast<std::uint32_t>(find(sum))});
        }
    }

    log_start_.assign(static_cast<std::size_t>(kappa + 2), 0);
    for (int d = 1; d <= kappa; ++d) {
        log_start_[static_cast<std::size_t>(d)] = log_terms_.size();
        for (int j = 1; j < d; ++j)
            for (const auto& p : products(j, d - j))
                log_terms_.push_back({p.a, p.b, p.c, -static_cast<double>(j) / d});
    }
    log_start_[static_cast<std::size_t>(kappa) + 1] = log_terms_.size();

    // synthetic division along each axis, one line of fixed other exponents at a time
    for (std::size_t axis = 0; axis < D; ++axis)
        for (std::size_t base = 0; base < items_.size(); ++base) {
            if (items_[base][axis] != 0) continue;
            const int m = kappa - degree_[base];
            auto at = [&](int p) {
                Alpha a = items_[base];
                a[axis] = p;
                return static_cast<std::uint32_t>(find(a));
            };
            for (int i = 0; i < m; ++i)
                for (int j = m - 1; j >= i; --j) axis_steps_[axis].push_back({at(j), at(j + 1)});
        }

    for (std::size_t a = 0; a < items_.size(); ++a) {
        for (std::size_t b = 0; b < items_.size(); ++b) {
            Alpha diff;
            double coef = 1.0;
            bool below = true;
            for (std::size_t c = 0; c < D; ++c) {
                diff[c] = items_[a][c] - items_[b][c];
                if (diff[c] < 0) {
                    below = false;
                    break;
                }
                coef *= binomial(items_[a][c], items_[b][c]);
            }
            if (!below) continue;
            shift_terms_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                                    static_cast<std::uint32_t>(find(diff)), coef});
        }
    }
}

template <std::size_t D>
std::size_t GradedIndex<D>::code(const Alpha& alpha) const {
    std::size_t c = 0;
    for (std::size_t k = D; k-- > 0;) c = c * static_cast<std::size_t>(kappa_ + 1) + static_cast<std::size_t>(alpha[k]);
    return c;
}

template <std::size_t D>
long GradedIndex<D>::find(const Alpha& alpha) const {
    int deg = 0;
    for (int a : alpha) {
        if (a < 0) return -1;
        deg += a;
    }
    if (deg > kappa_) return -1;
    return lookup_[code(alpha)];
}

template <std::size_t D>
void GradedIndex<D>::monomials(const std::array<double, D>& x, std::span<double> out) const {
    // powers[c][p] = x[c]^p
    std::array<std::array<double, kMaxOrder + 1>, D> powers;
    for (std::size_t c = 0; c < D; ++c) {
        powers[c][0] = 1.0;
        for (int p = 1; p <= kappa_; ++p) powers[c][static_cast<std::size_t>(p)] = powers[c][static_cast<std::size_t>(p - 1)] * x[c];
    }
    for (std::size_t i = 0; i < items_.size(); ++i) {
        double v = 1.0;
        for (std::size_t c = 0; c < D; ++c) v *= powers[c][static_cast<std::size_t>(items_[i][c])];
        out[i] = v;
    }
}

template class GradedIndex<2>;
template class GradedIndex<4>;

MultiIndexSet::MultiIndexSet(int kappa) : pairs_(kappa), proj_(kappa) {
    const std::size_t n = pairs_.size();
    first_.resize(n);
    second_.resize(n);
    merged_.resize(n);
    swapped_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = pairs_[i];
        first_[i] = static_cast<std::uint32_t>(proj_.find({a[0], a[1]}));
        second_[i] = static_cast<std::uint32_t>(proj_.find({a[2], a[3]}));
        merged_[i] = static_cast<std::uint32_t>(proj_.find({a[0] + a[2], a[1] + a[3]}));
        swapped_[i] = static_cast<std::uint32_t>(pairs_.find({a[2], a[3], a[0], a[1]}));
        const double sign = ((a[2] + a[3]) % 2 == 0) ? 1.0 : -1.0;
        difference_terms_.push_back(
            {static_cast<std::uint32_t>(i), merged_[i],
             sign * binomial(a[0] + a[2], a[0]) * binomial(a[1] + a[3], a[1])});
    }
}

}  // namespace lpm
