#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lpm {

inline constexpr int kMaxOrder = 12;

/// All multi-indices alpha in N_0^D with |alpha| <= kappa, in graded
/// lexicographic order: by total degree, then lexicographically with the
/// first coordinate most significant (so (1,0,0,0) precedes (0,1,0,0)).
/// Each degree occupies a contiguous range.
template <std::size_t D>
class GradedIndex {
public:
    using Alpha = std::array<int, D>;

    /// c = a + b with |a| = da and |b| = db.
    struct ProductTerm {
        std::uint32_t a;
        std::uint32_t b;
        std::uint32_t c;
    };

    /// out[c] += weight * out[a] * p[b] in the log recurrence, |c| = d, |a| = j < d,
    /// weight = -j / d.
    struct LogTerm {
        std::uint32_t a;
        std::uint32_t b;
        std::uint32_t c;
        double weight;
    };

    /// One (alpha, beta <= alpha) pair of a binomial re-expansion.
    struct ShiftTerm {
        std::uint32_t alpha;
        std::uint32_t beta;
        std::uint32_t power;  // index of alpha - beta
        double binom;         // C(alpha, beta)
    };

    /// poly[dst] += s_axis * poly[src]; applied in order over one axis this
    /// re-expands poly(x) as a polynomial in x - s along that axis.
    struct AxisStep {
        std::uint32_t dst;
        std::uint32_t src;
    };

    explicit GradedIndex(int kappa);

    int kappa() const { return kappa_; }
    std::size_t size() const { return items_.size(); }
    const Alpha& operator[](std::size_t i) const { return items_[i]; }
    const std::vector<Alpha>& items() const { return items_; }

    /// Position of alpha, or -1 when alpha has a negative entry or |alpha| > kappa.
    long find(const Alpha& alpha) const;

    int degree(std::size_t i) const { return degree_[i]; }
    std::size_t degree_begin(int d) const { return degree_start_[static_cast<std::size_t>(d)]; }
    std::size_t degree_end(int d) const { return degree_start_[static_cast<std::size_t>(d) + 1]; }

    /// 1 / alpha!
    double inverse_factorial(std::size_t i) const { return inv_factorial_[i]; }

    std::span<const ProductTerm> products(int da, int db) const {
        const auto& v = products_[static_cast<std::size_t>(da * (kappa_ + 1) + db)];
        return {v.data(), v.size()};
    }

    std::span<const ShiftTerm> shift_terms() const { return shift_terms_; }

    /// Terms producing degree d of log(p), in recurrence order.
    std::span<const LogTerm> log_terms(int d) const {
        const auto lo = log_start_[static_cast<std::size_t>(d)], hi = log_start_[static_cast<std::size_t>(d) + 1];
        return {log_terms_.data() + lo, hi - lo};
    }

    std::span<const AxisStep> axis_steps(std::size_t axis) const { return axis_steps_[axis]; }

    /// Fills out[i] = x^alpha_i for every alpha in the set.
    void monomials(const std::array<double, D>& x, std::span<double> out) const;

private:
    int kappa_;
    std::vector<Alpha> items_;
    std::vector<int> degree_;
    std::vector<std::size_t> degree_start_;
    std::vector<long> lookup_;
    std::vector<double> inv_factorial_;
    std::vector<std::vector<ProductTerm>> products_;
    std::vector<ShiftTerm> shift_terms_;
    std::vector<LogTerm> log_terms_;
    std::vector<std::size_t> log_start_;
    std::array<std::vector<AxisStep>, D> axis_steps_;

    std::size_t code(const Alpha& alpha) const;
};

extern template class GradedIndex<2>;
extern template class GradedIndex<4>;

using PairIndex = GradedIndex<4>;
using ProjIndex = GradedIndex<2>;

/// The pair set A (4 coordinates, for ordered pairs of points) together with
/// the projected set A_proj (2 coordinates, single points) and the maps
/// between them used by the moment formulas.
class MultiIndexSet {
public:
    /// Maps a pair index onto the projected set through alpha -> (a1+a3, a2+a4),
    /// with coef = C(g1,a1) C(g2,a2) (-1)^(a3+a4). Summing coef * M_alpha gives
    /// the moments of the coordinate differences tau_i - tau_j.
    struct DifferenceTerm {
        std::uint32_t alpha;
        std::uint32_t gamma;
        double coef;
    };

    explicit MultiIndexSet(int kappa);

    int kappa() const { return pairs_.kappa(); }
    const PairIndex& pairs() const { return pairs_; }
    const ProjIndex& proj() const { return proj_; }
    std::size_t size() const { return pairs_.size(); }
    std::size_t proj_size() const { return proj_.size(); }

    /// (a1, a2) as a projected index.
    std::uint32_t first(std::size_t alpha) const { return first_[alpha]; }
    /// (a3, a4) as a projected index.
    std::uint32_t second(std::size_t alpha) const { return second_[alpha]; }
    /// (a1 + a3, a2 + a4) as a projected index.
    std::uint32_t merged(std::size_t alpha) const { return merged_[alpha]; }
    /// (a3, a4, a1, a2) as a pair index.
    std::uint32_t swapped(std::size_t alpha) const { return swapped_[alpha]; }

    std::span<const DifferenceTerm> difference_terms() const { return difference_terms_; }

    std::span<const std::uint32_t> firsts() const { return first_; }
    std::span<const std::uint32_t> seconds() const { return second_; }
    std::span<const std::uint32_t> mergeds() const { return merged_; }

private:
    PairIndex pairs_;
    ProjIndex proj_;
    std::vector<std::uint32_t> first_, second_, merged_, swapped_;
    std::vector<DifferenceTerm> difference_terms_;
};

double binomial(int n, int k);

}  // namespace lpm
