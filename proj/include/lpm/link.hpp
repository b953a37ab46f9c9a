#pragma once

#include <span>
#include <string>

#include "lpm/multi_index.hpp"
#include "lpm/types.hpp"

namespace lpm {

/// theta = (beta0, beta1, sigma) of the Gaussian link
/// p(x, y) = beta0 + beta1 * exp(-|x - y|^2 / (2 sigma^2)).
struct LinkParams {
    double beta0 = 0.1;
    double beta1 = 0.7;
    double sigma = 0.6;

    static constexpr double default_sigma_min = 0.05;

    bool valid(double sigma_min = default_sigma_min) const;
    /// Throws ConfigError naming the violated constraint.
    void validate(double sigma_min = default_sigma_min) const;

    friend bool operator==(const LinkParams&, const LinkParams&) = default;
};

std::string to_string(const LinkParams& theta);

/// A symmetric link function together with the Taylor jets of its log-links
/// g1 = log p and g0 = log(1 - p).
class LinkFunction {
public:
    virtual ~LinkFunction() = default;

    virtual double prob(const LinkParams& theta, Point x, Point y) const = 0;

    /// Coefficients D^alpha g_ell(ys, yt) / alpha! over the pair index, in
    /// the variables (u1, u2, v1, v2) of g_ell(ys + u, yt + v).
    virtual void log_link_jet(int ell, const LinkParams& theta, Point ys, Point yt,
                              const PairIndex& idx, std::span<double> out) const = 0;

    /// For links depending on x - y only: writes the jets of
    /// h_ell(z) = g_ell(x, y), z = x - y, at z = w over the projected index.
    /// Returns false when the link is not of that form.
    virtual bool difference_jets(const LinkParams& theta, Point w, const ProjIndex& idx,
                                 std::span<double> h1, std::span<double> h0) const {
        (void)theta, (void)w, (void)idx, (void)h1, (void)h0;
        return false;
    }
};

class GaussianLink final : public LinkFunction {
public:
    double prob(const LinkParams& theta, Point x, Point y) const override;
    void log_link_jet(int ell, const LinkParams& theta, Point ys, Point yt, const PairIndex& idx,
                      std::span<double> out) const override;
    bool difference_jets(const LinkParams& theta, Point w, const ProjIndex& idx,
                         std::span<double> h1, std::span<double> h0) const override;
};

const GaussianLink& gaussian_link();

}  // namespace lpm
