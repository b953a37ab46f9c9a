#include "lpm/link.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "lpm/jet.hpp"

namespace lpm {

bool LinkParams::valid(double sigma_min) const {
    return beta0 > 0.0 && beta1 > 0.0 && beta0 + beta1 < 1.0 && sigma >= sigma_min && std::isfinite(sigma);
}

void LinkParams::validate(double sigma_min) const {
    if (!(beta0 > 0.0)) throw ConfigError("link parameters: beta0 must be positive, got " + to_string(*this));
    if (!(beta1 > 0.0)) throw ConfigError("link parameters: beta1 must be positive, got " + to_string(*this));
    if (!(beta0 + beta1 < 1.0)) throw ConfigError("link parameters: beta0 + beta1 must be below 1, got " + to_string(*this));
    if (!(sigma >= sigma_min) || !std::isfinite(sigma))
        throw ConfigError("link parameters: sigma below floor " + std::to_string(sigma_min) + ", got " + to_string(*this));
}

std::string to_string(const LinkParams& theta) {
    std::ostringstream os;
    os.precision(17);
    os << "(" << theta.beta0 << ", " << theta.beta1 << ", " << theta.sigma << ")";
    return os.str();
}

double GaussianLink::prob(const LinkParams& theta, Point x, Point y) const {
    return theta.beta0 + theta.beta1 * std::exp(-squared_distance(x, y) / (2.0 * theta.sigma * theta.sigma));
}

void GaussianLink::log_link_jet(int ell, const LinkParams& theta, Point ys, Point yt,
                                const PairIndex& idx, std::span<double> out) const {
    using J = Jet<4>;
    const J dx = J::variable(idx, 0, ys.x) - J::variable(idx, 2, yt.x);
    const J dy = J::variable(idx, 1, ys.y) - J::variable(idx, 3, yt.y);
    const J d2 = dx * dx + dy * dy;
    J p = theta.beta0 + theta.beta1 * exp((-1.0 / (2.0 * theta.sigma * theta.sigma)) * d2);
    if (ell == 0) p = 1.0 + (-1.0) * p;
    if (!(p[0] > 0.0 && p[0] < 1.0)) throw DomainError("log_link_jet: probability outside (0,1)");
    const J g = log(p);
    std::copy(g.coeffs().begin(), g.coeffs().end(), out.begin());
}

bool GaussianLink::difference_jets(const LinkParams& theta, Point w, const ProjIndex& idx,
                                   std::span<double> h1, std::span<double> h0) const {
    constexpr std::size_t kMaxProj = (kMaxOrder + 1) * (kMaxOrder + 2) / 2;
    const int k = idx.kappa();
    const std::size_t m = idx.size();

    // exp(-|w + z|^2 / (2 sigma^2)) = exp(q0) ex(z1) ey(z2), each factor the
    // exponential of a univariate quadratic l z + c z^2
    const double c = -1.0 / (2.0 * theta.sigma * theta.sigma);
    std::array<double, kMaxOrder + 1> ex{}, ey{};
    ex[0] = ey[0] = 1.0;
    const double lx = 2.0 * c * w.x, ly = 2.0 * c * w.y;
    for (int i = 1; i <= k; ++i) {
        const auto u = static_cast<std::size_t>(i);
        ex[u] = lx * ex[u - 1];
        ey[u] = ly * ey[u - 1];
        if (i >= 2) {
            ex[u] += 2.0 * c * ex[u - 2];
            ey[u] += 2.0 * c * ey[u - 2];
        }
        ex[u] /= i;
        ey[u] /= i;
    }
    const double e0 = std::exp(c * squared_norm(w));

    // p and 1 - p
    std::array<double, kMaxProj> p, np;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& a = idx[i];
        p[i] = theta.beta1 * (e0 * ex[static_cast<std::size_t>(a[0])] * ey[static_cast<std::size_t>(a[1])]);
        np[i] = -p[i];
    }
    p[0] += theta.beta0;
    np[0] = 1.0 - p[0];
    jet_kernels::log_into(idx, std::span<const double>(p.data(), m), h1);
    jet_kernels::log_into(idx, std::span<const double>(np.data(), m), h0);
    return true;
}

const GaussianLink& gaussian_link() {
    static const GaussianLink link;
    return link;
}

}  // namespace lpm
