#include "core/types.hpp"

#include <algorithm>

namespace vrte {

double reduce_azimuth(double phi) {
    double r = std::fmod(phi, kTwoPi);
    if (r < 0.0)
        r += kTwoPi;
    if (r >= kTwoPi)
        r = 0.0;
    return r;
}

double clamp_mu(double mu) {
    if (std::abs(mu) >= kMinMu)
        return mu;
    return mu < 0.0 ? -kMinMu : kMinMu;
}

Direction::Direction(double mu_, double phi_) : mu(mu_), phi(reduce_azimuth(phi_)) {
    if (!(std::isfinite(mu) && std::abs(mu) > 0.0 && std::abs(mu) <= 1.0))
        throw ValidationError("direction: mu must satisfy 0 < |mu| <= 1, got " + std::to_string(mu_));
}

Quadrature build_double_gauss_quadrature(int n) {
    if (n < 1)
        throw ValidationError("quadrature: size must be at least 1");

    // Gauss-Legendre nodes on (-1,1) by Newton iteration on P_n, then an
    // affine map onto (0,1). Standard Bonnet recurrence for P_n and P_n'.
    Quadrature q;
    q.n = n;
    q.nodes.resize(n);
    q.weights.resize(n);

    const int half = (n + 1) / 2;
    for (int k = 0; k < half; ++k) {
        // Chebyshev-like initial guess for the k-th root (descending order).
        double x = std::cos(kPi * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int l = 2; l <= n; ++l) {
                const double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map (-1,1) -> (0,1); descending roots land in ascending order mirrored.
        q.nodes[n - 1 - k] = 0.5 * (1.0 + x);
        q.weights[n - 1 - k] = 0.5 * w;
        q.nodes[k] = 0.5 * (1.0 - x);
        q.weights[k] = 0.5 * w;
    }
    if (n == 1) {
        q.nodes[0] = 0.5;
        q.weights[0] = 1.0;
    }
    return q;
}

double cos_scattering_angle(const Direction& d1, const Direction& d2) {
    const double s1 = std::sqrt(std::max(0.0, 1.0 - d1.mu * d1.mu));
    const double s2 = std::sqrt(std::max(0.0, 1.0 - d2.mu * d2.mu));
    const double c = d1.mu * d2.mu + s1 * s2 * std::cos(d1.phi - d2.phi);
    return std::clamp(c, -1.0, 1.0);
}

}  // namespace vrte
