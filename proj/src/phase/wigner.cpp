#include "phase/wigner.hpp"

namespace vrte::phase {

namespace {

// Closed-form starting value d^{lmin}_{mn} at l_min = max(|m|,|n|):
//   xi * 2^{-lmin} * sqrt( (2 lmin)! / ((|m-n|)! (|m+n|)!) )
//      * (1-x)^{|m-n|/2} (1+x)^{|m+n|/2},
// xi = 1 for n >= m, (-1)^{m-n} otherwise.
double wigner_start(int m, int n, double x) {
    const int lmin = std::max(std::abs(m), std::abs(n));
    const int a = std::abs(m - n);
    const int b = std::abs(m + n);
    double log_fac = 0.0;  // log of (2 lmin)! / (a! b!)
    for (int k = 2; k <= 2 * lmin; ++k)
        log_fac += std::log(static_cast<double>(k));
    for (int k = 2; k <= a; ++k)
        log_fac -= std::log(static_cast<double>(k));
    for (int k = 2; k <= b; ++k)
        log_fac -= std::log(static_cast<double>(k));
    double value = std::exp(0.5 * log_fac - lmin * std::log(2.0));
    value *= std::pow(std::max(0.0, 1.0 - x), 0.5 * a) * std::pow(std::max(0.0, 1.0 + x), 0.5 * b);
    if (n < m && ((m - n) & 1))
        value = -value;
    return value;
}

}  // namespace

std::vector<double> wigner_d_sequence(int m, int n, int lmax, double x) {
    std::vector<double> d(static_cast<size_t>(lmax) + 1, 0.0);
    const int lmin = std::max(std::abs(m), std::abs(n));
    if (lmin > lmax)
        return d;

    d[lmin] = wigner_start(m, n, x);
    if (lmin == lmax)
        return d;

    const double mn = static_cast<double>(m) * n;
    double prev = 0.0;
    double cur = d[lmin];
    for (int l = lmin; l < lmax; ++l) {
        double next;
        if (l == 0) {
            // Only reachable for m = n = 0 where the generic form is 0/0.
            next = x;
        } else {
            const double lp = l + 1.0;
            const double c0 = l * std::sqrt((lp * lp - m * m) * (lp * lp - n * n));
            const double c1 = (2.0 * l + 1.0) * (l * lp * x - mn);
            const double c2 = lp * std::sqrt((static_cast<double>(l) * l - m * m) *
                                             (static_cast<double>(l) * l - n * n));
            next = (c1 * cur - c2 * prev) / c0;
        }
        prev = cur;
        cur = next;
        d[l + 1] = next;
    }
    return d;
}

GsfSet gsf_sequence(int m, int lmax, double x) {
    GsfSet out;
    const size_t count = static_cast<size_t>(lmax) + 1;
    out.p.assign(count, 0.0);
    out.r.assign(count, 0.0);
    out.t.assign(count, 0.0);

    const double sign = (m & 1) ? -1.0 : 1.0;
    const auto d0 = wigner_d_sequence(m, 0, lmax, x);
    const auto d2p = wigner_d_sequence(m, 2, lmax, x);
    const auto d2m = wigner_d_sequence(m, -2, lmax, x);
    for (int l = 0; l <= lmax; ++l) {
        out.p[l] = sign * d0[l];
        out.r[l] = 0.5 * sign * (d2p[l] + d2m[l]);
        out.t[l] = -0.5 * sign * (d2p[l] - d2m[l]);
    }
    return out;
}

Eigen::Matrix4d gsf_matrix(const GsfSet& g, int l, bool flip_t) {
    Eigen::Matrix4d out = Eigen::Matrix4d::Zero();
    out(0, 0) = g.p[l];
    out(1, 1) = g.r[l];
    out(2, 2) = g.r[l];
    out(3, 3) = g.p[l];
    const double t = flip_t ? g.t[l] : -g.t[l];
    out(1, 2) = t;
    out(2, 1) = t;
    return out;
}

Eigen::Matrix4d legendre_matrix(int l, int m, double mu) {
    Eigen::Matrix4d out = Eigen::Matrix4d::Zero();
    if (m > l)
        return out;
    const auto gsf = gsf_sequence(m, l, mu);
    out(0, 0) = gsf.p[l];
    out(1, 1) = gsf.r[l];
    out(2, 2) = gsf.r[l];
    out(3, 3) = gsf.p[l];
    out(1, 2) = -gsf.t[l];
    out(2, 1) = -gsf.t[l];
    return out;
}

Eigen::Matrix4d LegendreMatrixTable::matrix(int mu_index, int l) const {
    const auto& g = per_mu[mu_index];
    Eigen::Matrix4d out = Eigen::Matrix4d::Zero();
    if (l < m || l >= order_count)
        return out;
    out(0, 0) = g.p[l];
    out(1, 1) = g.r[l];
    out(2, 2) = g.r[l];
    out(3, 3) = g.p[l];
    out(1, 2) = -g.t[l];
    out(2, 1) = -g.t[l];
    return out;
}

LegendreMatrixTable build_legendre_table(int m, int order_count, std::span<const double> mus) {
    LegendreMatrixTable table;
    table.m = m;
    table.order_count = order_count;
    table.per_mu.reserve(mus.size());
    for (double mu : mus)
        table.per_mu.push_back(gsf_sequence(m, order_count - 1, mu));
    return table;
}

}  // namespace vrte::phase
