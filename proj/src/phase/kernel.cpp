#include "phase/kernel.hpp"

#include <cstdio>
#include <fstream>

namespace vrte::phase {

namespace {

struct GreekRow {
    double beta, alpha, gamma, delta, eps, zeta;
};

GreekRow greek_of(const Eigen::Matrix4d& b) {
    return {b(0, 0), b(1, 1), b(0, 1), b(3, 3), b(3, 2), b(2, 2)};
}

}  // namespace

Eigen::Matrix4d parity_conjugate(const Eigen::Matrix4d& x) {
    Eigen::Matrix4d out;
    const auto& d = parity_diag();
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            out(r, c) = d[r] * d[c] * x(r, c);
    return out;
}

AzimuthKernel assemble_azimuth_kernel(int m, const LayerSpec& layer, const Quadrature& quad) {
    const int n = quad.n;
    const int order_count = layer.order_count();
    AzimuthKernel kernel;
    kernel.m = m;
    kernel.n = n;
    const size_t nn = static_cast<size_t>(n) * n;
    kernel.pp.assign(nn, Eigen::Matrix4d::Zero());
    kernel.pm.assign(nn, Eigen::Matrix4d::Zero());
    kernel.mp.assign(nn, Eigen::Matrix4d::Zero());
    kernel.mm.assign(nn, Eigen::Matrix4d::Zero());
    if (m >= order_count)
        return kernel;

    const auto table = build_legendre_table(m, order_count, quad.nodes);

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Eigen::Matrix4d app = Eigen::Matrix4d::Zero();
            Eigen::Matrix4d apm = Eigen::Matrix4d::Zero();
            for (int l = m; l < order_count; ++l) {
                const Eigen::Matrix4d left = gsf_matrix(table.per_mu[i], l, false) * layer.coeffs[l];
                const Eigen::Matrix4d right = gsf_matrix(table.per_mu[j], l, false);
                const Eigen::Matrix4d right_neg = gsf_matrix(table.per_mu[j], l, true);  // D Pi D
                const double sign = ((l - m) & 1) ? -1.0 : 1.0;
                app += left * right;
                apm += sign * (left * right_neg);
            }
            const size_t idx = static_cast<size_t>(i) * n + j;
            kernel.pp[idx] = app;
            kernel.pm[idx] = apm;
            kernel.mp[idx] = parity_conjugate(apm);
            kernel.mm[idx] = parity_conjugate(app);
        }
    }
    return kernel;
}

KernelRow kernel_row(int m, const LayerSpec& layer, const Quadrature& quad, double mu) {
    const int n = quad.n;
    const int order_count = layer.order_count();
    KernelRow row;
    row.plus.assign(n, Eigen::Matrix4d::Zero());
    row.minus.assign(n, Eigen::Matrix4d::Zero());
    if (m >= order_count)
        return row;

    const auto row_gsf = gsf_sequence(m, order_count - 1, mu);
    const auto table = build_legendre_table(m, order_count, quad.nodes);
    for (int j = 0; j < n; ++j) {
        for (int l = m; l < order_count; ++l) {
            const Eigen::Matrix4d left = gsf_matrix(row_gsf, l, false) * layer.coeffs[l];
            const double sign = ((l - m) & 1) ? -1.0 : 1.0;
            row.plus[j] += left * gsf_matrix(table.per_mu[j], l, false);
            row.minus[j] += sign * (left * gsf_matrix(table.per_mu[j], l, true));
        }
    }
    return row;
}

KernelColumn kernel_beam_column(int m, const LayerSpec& layer, const Quadrature& quad, double mu_beam) {
    const int n = quad.n;
    const int order_count = layer.order_count();
    KernelColumn col;
    col.up.assign(n, Eigen::Matrix4d::Zero());
    col.down.assign(n, Eigen::Matrix4d::Zero());
    if (m >= order_count)
        return col;

    const auto beam_gsf = gsf_sequence(m, order_count - 1, mu_beam);
    const auto table = build_legendre_table(m, order_count, quad.nodes);
    for (int i = 0; i < n; ++i) {
        for (int l = m; l < order_count; ++l) {
            const Eigen::Matrix4d right = layer.coeffs[l] * gsf_matrix(beam_gsf, l, false);
            const double sign = ((l - m) & 1) ? -1.0 : 1.0;
            col.up[i] += gsf_matrix(table.per_mu[i], l, false) * right;
            col.down[i] += sign * (gsf_matrix(table.per_mu[i], l, true) * right);
        }
    }
    return col;
}

Eigen::Matrix4d FourierBasis::phi(int k, int m, double x) {
    const double scale = (m == 0) ? 1.0 : 2.0;
    const double c = std::cos(m * x);
    const double s = std::sin(m * x);
    Eigen::Matrix4d out = Eigen::Matrix4d::Zero();
    if (k == 1) {
        out.diagonal() << c, c, s, s;
    } else {
        out.diagonal() << -s, -s, c, c;
    }
    return scale * out;
}

const Eigen::Matrix4d& FourierBasis::selector(int k) {
    static const Eigen::Matrix4d d1 = Eigen::Vector4d(1, 1, 0, 0).asDiagonal();
    static const Eigen::Matrix4d d2 = Eigen::Vector4d(0, 0, 1, 1).asDiagonal();
    return k == 1 ? d1 : d2;
}

MuellerMatrix evaluate_phase_matrix(const Direction& d_in, const Direction& d_out, const LayerSpec& layer) {
    const int order_count = layer.order_count();
    const double x = d_in.phi - d_out.phi;

    Eigen::Matrix4d sum = Eigen::Matrix4d::Zero();
    for (int m = 0; m < order_count; ++m) {
        const auto g_out = gsf_sequence(m, order_count - 1, d_out.mu);
        const auto g_in = gsf_sequence(m, order_count - 1, d_in.mu);
        Eigen::Matrix4d am = Eigen::Matrix4d::Zero();
        for (int l = m; l < order_count; ++l)
            am += gsf_matrix(g_out, l, false) * layer.coeffs[l] * gsf_matrix(g_in, l, false);
        sum += FourierBasis::phi(1, m, x) * am * FourierBasis::selector(1);
        sum += FourierBasis::phi(2, m, x) * am * FourierBasis::selector(2);
    }
    return MuellerMatrix(sum);
}

Eigen::Matrix4d scatter_matrix(const LayerSpec& layer, double cos_theta) {
    const int order_count = layer.order_count();
    const int lmax = order_count - 1;
    const auto d00 = wigner_d_sequence(0, 0, lmax, cos_theta);
    const auto d02 = wigner_d_sequence(0, 2, lmax, cos_theta);
    const auto d22 = wigner_d_sequence(2, 2, lmax, cos_theta);
    const auto d2m2 = wigner_d_sequence(2, -2, lmax, cos_theta);

    double a1 = 0.0, a4 = 0.0, b1 = 0.0, b2 = 0.0, apc = 0.0, amc = 0.0;
    for (int l = 0; l <= lmax; ++l) {
        const GreekRow g = greek_of(layer.coeffs[l]);
        a1 += g.beta * d00[l];
        a4 += g.delta * d00[l];
        b1 += g.gamma * d02[l];
        b2 -= g.eps * d02[l];
        apc += (g.alpha + g.zeta) * d22[l];
        amc += (g.alpha - g.zeta) * d2m2[l];
    }
    const double a2 = 0.5 * (apc + amc);
    const double a3 = 0.5 * (apc - amc);

    Eigen::Matrix4d f = Eigen::Matrix4d::Zero();
    f(0, 0) = a1;
    f(0, 1) = f(1, 0) = b1;
    f(1, 1) = a2;
    f(2, 2) = a3;
    f(2, 3) = b2;
    f(3, 2) = -b2;
    f(3, 3) = a4;
    return f;
}

double scalar_phase_function(const LayerSpec& layer, double cos_theta) {
    const int lmax = layer.order_count() - 1;
    const auto d00 = wigner_d_sequence(0, 0, lmax, cos_theta);
    double a1 = 0.0;
    for (int l = 0; l <= lmax; ++l)
        a1 += layer.coeffs[l](0, 0) * d00[l];
    return a1;
}

void dump_kernels_csv(const std::string& path, const LayerSpec& layer, const Quadrature& quad, int order_count) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot open kernel dump file: " + path);
    out << "m,i,j,sign_i,sign_j";
    for (int e = 0; e < 16; ++e)
        out << ",a" << (e / 4) << (e % 4);
    out << "\n";
    char buf[32];
    for (int m = 0; m < order_count; ++m) {
        const auto kernel = assemble_azimuth_kernel(m, layer, quad);
        for (int si = 0; si < 2; ++si)
            for (int sj = 0; sj < 2; ++sj)
                for (int i = 0; i < quad.n; ++i)
                    for (int j = 0; j < quad.n; ++j) {
                        const auto& blockm = kernel.block(si == 0, sj == 0, i, j);
                        out << m << ',' << i << ',' << j << ',' << (si == 0 ? 1 : -1) << ','
                            << (sj == 0 ? 1 : -1);
                        for (int r = 0; r < 4; ++r)
                            for (int c = 0; c < 4; ++c) {
                                std::snprintf(buf, sizeof buf, "%.17g", blockm(r, c));
                                out << ',' << buf;
                            }
                        out << "\n";
                    }
    }
}

}  // namespace vrte::phase
