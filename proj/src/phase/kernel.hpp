#pragma once

#include "core/material.hpp"
#include "core/types.hpp"
#include "phase/wigner.hpp"

namespace vrte::phase {

/// Azimuthal parity operator diag(1,1,-1,-1).
inline const Eigen::Vector4d& parity_diag() {
    static const Eigen::Vector4d d(1.0, 1.0, -1.0, -1.0);
    return d;
}

/// Elementwise D * X * D with D = diag(1,1,-1,-1).
Eigen::Matrix4d parity_conjugate(const Eigen::Matrix4d& x);

/// Fourier kernel of one layer at order m over all signed node pairs:
///   A^m(mu, mu') = sum_l Pi_l^m(mu) B_l Pi_l^m(mu').
/// Blocks are indexed i*n + j; negative-node blocks come from the parity
/// identity Pi_l^m(-mu) = (-1)^{l-m} D Pi_l^m(mu) D rather than fresh
/// recurrences.
struct AzimuthKernel {
    int m = 0;
    int n = 0;
    std::vector<Eigen::Matrix4d> pp;  // A( mu_i,  mu_j)
    std::vector<Eigen::Matrix4d> pm;  // A( mu_i, -mu_j)
    std::vector<Eigen::Matrix4d> mp;  // A(-mu_i,  mu_j)
    std::vector<Eigen::Matrix4d> mm;  // A(-mu_i, -mu_j)

    const Eigen::Matrix4d& block(bool row_up, bool col_up, int i, int j) const {
        const auto& v = row_up ? (col_up ? pp : pm) : (col_up ? mp : mm);
        return v[static_cast<size_t>(i) * n + j];
    }
};

AzimuthKernel assemble_azimuth_kernel(int m, const LayerSpec& layer, const Quadrature& quad);

/// Kernel row at an arbitrary (signed) direction cosine mu against all signed
/// quadrature nodes: plus[j] = A^m(mu, mu_j), minus[j] = A^m(mu, -mu_j).
/// This is the per-output-direction quantity of the reconstruction step.
struct KernelRow {
    std::vector<Eigen::Matrix4d> plus, minus;
};

KernelRow kernel_row(int m, const LayerSpec& layer, const Quadrature& quad, double mu);

/// Beam column A^m(+-mu_i, mu_beam) for all nodes; mu_beam is the signed
/// cosine of the beam propagation direction (negative for a downward beam).
struct KernelColumn {
    std::vector<Eigen::Matrix4d> up, down;  // rows at +mu_i and -mu_i
};

KernelColumn kernel_beam_column(int m, const LayerSpec& layer, const Quadrature& quad, double mu_beam);

/// Azimuthal basis of the Fourier expansion. The k = 1 matrices carry the
/// cosine block on (I,Q) and sine on (U,V); k = 2 swaps them with a sign.
/// Order m = 0 carries weight 1, higher orders weight 2.
struct FourierBasis {
    static Eigen::Matrix4d phi(int k, int m, double x);
    static const Eigen::Matrix4d& selector(int k);  // D_1 = diag(1,1,0,0), D_2 = diag(0,0,1,1)
};

/// Full phase matrix by the azimuthal series (the Fourier path):
///   P(out <- in) = sum_m sum_k Phi_k^m(phi_in - phi_out) A^m(mu_out, mu_in) D_k.
/// Exact (not truncated) for coefficients of finite order. Used as a test and
/// sampling surface, not in the solver hot path.
MuellerMatrix evaluate_phase_matrix(const Direction& d_in, const Direction& d_out, const LayerSpec& layer);

/// Scattering matrix F(Theta) in the scattering plane from the expansion
/// coefficients, via Wigner d-functions of the scattering angle:
///   a1 = sum beta_l d^l_00,   a4 = sum delta_l d^l_00,
///   b1 = sum gamma_l d^l_02,  b2 = -sum eps_l d^l_02,
///   a2 +- a3 = sum (alpha_l +- zeta_l) d^l_{2,+-2}.
Eigen::Matrix4d scatter_matrix(const LayerSpec& layer, double cos_theta);

/// Scalar phase function a1(cos Theta) (the I-channel of scatter_matrix).
double scalar_phase_function(const LayerSpec& layer, double cos_theta);

/// Dump all kernel blocks for order range [0, order_count) as CSV rows
/// "m,i,j,sign_i,sign_j,<16 entries>".
void dump_kernels_csv(const std::string& path, const LayerSpec& layer, const Quadrature& quad, int order_count);

}  // namespace vrte::phase
