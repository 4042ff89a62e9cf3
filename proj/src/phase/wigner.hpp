#pragma once

#include "core/types.hpp"

#include <span>

namespace vrte::phase {

/// Wigner d-functions d^l_{mn}(theta) for fixed (m, n) at x = cos(theta),
/// returned for l = 0..lmax (zero below l_min = max(|m|,|n|)). Upward
/// three-term recurrence in l with the closed-form value at l_min.
std::vector<double> wigner_d_sequence(int m, int n, int lmax, double x);

/// Generalized spherical functions entering the phase-matrix expansion, in
/// real combinations of d^l_{m0} and d^l_{m,+-2}:
///
///   P_l^m(x) = (-1)^m d^l_{m0},
///   R_l^m(x) = (-1)^m (d^l_{m2} + d^l_{m,-2}) / 2,
///   T_l^m(x) = -(-1)^m (d^l_{m2} - d^l_{m,-2}) / 2.
///
/// The relative signs are pinned by requiring the azimuthal series of the
/// phase matrix to reproduce the scattering-plane rotation evaluation.
///
/// P reduces to the normalized associated Legendre function; R and T vanish
/// for l < 2 and T vanishes identically at m = 0.
struct GsfSet {
    std::vector<double> p, r, t;  // indexed by l = 0..lmax
};

GsfSet gsf_sequence(int m, int lmax, double x);

/// 4x4 matrix from a precomputed function set at one l. flip_t selects the
/// parity-conjugated variant D Pi D (sign of the T entries flipped).
Eigen::Matrix4d gsf_matrix(const GsfSet& g, int l, bool flip_t = false);

/// 4x4 matrix of the generalized spherical functions at a single (l, m, mu):
/// diag(P, R, R, P) with -T at positions (1,2) and (2,1). Zero for l < m.
Eigen::Matrix4d legendre_matrix(int l, int m, double mu);

/// Per-order table of the functions over a set of mu values.
/// values[node][l] layout; l runs 0..L-1 with zeros below max(m, minimum l).
struct LegendreMatrixTable {
    int m = 0;
    int order_count = 0;
    std::vector<GsfSet> per_mu;  // one entry per input mu

    Eigen::Matrix4d matrix(int mu_index, int l) const;
};

LegendreMatrixTable build_legendre_table(int m, int order_count, std::span<const double> mus);

}  // namespace vrte::phase
