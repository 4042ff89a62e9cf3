#pragma once

#include "core/execution.hpp"
#include "core/material.hpp"
#include "phase/kernel.hpp"

#include <complex>

namespace vrte::solver {

/// Reduced half-size operators of one (layer, order) pair. With the positive
/// node scalings m = diag(mu_i x I4), w = diag(alpha_i x I4) and the signed
/// kernel blocks, the 8N transport operator folds onto
///   E = (I - K1 - K2) m^{-1},   F = (I - K1 + K2) m^{-1},
///   K1 = (omega/2) A(+,+) w,    K2 = (omega/2) A(+,-) Delta w,
/// so that the separation constants solve (F E) x = (1/nu^2) x.
struct ReducedOperators {
    int m = 0;
    int n = 0;
    double omega = 0.0;
    Eigen::MatrixXd e, f;    // 4N x 4N
    Eigen::VectorXd m_diag;  // positive node cosines, repeated per Stokes row
    Eigen::VectorXd w_diag;  // weights, same layout
};

/// Kernel-block route (the production path).
ReducedOperators build_reduced_operators(int m, const LayerSpec& layer, const Quadrature& quad,
                                         const phase::AzimuthKernel& kernel);

/// Stacked generalized-spherical-function route:
///   E/F = (I - (omega/2) sum_l Pi_l B_l [I -+(-1)^{l-m} D] Pi_l^T w) m^{-1}.
/// Algebraically identical to the kernel route; kept as a cross-check.
ReducedOperators build_reduced_operators_stacked(int m, const LayerSpec& layer, const Quadrature& quad);

/// One homogeneous mode: separation constant nu (Re nu > 0) and the half-space
/// eigenvector pair recovered as psi_pm = (1/2) m^{-1} (I +- nu E) x. The
/// decaying branch has upward stack psi_plus and downward stack Delta*psi_minus;
/// the mirrored branch swaps the pair.
struct EigenMode {
    std::complex<double> nu;
    Eigen::VectorXcd psi_plus;
    Eigen::VectorXcd psi_minus;
    double residual = 0.0;
};

struct EigenModeSet {
    int m = 0;
    int n = 0;
    std::vector<EigenMode> modes;  // exactly 4N entries
    double max_residual = 0.0;

    std::vector<std::complex<double>> eigenvalues() const {
        std::vector<std::complex<double>> lam;
        lam.reserve(modes.size());
        for (const auto& mode : modes)
            lam.push_back(1.0 / (mode.nu * mode.nu));
        return lam;
    }
};

/// Separation constants above this value are clamped to it. The value
/// balances three constraints: the clamped mode's eigen residual is 1/nu
/// (must stay below the residual bound), the quadratic error of the
/// exponential pair spanning the conservative constant-plus-linear family is
/// (tau0/nu)^2 (negligible for tau0 <= 1e4), and the boundary system's
/// conditioning degrades as nu grows because the mode's two columns become
/// parallel.
inline constexpr double kNuClamp = 4e9;

/// Relative bound on the full-operator eigen residual of every mode.
inline constexpr double kEigenResidualBound = 1e-9;

/// Solve the half-size eigenproblem and recover all 4N modes. Verifies every
/// mode against the full 8N transport operator; failures raise NumericalError
/// tagged with the order and a condition estimate.
EigenModeSet solve_homogeneous(const ReducedOperators& ops, const phase::AzimuthKernel& kernel);

/// Apply the block parity operator Delta = diag(D, ..., D) to a stacked vector.
Eigen::VectorXcd apply_block_parity(const Eigen::VectorXcd& v);
Eigen::VectorXd apply_block_parity(const Eigen::VectorXd& v);

/// Dense 8N transport operator M^{-1}((omega/2) A w - I), used for residual
/// checks and by the unreduced cross-check path.
Eigen::MatrixXd full_transport_operator(const ReducedOperators& ops, const phase::AzimuthKernel& kernel);

}  // namespace vrte::solver
