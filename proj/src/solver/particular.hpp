#pragma once

#include "solver/homogeneous.hpp"

namespace vrte::solver {

/// Beam-driven source amplitudes X(+-mu_i) of one (order, basis) pair:
///   X(mu) = (omega / 2 pi) A^m(mu, -mu0) D_k I0,
/// the amplitude of the exponentially attenuated inhomogeneous term. The
/// kernel column at -mu0 requires fresh function evaluations since the beam
/// direction is not a quadrature node.
struct BeamSourceTerm {
    Eigen::VectorXd x_plus;   // stacked X(+mu_i)
    Eigen::VectorXd x_minus;  // stacked X(-mu_i)
    double mu0 = 1.0;
};

BeamSourceTerm build_beam_source(int m, int k, const LayerSpec& layer, const BeamSource& source,
                                 const Quadrature& quad);

/// Particular solution amplitudes: I^P(t, +-mu_i) = Z(+-mu_i) exp(-t/mu0)
/// (local depth; any accumulated attenuation above the layer is carried as a
/// separate scale factor). g is the reduced 4N intermediate.
struct ParticularVectors {
    Eigen::VectorXd z_plus;   // upward stack
    Eigen::VectorXd z_minus;  // downward stack
    Eigen::VectorXd g;
    double mu0_effective = 1.0;  // after any resonance dithering
    double residual = 0.0;
};

/// Reduce the 8N beam-response system to 4N:
///   (F E - 1/mu0^2) g = F (X+ + Delta X-) + (1/mu0)(X+ - Delta X-),
/// recover h = mu0 (E g - (X+ + Delta X-)), psi_pm = (1/2) m^{-1}(g +- h),
/// and unfold Z+ = psi_plus, Z- = Delta psi_minus. If 1/mu0^2 collides with a
/// homogeneous eigenvalue the beam cosine is dithered by 1e-7 (warned);
/// a still-singular system raises NumericalError.
ParticularVectors solve_particular(const ReducedOperators& ops, const BeamSourceTerm& src,
                                   const EigenModeSet& modes, const phase::AzimuthKernel& kernel,
                                   Diagnostics* diag = nullptr);

}  // namespace vrte::solver
