#pragma once

#include "solver/boundary.hpp"

#include <span>

namespace vrte::solver {

/// Stokes grid over (tau level, signed mu, azimuth).
struct RadianceField {
    std::vector<double> taus;
    std::vector<double> mus;   // signed zenith cosines
    std::vector<double> phis;  // absolute azimuths
    std::vector<StokesVector> values;  // [tau][mu][phi] row-major
    int order_count = 0;
    int quadrature_n = 0;

    StokesVector& at(size_t it, size_t imu, size_t iphi) {
        return values[(it * mus.size() + imu) * phis.size() + iphi];
    }
    const StokesVector& at(size_t it, size_t imu, size_t iphi) const {
        return values[(it * mus.size() + imu) * phis.size() + iphi];
    }
};

/// Per-(m,k) stacks at a global depth within the layer stack.
void nodal_stacks(const LayerChain& chain, double mu0, double tau, Eigen::VectorXcd& up,
                  Eigen::VectorXcd& down);

/// Exponential decomposition of the source function along one output
/// direction inside one layer:
///   S(t) = sum_j a_j exp(-t/nu_j) + sum_j b_j exp(-(d-t)/nu_j) + c exp(-t/mu0),
/// with 4-vector coefficients and t measured from the layer top.
struct SourceCoefficients {
    std::vector<std::pair<std::complex<double>, Eigen::Vector4cd>> from_top;
    std::vector<std::pair<std::complex<double>, Eigen::Vector4cd>> from_bottom;
    Eigen::Vector4cd beam = Eigen::Vector4cd::Zero();
    double mu0 = 1.0;
    double thickness = 0.0;
};

/// Assemble the decomposition for one layer-chain entry. `row` carries the
/// kernel blocks A^m(mu, +-mu_n); `beam_block` is A^m(mu, -mu0).
SourceCoefficients source_coefficients(const LayerChainEntry& entry, const Quadrature& quad, int k,
                                       const BeamSource& source, double mu_signed,
                                       const phase::KernelRow& row, const Eigen::Matrix4d& beam_block);

/// Direct evaluation of the decomposition at local depth t (testing hook).
Eigen::Vector4cd evaluate_source(const SourceCoefficients& coeffs, double t);

/// Sweep the source-function integrals for one (m, k) component along one
/// signed output direction, returning the field at each requested tau level.
/// Upward directions integrate from the base value (black: zero; otherwise
/// the reflected nodal field), downward from the vanishing top condition.
std::vector<Eigen::Vector4cd> reconstruct_component(
    const LayerChain& chain, const Quadrature& quad, int m, int k, const BeamSource& source,
    const BaseReflector& base, double mu_signed, std::span<const double> taus,
    const std::vector<const phase::KernelRow*>& rows_per_layer,
    const std::vector<Eigen::Matrix4d>& beam_blocks_per_layer);

/// Closed-form source-function integration within one layer: field at local
/// depth t for an upward (+mu) or downward (-mu) direction given the value on
/// the far boundary. Rates may sit arbitrarily close to mu; those branches
/// switch to the linear-in-depth limit form instead of cancelling.
Eigen::Vector4cd integrate_source_upward(const SourceCoefficients& coeffs, double mu, double t,
                                         const Eigen::Vector4cd& i_bottom);
Eigen::Vector4cd integrate_source_downward(const SourceCoefficients& coeffs, double mu, double t,
                                           const Eigen::Vector4cd& i_top);

/// Azimuthal series at phi - phi0 from the per-order component vectors
/// (indexed [m][k-1]). Checks that the imaginary residue stays below
/// tol * scale before discarding it.
StokesVector azimuthal_assemble(const std::vector<std::array<Eigen::Vector4cd, 2>>& components,
                                double dphi, double imag_tol = 1e-9);

}  // namespace vrte::solver
