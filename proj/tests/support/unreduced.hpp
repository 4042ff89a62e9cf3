#pragma once

// Direct dense solves of the unreduced 8N systems, assembled entry by entry
// from the kernel blocks. These are the cross-check route for the half-size
// production paths.

#include "solver/boundary.hpp"

namespace unreduced {

using namespace vrte;

// ((1/mu0) M + I - (omega/2) A w) z = x with the signed cosine scaling.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> particular(
    const LayerSpec& layer, const Quadrature& quad, const phase::AzimuthKernel& kernel,
    const solver::BeamSourceTerm& src, double mu0) {
    const int n = quad.n;
    const int dim = 4 * n;
    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(2 * dim, 2 * dim);
    const double c = 0.5 * layer.omega;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double w = c * quad.weights[j];
            sys.block<4, 4>(4 * i, 4 * j) -= w * kernel.block(true, true, i, j);
            sys.block<4, 4>(4 * i, dim + 4 * j) -= w * kernel.block(true, false, i, j);
            sys.block<4, 4>(dim + 4 * i, 4 * j) -= w * kernel.block(false, true, i, j);
            sys.block<4, 4>(dim + 4 * i, dim + 4 * j) -= w * kernel.block(false, false, i, j);
        }
    for (int i = 0; i < n; ++i)
        for (int comp = 0; comp < 4; ++comp) {
            sys(4 * i + comp, 4 * i + comp) += 1.0 + quad.nodes[i] / mu0;
            sys(dim + 4 * i + comp, dim + 4 * i + comp) += 1.0 - quad.nodes[i] / mu0;
        }
    Eigen::VectorXd rhs(2 * dim);
    rhs.head(dim) = src.x_plus;
    rhs.tail(dim) = src.x_minus;
    const Eigen::VectorXd z = sys.partialPivLu().solve(rhs);
    return {z.head(dim), z.tail(dim)};
}

// Single-layer boundary system assembled from first principles: no downward
// diffuse at the top, base reflection at the bottom. Returns [A; B].
inline Eigen::VectorXcd boundary_coefficients(const MaterialSpec& spec, const BeamSource& beam,
                                              const Quadrature& quad, int m,
                                              const solver::EigenModeSet& modes,
                                              const solver::ParticularVectors& part, int k) {
    const int n = quad.n;
    const int dim = 4 * n;
    const double tau0 = spec.layers[0].tau;
    const double mu0 = beam.mu0;

    Eigen::MatrixXcd lhs(2 * dim, 2 * dim);
    Eigen::VectorXcd rhs(2 * dim);
    for (int j = 0; j < dim; ++j) {
        const auto att = std::exp(-tau0 / modes.modes[j].nu);
        const Eigen::VectorXcd down_a = solver::apply_block_parity(modes.modes[j].psi_minus);
        const Eigen::VectorXcd down_b = solver::apply_block_parity(modes.modes[j].psi_plus);
        lhs.col(j).head(dim) = down_a;
        lhs.col(dim + j).head(dim) = att * down_b;

        Eigen::VectorXcd bot_a = att * modes.modes[j].psi_plus;
        Eigen::VectorXcd bot_b = modes.modes[j].psi_minus;
        if (m == 0) {
            const Eigen::VectorXcd refl_a =
                solver::reflect_downward_field(spec.base, quad, att * down_a);
            const Eigen::VectorXcd refl_b = solver::reflect_downward_field(spec.base, quad, down_b);
            bot_a -= refl_a;
            bot_b -= refl_b;
        }
        lhs.col(j).tail(dim) = bot_a;
        lhs.col(dim + j).tail(dim) = bot_b;
    }
    const double beam_bot = std::exp(-tau0 / mu0);
    rhs.head(dim) = -part.z_minus.cast<std::complex<double>>();
    Eigen::VectorXcd bottom = -(beam_bot * part.z_plus).cast<std::complex<double>>();
    if (m == 0) {
        bottom += solver::reflect_downward_field(spec.base, quad,
                                                 (beam_bot * part.z_minus).cast<std::complex<double>>());
        const Eigen::Matrix4d r_beam =
            solver::base_row_at(spec.base, quad, quad.nodes[0], mu0);
        for (int i = 0; i < n; ++i) {
            const Eigen::Matrix4d r_i =
                std::holds_alternative<LambertianBase>(spec.base)
                    ? r_beam
                    : solver::base_row_at(spec.base, quad, quad.nodes[i], mu0);
            Eigen::Vector4d s = (mu0 / kPi) * (r_i * beam.stokes.to_eigen()) * beam_bot;
            bottom.segment<4>(4 * i) +=
                (phase::FourierBasis::selector(k) * s).cast<std::complex<double>>();
        }
    }
    rhs.tail(dim) = bottom;
    return lhs.partialPivLu().solve(rhs);
}

}  // namespace unreduced
