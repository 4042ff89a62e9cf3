#include "solver/particular.hpp"

#include <sstream>

namespace vrte::solver {

BeamSourceTerm build_beam_source(int m, int k, const LayerSpec& layer, const BeamSource& source,
                                 const Quadrature& quad) {
    const int n = quad.n;
    BeamSourceTerm term;
    term.mu0 = source.mu0;
    term.x_plus.setZero(4 * n);
    term.x_minus.setZero(4 * n);
    if (layer.omega == 0.0)
        return term;

    const auto column = phase::kernel_beam_column(m, layer, quad, -source.mu0);
    const Eigen::Vector4d selected = phase::FourierBasis::selector(k) * source.stokes.to_eigen();
    const double scale = layer.omega / (2.0 * kPi);
    for (int i = 0; i < n; ++i) {
        term.x_plus.segment<4>(4 * i) = scale * (column.up[i] * selected);
        term.x_minus.segment<4>(4 * i) = scale * (column.down[i] * selected);
    }
    return term;
}

ParticularVectors solve_particular(const ReducedOperators& ops, const BeamSourceTerm& src,
                                   const EigenModeSet& modes, const phase::AzimuthKernel& kernel,
                                   Diagnostics* diag) {
    const int dim = 4 * ops.n;
    ParticularVectors out;
    out.mu0_effective = src.mu0;
    out.z_plus.setZero(dim);
    out.z_minus.setZero(dim);
    out.g.setZero(dim);

    const double src_norm = std::max(src.x_plus.cwiseAbs().maxCoeff(), src.x_minus.cwiseAbs().maxCoeff());
    if (src_norm == 0.0)
        return out;

    // Guard against 1/mu0^2 landing on a homogeneous eigenvalue, where the
    // shifted operator is singular.
    double mu0 = src.mu0;
    for (const auto& mode : modes.modes) {
        const std::complex<double> lambda = 1.0 / (mode.nu * mode.nu);
        if (std::abs(lambda - 1.0 / (mu0 * mu0)) < 1e-8 * std::abs(lambda)) {
            mu0 *= (1.0 - 1e-7);
            if (diag) {
                std::ostringstream os;
                os << "beam cosine resonates with a separation constant at order m = " << ops.m
                   << "; dithered mu0 to " << mu0;
                diag->warn(os.str());
            }
            break;
        }
    }
    out.mu0_effective = mu0;

    const Eigen::VectorXd s_plus = src.x_plus + apply_block_parity(src.x_minus);
    const Eigen::VectorXd s_minus = src.x_plus - apply_block_parity(src.x_minus);

    const Eigen::MatrixXd lhs =
        ops.f * ops.e - Eigen::MatrixXd::Identity(dim, dim) / (mu0 * mu0);
    const Eigen::VectorXd rhs = ops.f * s_plus - s_minus / mu0;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
    Eigen::VectorXd g = lu.solve(rhs);
    const double sys_residual = (lhs * g - rhs).cwiseAbs().maxCoeff();
    const double sys_scale = rhs.cwiseAbs().maxCoeff() + lhs.cwiseAbs().maxCoeff() * g.cwiseAbs().maxCoeff();
    if (!g.allFinite() || sys_residual > 1e-8 * std::max(sys_scale, 1e-300)) {
        std::ostringstream os;
        os << "singular beam-response system at order m = " << ops.m << ", mu0 = " << src.mu0;
        throw NumericalError(os.str());
    }

    const Eigen::VectorXd h = mu0 * (s_plus - ops.e * g);
    const Eigen::VectorXd inv_m = ops.m_diag.cwiseInverse();
    const Eigen::VectorXd psi_plus = 0.5 * inv_m.asDiagonal() * (g + h);
    const Eigen::VectorXd psi_minus = 0.5 * inv_m.asDiagonal() * (g - h);

    out.g = g;
    out.z_plus = psi_plus;
    out.z_minus = apply_block_parity(psi_minus);

    // Verify the unreduced balance: ((1/mu0) M + I - (omega/2) A w) z = x
    // for the beam's exp(-t/mu0) decay, with M the signed cosine scaling.
    const Eigen::MatrixXd full_op = full_transport_operator(ops, kernel);
    Eigen::VectorXd z(2 * dim), x(2 * dim), minv(2 * dim);
    z.head(dim) = out.z_plus;
    z.tail(dim) = out.z_minus;
    x.head(dim) = src.x_plus;
    x.tail(dim) = src.x_minus;
    minv.head(dim) = inv_m;
    minv.tail(dim) = -inv_m;
    // full_op = M^{-1}((omega/2) A w - I), so the balance reads
    // M^{-1} x = (1/mu0) z - full_op z.
    const Eigen::VectorXd residual_vec =
        minv.asDiagonal() * x - z / mu0 + full_op * z;
    out.residual = residual_vec.cwiseAbs().maxCoeff() /
                   std::max((minv.asDiagonal() * x).cwiseAbs().maxCoeff(), 1e-300);
    if (out.residual > 1e-6) {
        std::ostringstream os;
        os << "beam-response residual " << out.residual << " at order m = " << ops.m;
        throw NumericalError(os.str());
    }
    return out;
}

}  // namespace vrte::solver
