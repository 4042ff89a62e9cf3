#include "solver/boundary.hpp"

#include <sstream>

namespace vrte::solver {

namespace {

using Cplx = std::complex<double>;

Eigen::VectorXcd mode_exp_at(const EigenModeSet& modes, double t) {
    Eigen::VectorXcd e(modes.modes.size());
    for (size_t j = 0; j < modes.modes.size(); ++j)
        e[j] = std::exp(-t / modes.modes[j].nu);
    return e;
}

}  // namespace

void chain_stacks(const LayerChainEntry& entry, double mu0, double t_local, Eigen::VectorXcd& up,
                  Eigen::VectorXcd& down) {
    const auto& modes = entry.modes->modes;
    const int dim = static_cast<int>(modes.empty() ? 0 : modes.front().psi_plus.size());
    up.setZero(dim);
    down.setZero(dim);
    for (size_t j = 0; j < modes.size(); ++j) {
        const Cplx ea = entry.coef_a[j] * std::exp(-t_local / modes[j].nu);
        const Cplx eb = entry.coef_b[j] * std::exp(-(entry.thickness - t_local) / modes[j].nu);
        up += ea * modes[j].psi_plus + eb * modes[j].psi_minus;
        down += ea * apply_block_parity(modes[j].psi_minus) + eb * apply_block_parity(modes[j].psi_plus);
    }
    const double beam = entry.beam_top * std::exp(-t_local / mu0);
    up += (beam * entry.part->z_plus).cast<Cplx>();
    down += (beam * entry.part->z_minus).cast<Cplx>();
}

Eigen::Matrix4d base_row_at(const BaseReflector& base, const Quadrature& quad, double mu_out, double mu_in) {
    if (std::holds_alternative<BlackBase>(base))
        return Eigen::Matrix4d::Zero();
    if (const auto* lam = std::get_if<LambertianBase>(&base)) {
        Eigen::Matrix4d r = Eigen::Matrix4d::Zero();
        r(0, 0) = 2.0 * lam->rho;
        return r;
    }
    const auto& tab = std::get<MuellerTableBase>(base);
    auto interp_index = [&](double mu, int& lo, double& w) {
        const auto& nodes = quad.nodes;
        if (mu <= nodes.front()) {
            lo = 0;
            w = 0.0;
            return;
        }
        if (mu >= nodes.back()) {
            lo = quad.n - 2 >= 0 ? quad.n - 2 : 0;
            w = quad.n >= 2 ? 1.0 : 0.0;
            return;
        }
        lo = 0;
        while (lo + 1 < quad.n && nodes[lo + 1] < mu)
            ++lo;
        w = (mu - nodes[lo]) / (nodes[lo + 1] - nodes[lo]);
    };
    int li, lj;
    double wi, wj;
    interp_index(mu_out, li, wi);
    interp_index(mu_in, lj, wj);
    const int i1 = std::min(li + 1, quad.n - 1);
    const int j1 = std::min(lj + 1, quad.n - 1);
    return (1 - wi) * (1 - wj) * tab.at(li, lj) + (1 - wi) * wj * tab.at(li, j1) +
           wi * (1 - wj) * tab.at(i1, lj) + wi * wj * tab.at(i1, j1);
}

Eigen::VectorXcd reflect_downward_field(const BaseReflector& base, const Quadrature& quad,
                                        const Eigen::VectorXcd& down_field) {
    const int n = quad.n;
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(4 * n);
    if (std::holds_alternative<BlackBase>(base))
        return out;
    if (const auto* lam = std::get_if<LambertianBase>(&base)) {
        Cplx flux = 0.0;
        for (int j = 0; j < n; ++j)
            flux += quad.weights[j] * quad.nodes[j] * down_field[4 * j];
        const Cplx value = 2.0 * lam->rho * flux;
        for (int i = 0; i < n; ++i)
            out[4 * i] = value;  // identical row blocks, intensity rows only
        return out;
    }
    const auto& tab = std::get<MuellerTableBase>(base);
    for (int i = 0; i < n; ++i) {
        Eigen::Vector4cd acc = Eigen::Vector4cd::Zero();
        for (int j = 0; j < n; ++j)
            acc += quad.weights[j] * quad.nodes[j] *
                   (tab.at(i, j).cast<Cplx>() * down_field.segment<4>(4 * j));
        out.segment<4>(4 * i) = acc;
    }
    return out;
}

BaseReflection build_base_reflection(const BaseReflector& base, const Quadrature& quad, int m, int k,
                                     const BeamSource& source, const EigenModeSet& bottom_modes,
                                     const ParticularVectors& bottom_part, double bottom_thickness,
                                     double beam_at_base) {
    BaseReflection refl;
    const int n = quad.n;
    const int dim = 4 * n;
    const int nmodes = static_cast<int>(bottom_modes.modes.size());
    if (std::holds_alternative<BlackBase>(base) || m > 0)
        return refl;
    if (const auto* lam = std::get_if<LambertianBase>(&base); lam && lam->rho == 0.0)
        return refl;

    refl.active = true;
    refl.lref_h.setZero(dim, 2 * nmodes);
    const Eigen::VectorXcd ea = mode_exp_at(bottom_modes, bottom_thickness);
    for (int j = 0; j < nmodes; ++j) {
        const auto& mode = bottom_modes.modes[j];
        refl.lref_h.col(j) = reflect_downward_field(base, quad, ea[j] * apply_block_parity(mode.psi_minus));
        refl.lref_h.col(nmodes + j) = reflect_downward_field(base, quad, apply_block_parity(mode.psi_plus));
    }
    refl.lref_p =
        reflect_downward_field(base, quad, (beam_at_base * bottom_part.z_minus).cast<Cplx>()).real();

    // Reflection of the attenuated beam; present only in the m = 0 systems
    // and projected onto the basis index k.
    const Eigen::Matrix4d r_beam = base_row_at(base, quad, quad.nodes[0], source.mu0);
    Eigen::Vector4d s = (source.mu0 / kPi) * (r_beam * source.stokes.to_eigen()) * beam_at_base;
    s = phase::FourierBasis::selector(k) * s;
    refl.lref_s.setZero(dim);
    if (std::holds_alternative<LambertianBase>(base)) {
        for (int i = 0; i < n; ++i)
            refl.lref_s.segment<4>(4 * i) = s;
    } else {
        for (int i = 0; i < n; ++i) {
            const Eigen::Matrix4d r_i = base_row_at(base, quad, quad.nodes[i], source.mu0);
            Eigen::Vector4d si = (source.mu0 / kPi) * (r_i * source.stokes.to_eigen()) * beam_at_base;
            refl.lref_s.segment<4>(4 * i) = phase::FourierBasis::selector(k) * si;
        }
    }
    return refl;
}

OrderBoundarySolution assemble_and_solve_boundary(
    const MaterialSpec& spec, const BeamSource& beam, const Quadrature& quad, int m,
    const std::vector<const EigenModeSet*>& modes_per_layer,
    const std::array<std::vector<const ParticularVectors*>, 2>& parts, Diagnostics* diag) {
    const int n = quad.n;
    const int dim = 4 * n;
    const int layers = static_cast<int>(spec.layers.size());
    const int block = 2 * dim;  // [A; B] unknowns per layer
    const int gdim = block * layers;
    const double mu0 = beam.mu0;

    std::vector<double> tau_top(layers, 0.0);
    for (int p = 1; p < layers; ++p)
        tau_top[p] = tau_top[p - 1] + spec.layers[p - 1].tau;
    const double tau_total = tau_top[layers - 1] + spec.layers[layers - 1].tau;

    // Per-layer mode attenuation over the full layer thickness.
    std::vector<Eigen::VectorXcd> att(layers);
    for (int p = 0; p < layers; ++p)
        att[p] = mode_exp_at(*modes_per_layer[p], spec.layers[p].tau);

    Eigen::MatrixXcd lhs = Eigen::MatrixXcd::Zero(gdim, gdim);
    std::array<Eigen::VectorXcd, 2> rhs{Eigen::VectorXcd::Zero(gdim), Eigen::VectorXcd::Zero(gdim)};

    auto col_a = [&](int p, int j) { return block * p + j; };
    auto col_b = [&](int p, int j) { return block * p + dim + j; };

    // Top: no downward diffuse radiance enters layer 0.
    for (int j = 0; j < dim; ++j) {
        const auto& mode = modes_per_layer[0]->modes[j];
        lhs.col(col_a(0, j)).segment(0, dim) = apply_block_parity(mode.psi_minus);
        lhs.col(col_b(0, j)).segment(0, dim) = att[0][j] * apply_block_parity(mode.psi_plus);
    }
    for (int k = 0; k < 2; ++k)
        rhs[k].segment(0, dim) = -(parts[k][0]->z_minus).cast<Cplx>();

    // Interface continuity, both hemispheres.
    for (int p = 0; p + 1 < layers; ++p) {
        const int row_up = dim + 2 * dim * p;
        const int row_dn = row_up + dim;
        for (int j = 0; j < dim; ++j) {
            const auto& mp = modes_per_layer[p]->modes[j];
            lhs.col(col_a(p, j)).segment(row_up, dim) = att[p][j] * mp.psi_plus;
            lhs.col(col_b(p, j)).segment(row_up, dim) = mp.psi_minus;
            lhs.col(col_a(p, j)).segment(row_dn, dim) = att[p][j] * apply_block_parity(mp.psi_minus);
            lhs.col(col_b(p, j)).segment(row_dn, dim) = apply_block_parity(mp.psi_plus);

            const auto& mq = modes_per_layer[p + 1]->modes[j];
            lhs.col(col_a(p + 1, j)).segment(row_up, dim) = -mq.psi_plus;
            lhs.col(col_b(p + 1, j)).segment(row_up, dim) = -att[p + 1][j] * mq.psi_minus;
            lhs.col(col_a(p + 1, j)).segment(row_dn, dim) = -apply_block_parity(mq.psi_minus);
            lhs.col(col_b(p + 1, j)).segment(row_dn, dim) = -att[p + 1][j] * apply_block_parity(mq.psi_plus);
        }
        const double beam_next = std::exp(-tau_top[p + 1] / mu0);
        for (int k = 0; k < 2; ++k) {
            rhs[k].segment(row_up, dim) =
                (beam_next * (parts[k][p + 1]->z_plus - parts[k][p]->z_plus)).cast<Cplx>();
            rhs[k].segment(row_dn, dim) =
                (beam_next * (parts[k][p + 1]->z_minus - parts[k][p]->z_minus)).cast<Cplx>();
        }
    }

    // Bottom: upward field equals the base reflection of the downward field
    // plus the reflected attenuated beam.
    const int row_bot = dim + 2 * dim * (layers - 1);
    const int q = layers - 1;
    const double beam_base = std::exp(-tau_total / mu0);
    std::array<BaseReflection, 2> refl;
    for (int k = 0; k < 2; ++k)
        refl[k] = build_base_reflection(spec.base, quad, m, k + 1, beam, *modes_per_layer[q],
                                        *parts[k][q], spec.layers[q].tau, beam_base);

    for (int j = 0; j < dim; ++j) {
        const auto& mode = modes_per_layer[q]->modes[j];
        lhs.col(col_a(q, j)).segment(row_bot, dim) = att[q][j] * mode.psi_plus;
        lhs.col(col_b(q, j)).segment(row_bot, dim) = mode.psi_minus;
        if (refl[0].active) {
            // The reflection matrix itself carries no k dependence.
            lhs.col(col_a(q, j)).segment(row_bot, dim) -= refl[0].lref_h.col(j);
            lhs.col(col_b(q, j)).segment(row_bot, dim) -= refl[0].lref_h.col(dim + j);
        }
    }
    for (int k = 0; k < 2; ++k) {
        rhs[k].segment(row_bot, dim) = -(beam_base * parts[k][q]->z_plus).cast<Cplx>();
        if (refl[k].active)
            rhs[k].segment(row_bot, dim) += (refl[k].lref_p + refl[k].lref_s).cast<Cplx>();
    }

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(lhs);

    OrderBoundarySolution out;
    out.diagnostics.condition_estimate = 1.0 / std::max(lu.rcond(), 1e-300);

    const double lhs_norm = lhs.cwiseAbs().maxCoeff();
    for (int k = 0; k < 2; ++k) {
        Eigen::VectorXcd c = lu.solve(rhs[k]);
        const double rhs_norm = rhs[k].cwiseAbs().maxCoeff();
        double scale = lhs_norm * std::max(c.cwiseAbs().maxCoeff(), 1e-300) + rhs_norm;
        double resid = (lhs * c - rhs[k]).cwiseAbs().maxCoeff();
        if (resid > 1e-10 * scale) {
            c += lu.solve(rhs[k] - lhs * c);  // one refinement step
            resid = (lhs * c - rhs[k]).cwiseAbs().maxCoeff();
            scale = lhs_norm * std::max(c.cwiseAbs().maxCoeff(), 1e-300) + rhs_norm;
        }
        if (!c.allFinite() || (rhs_norm > 0.0 && resid > 1e-9 * scale)) {
            std::ostringstream os;
            os << "boundary system ill-conditioned at order m = " << m
               << " (condition ~ " << out.diagnostics.condition_estimate << ", residual " << resid << ")";
            throw NumericalError(os.str());
        }
        out.diagnostics.residual = std::max(out.diagnostics.residual, rhs_norm > 0 ? resid / scale : 0.0);
        auto& per_layer = out.coefficients[k];
        per_layer.resize(layers);
        for (int p = 0; p < layers; ++p)
            per_layer[p] = {c.segment(block * p, dim), c.segment(block * p + dim, dim)};
    }

    if (diag && out.diagnostics.condition_estimate > 1e14) {
        std::ostringstream os;
        os << "boundary condition estimate " << out.diagnostics.condition_estimate << " at order m = " << m;
        diag->warn(os.str());
    }
    return out;
}

}  // namespace vrte::solver
