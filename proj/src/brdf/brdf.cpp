#include "brdf/brdf.hpp"

#include <Eigen/SVD>

namespace vrte::brdf {

std::vector<StokesVector> default_incident_basis() {
    return {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 0, 1, 0}, {1, 0, 0, 1}};
}

uint64_t material_hash(const MaterialSpec& spec) {
    // FNV-1a over the numeric content.
    uint64_t h = 1469598103934665603ull;
    auto mix = [&h](double v) {
        uint64_t b;
        std::memcpy(&b, &v, sizeof b);
        for (int i = 0; i < 8; ++i) {
            h ^= (b >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    for (const auto& layer : spec.layers) {
        mix(layer.omega);
        mix(layer.tau);
        for (const auto& b : layer.coeffs)
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c)
                    mix(b(r, c));
    }
    if (const auto* lam = std::get_if<LambertianBase>(&spec.base)) {
        mix(1.0);
        mix(lam->rho);
    } else if (const auto* tab = std::get_if<MuellerTableBase>(&spec.base)) {
        mix(2.0);
        for (const auto& r : tab->table)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    mix(r(i, j));
    }
    return h;
}

BrdfTable compute_brdf(solver::VrteSolver& solver, std::span<const double> mu_in, int n_dphi,
                       const std::vector<StokesVector>& basis) {
    if (basis.size() < 4)
        throw ValidationError("brdf: need at least 4 incident Stokes vectors");
    const int nb = static_cast<int>(basis.size());
    Eigen::MatrixXd basis_mat(4, nb);
    for (int b = 0; b < nb; ++b)
        basis_mat.col(b) = basis[b].to_eigen();
    {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis_mat);
        const double cond = svd.singularValues()(0) / std::max(svd.singularValues()(3), 1e-300);
        if (cond > 1e3)
            throw ValidationError("brdf: incident Stokes basis is ill-conditioned (condition " +
                                  std::to_string(cond) + ")");
    }
    if (n_dphi < 1)
        throw ValidationError("brdf: dphi grid must have at least one point");
    for (double mu : mu_in)
        if (!(mu > 0.0 && mu <= 1.0))
            throw ValidationError("brdf: incident cosines must lie in (0,1]");

    solver.prepare_homogeneous();
    const auto& quad = solver.quadrature();

    BrdfTable table;
    table.mu_in.assign(mu_in.begin(), mu_in.end());
    table.mu_out = quad.nodes;
    table.dphi.resize(n_dphi);
    for (int j = 0; j < n_dphi; ++j)
        table.dphi[j] = kTwoPi * j / n_dphi;
    table.quadrature_n = quad.n;
    table.order_count = solver.order_count();
    table.material_hash = material_hash(solver.material());
    table.entries.assign(table.mu_in.size() * table.mu_out.size() * table.dphi.size(),
                         MuellerMatrix{});

    uint64_t clamped = 0;
    for (size_t ii = 0; ii < table.mu_in.size(); ++ii) {
        const double mu0 = table.mu_in[ii];
        // Exiting Stokes per basis vector at every (node, dphi).
        std::vector<std::vector<StokesVector>> exits(basis.size());
        for (size_t b = 0; b < basis.size(); ++b) {
            solver::Incident inc;
            inc.mu0 = mu0;
            inc.phi0 = 0.0;
            inc.stokes = basis[b];
            const auto sol = solver.solve_incident(inc);
            const auto comps = solver.nodal_components(sol, 0.0);
            exits[b].resize(table.mu_out.size() * table.dphi.size());
            for (size_t io = 0; io < table.mu_out.size(); ++io)
                for (size_t ip = 0; ip < table.dphi.size(); ++ip)
                    exits[b][io * table.dphi.size() + ip] =
                        solver.nodal_value(comps, static_cast<int>(io), true, table.dphi[ip]);
        }

        // Mueller recovery against the stacked incident irradiances; a
        // least-squares fit when more than four vectors are supplied.
        const Eigen::MatrixXd irradiance = mu0 * basis_mat;
        const Eigen::MatrixXd pseudo_inverse =
            irradiance.transpose() *
            (irradiance * irradiance.transpose()).inverse();
        for (size_t io = 0; io < table.mu_out.size(); ++io)
            for (size_t ip = 0; ip < table.dphi.size(); ++ip) {
                Eigen::MatrixXd exit_stack(4, nb);
                for (int b = 0; b < nb; ++b)
                    exit_stack.col(b) = exits[b][io * table.dphi.size() + ip].to_eigen();
                Eigen::Matrix4d fr = exit_stack * pseudo_inverse;
                if (fr(0, 0) < 0.0) {
                    if (fr(0, 0) < -1e-9)
                        throw NumericalError("brdf: negative intensity entry " +
                                             std::to_string(fr(0, 0)));
                    fr(0, 0) = 0.0;
                    ++clamped;
                }
                table.at(ii, io, ip) = MuellerMatrix(fr);
            }
    }
    solver.counters().clamped_brdf_entries += clamped;
    if (clamped > 0)
        solver.diagnostics().warn("brdf: clamped " + std::to_string(clamped) +
                                  " negative intensity entries to zero");
    return table;
}

std::array<double, 4> directional_hemispherical_reflectance(const BrdfTable& table,
                                                            const Quadrature& quad,
                                                            size_t mu_in_index) {
    std::array<double, 4> out{0, 0, 0, 0};
    const double dphi_weight = kTwoPi / static_cast<double>(table.dphi.size());
    for (size_t io = 0; io < table.mu_out.size(); ++io)
        for (size_t ip = 0; ip < table.dphi.size(); ++ip) {
            const auto& m = table.at(mu_in_index, io, ip).m;
            const double w = quad.weights[io] * quad.nodes[io] * dphi_weight;
            for (int c = 0; c < 4; ++c)
                out[c] += w * m(0, c);
        }
    return out;
}

std::array<double, 4> directional_hemispherical_reflectance(solver::VrteSolver& solver,
                                                            const solver::IncidentSolution& sol,
                                                            int n_phi) {
    const auto& quad = solver.quadrature();
    const auto comps = solver.nodal_components(sol, 0.0);
    std::array<double, 4> flux{0, 0, 0, 0};
    const double dphi_weight = kTwoPi / static_cast<double>(n_phi);
    for (int i = 0; i < quad.n; ++i)
        for (int j = 0; j < n_phi; ++j) {
            const StokesVector s = solver.nodal_value(comps, i, true, kTwoPi * j / n_phi);
            const double w = quad.weights[i] * quad.nodes[i] * dphi_weight;
            for (int c = 0; c < 4; ++c)
                flux[c] += w * s[c];
        }
    const double incident = sol.incident.mu0 * sol.incident.stokes.i;
    for (auto& f : flux)
        f /= std::max(incident, 1e-300);
    return flux;
}

}  // namespace vrte::brdf
