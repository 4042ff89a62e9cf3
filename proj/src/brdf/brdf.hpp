#pragma once

#include "solver/pipeline.hpp"

namespace vrte::brdf {

/// Mueller-matrix reflectance table over (mu_in, mu_out, dphi). Outgoing
/// cosines sit on the quadrature nodes; dphi is uniform over a full turn.
struct BrdfTable {
    std::vector<double> mu_in;
    std::vector<double> mu_out;
    std::vector<double> dphi;
    std::vector<MuellerMatrix> entries;  // [in][out][dphi]
    int quadrature_n = 0;
    int order_count = 0;
    uint64_t material_hash = 0;

    MuellerMatrix& at(size_t ii, size_t io, size_t ip) {
        return entries[(ii * mu_out.size() + io) * dphi.size() + ip];
    }
    const MuellerMatrix& at(size_t ii, size_t io, size_t ip) const {
        return entries[(ii * mu_out.size() + io) * dphi.size() + ip];
    }
};

/// Default incident Stokes basis: unpolarized plus one vector per
/// polarization channel, each physically realizable.
std::vector<StokesVector> default_incident_basis();

/// Exiting radiance is solved for every basis vector and the Mueller matrix
/// recovered against the stacked incident irradiances (mu_in-weighted Stokes
/// vectors). The basis must be well conditioned; negative intensity entries
/// from roundoff are clamped to zero and counted.
BrdfTable compute_brdf(solver::VrteSolver& solver, std::span<const double> mu_in, int n_dphi,
                       const std::vector<StokesVector>& basis = default_incident_basis());

/// Directional-hemispherical reflectance of one incident column of the
/// table: integral of the intensity row weighted by the exit cosine, using
/// the solver quadrature in mu and the uniform rule in dphi. One value per
/// incident Stokes channel.
std::array<double, 4> directional_hemispherical_reflectance(const BrdfTable& table,
                                                            const Quadrature& quad, size_t mu_in_index);

/// Same quantity straight from a solved incident: exiting nodal flux at the
/// top over the incident flux, per Stokes channel of the exiting field.
std::array<double, 4> directional_hemispherical_reflectance(solver::VrteSolver& solver,
                                                            const solver::IncidentSolution& sol,
                                                            int n_phi = 19);

uint64_t material_hash(const MaterialSpec& spec);

}  // namespace vrte::brdf
