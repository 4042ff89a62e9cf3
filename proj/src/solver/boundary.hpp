#pragma once

#include "solver/particular.hpp"

#include <array>

namespace vrte::solver {

/// Everything needed to evaluate one layer's field for one (order, basis)
/// pair: the shared homogeneous modes, the beam response, and the solved
/// combination coefficients. Depth is local to the layer; the attenuation
/// accumulated above the layer rides in beam_top.
struct LayerChainEntry {
    const LayerSpec* layer = nullptr;
    const EigenModeSet* modes = nullptr;
    const ParticularVectors* part = nullptr;
    Eigen::VectorXcd coef_a, coef_b;
    double tau_top = 0.0;
    double thickness = 0.0;
    double beam_top = 1.0;  // exp(-tau_top / mu0)
};

/// Layers top to bottom for one (m, k).
using LayerChain = std::vector<LayerChainEntry>;

/// Homogeneous + beam stacks at a local depth t in [0, thickness]. All
/// exponential arguments are nonpositive by construction: decaying modes are
/// measured from the layer top, mirrored modes from the layer bottom.
void chain_stacks(const LayerChainEntry& entry, double mu0, double t_local, Eigen::VectorXcd& up,
                  Eigen::VectorXcd& down);

/// Base-reflection pieces of the bottom boundary row block for one (m, k):
/// the matrix coupling to the bottom layer's unknowns, the beam-response
/// contribution, and the reflected attenuated beam. All zero for a black
/// base and for orders m >= 1 (the supported reflectors carry no azimuth
/// dependence). The Lambertian path computes one row block and replicates it.
struct BaseReflection {
    bool active = false;
    Eigen::MatrixXcd lref_h;  // 4N x 8N, columns [A_j | B_j] of the bottom layer
    Eigen::VectorXd lref_p;   // 4N
    Eigen::VectorXd lref_s;   // 4N
};

BaseReflection build_base_reflection(const BaseReflector& base, const Quadrature& quad, int m, int k,
                                     const BeamSource& source, const EigenModeSet& bottom_modes,
                                     const ParticularVectors& bottom_part, double bottom_thickness,
                                     double beam_at_base);

/// Reflect a stacked downward field off the base: rows_i = sum_n alpha_n
/// mu_n R(mu_i, -mu_n) field_n. Used by the boundary rows and by the
/// reconstruction starting values.
Eigen::VectorXcd reflect_downward_field(const BaseReflector& base, const Quadrature& quad,
                                        const Eigen::VectorXcd& down_field);

/// Base BRDF row at an arbitrary outgoing cosine (table rows interpolated
/// between quadrature nodes; Lambertian rows are direction independent).
Eigen::Matrix4d base_row_at(const BaseReflector& base, const Quadrature& quad, double mu_out, double mu_in);

struct BoundaryDiagnostics {
    double condition_estimate = 0.0;
    double residual = 0.0;
};

struct OrderBoundarySolution {
    // per k in {1,2}: coefficients per layer
    std::array<std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXcd>>, 2> coefficients;
    BoundaryDiagnostics diagnostics;
};

/// Assemble the global block system for one order -- top condition (no
/// downward diffuse), 8N continuity rows per interface, base-reflection
/// bottom rows -- factor it once, and solve both basis indices k = 1, 2.
/// parts[k-1][p] is layer p's beam response for basis k. `beam` is the
/// incident beam actually being solved, which may differ from the
/// material's stored source.
OrderBoundarySolution assemble_and_solve_boundary(
    const MaterialSpec& spec, const BeamSource& beam, const Quadrature& quad, int m,
    const std::vector<const EigenModeSet*>& modes_per_layer,
    const std::array<std::vector<const ParticularVectors*>, 2>& parts, Diagnostics* diag = nullptr);

}  // namespace vrte::solver
