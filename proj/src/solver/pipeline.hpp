#pragma once

#include "core/execution.hpp"
#include "solver/reconstruction.hpp"

#include <map>
#include <memory>

namespace vrte::solver {

struct SolveOptions {
    int quadrature_n = 40;
    int order_cap = 0;  // 0: use the material's expansion order
    int out_zenith = 11;
    int out_azimuth = 19;
    std::vector<double> tau_levels = {0.0};
    std::string dump_eigen_path;
    std::string dump_boundary_path;
    std::string dump_kernel_path;
};

/// Homogeneous state of one (distinct layer, order) pair; shared by every
/// incident direction and basis vector.
struct OrderState {
    phase::AzimuthKernel kernel;
    ReducedOperators ops;
    EigenModeSet modes;
};

struct Incident {
    double mu0 = 1.0;
    double phi0 = 0.0;
    StokesVector stokes = StokesVector::unpolarized(1.0);
};

/// Per-incident solved state: beam responses and combination coefficients
/// for every (order, basis) pair, arranged as evaluable layer chains.
struct IncidentSolution {
    Incident incident;
    std::vector<std::array<LayerChain, 2>> chains;  // [m][k-1]
    std::vector<std::unique_ptr<ParticularVectors>> owned_parts;
};

/// Orchestrates the solution stages over Fourier orders, incident directions
/// and output directions. Distinct layers are deduplicated so identical
/// sublayers share kernels, operators and eigen solutions. The homogeneous
/// stage runs exactly once regardless of how many incidents are solved.
class VrteSolver {
  public:
    VrteSolver(MaterialSpec spec, SolveOptions options, ExecutionContext& exec);

    const MaterialSpec& material() const { return spec_; }
    const Quadrature& quadrature() const { return quad_; }
    int order_count() const { return order_count_; }

    /// Kernels, reduced operators and eigen solutions for every
    /// (distinct layer, order). Idempotent.
    void prepare_homogeneous();

    /// Beam response and boundary coefficients for one incident beam.
    IncidentSolution solve_incident(const Incident& incident);

    /// Per-(m,k) nodal component stacks at one depth.
    struct NodalComponents {
        std::vector<std::array<Eigen::VectorXcd, 2>> up, down;  // [m][k-1]
    };
    NodalComponents nodal_components(const IncidentSolution& sol, double tau) const;

    /// Assembled Stokes vector at a quadrature node from nodal components.
    StokesVector nodal_value(const NodalComponents& comps, int node, bool upward, double dphi) const;

    /// Source-function-integrated field on an output grid. Directions and
    /// azimuths are processed in parallel with deterministic slot writes.
    RadianceField radiance_field(const IncidentSolution& sol, std::span<const double> taus,
                                 std::span<const double> mus_signed, std::span<const double> phis);

    /// Reconstructed per-(m,k) components for one signed direction at the
    /// given depths (exposed for node-consistency checks).
    std::vector<std::vector<std::array<Eigen::Vector4cd, 2>>> reconstruct_components(
        const IncidentSolution& sol, double mu_signed, std::span<const double> taus);

    const OrderState& order_state(int layer_index, int m) const {
        return *states_[signature_[layer_index]][m];
    }

    StepTimers& timers() { return timers_; }
    WorkCounters& counters() { return counters_; }
    Diagnostics& diagnostics() { return diagnostics_; }
    ExecutionContext& execution() { return exec_; }

    /// Write the per-order eigen dump (m, lambda, nu, residual) if requested.
    void write_dumps();

  private:
    struct DirectionKernels {
        std::vector<const phase::KernelRow*> rows;     // per layer
        std::vector<Eigen::Matrix4d> beam_blocks;      // per layer, A^m(mu, -mu0)
    };
    DirectionKernels direction_kernels(int m, double mu_signed, double mu0);
    const phase::KernelRow* cached_row(int signature, int m, double mu);

    MaterialSpec spec_;
    SolveOptions options_;
    ExecutionContext& exec_;
    Quadrature quad_;
    int order_count_ = 0;
    std::vector<int> signature_;           // layer index -> distinct-layer id
    std::vector<int> representative_;      // distinct-layer id -> layer index
    std::vector<std::vector<std::unique_ptr<OrderState>>> states_;  // [signature][m]
    bool homogeneous_ready_ = false;

    std::mutex row_cache_mutex_;
    std::map<std::tuple<int, int, uint64_t>, std::unique_ptr<phase::KernelRow>> row_cache_;

    StepTimers timers_;
    WorkCounters counters_;
    Diagnostics diagnostics_;
    std::vector<std::pair<int, BoundaryDiagnostics>> boundary_log_;
};

/// Uniform output grids: `zenith` clamped cosines per hemisphere and
/// `azimuth` angles relative to phi0 covering a half turn.
std::vector<double> default_zenith_grid(int zenith);
std::vector<double> signed_zenith_grid(int zenith);
std::vector<double> default_azimuth_grid(int azimuth, double phi0);

}  // namespace vrte::solver
