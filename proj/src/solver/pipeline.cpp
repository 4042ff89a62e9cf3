#include "solver/pipeline.hpp"

#include <cstring>
#include <fstream>

namespace vrte::solver {

namespace {

uint64_t double_bits(double x) {
    uint64_t b;
    std::memcpy(&b, &x, sizeof b);
    return b;
}

bool same_layer_medium(const LayerSpec& a, const LayerSpec& b) {
    if (a.omega != b.omega || a.coeffs.size() != b.coeffs.size())
        return false;
    for (size_t l = 0; l < a.coeffs.size(); ++l)
        if (a.coeffs[l] != b.coeffs[l])
            return false;
    return true;
}

}  // namespace

VrteSolver::VrteSolver(MaterialSpec spec, SolveOptions options, ExecutionContext& exec)
    : spec_(std::move(spec)), options_(std::move(options)), exec_(exec) {
    validate_material(spec_);
    if (options_.quadrature_n < 1)
        throw ValidationError("solver: quadrature size must be at least 1");
    quad_ = build_double_gauss_quadrature(options_.quadrature_n);
    order_count_ = spec_.order_count();
    if (options_.order_cap > 0)
        order_count_ = std::min(order_count_, options_.order_cap);

    // Deduplicate identical media so split layers share their solutions.
    signature_.resize(spec_.layers.size());
    for (size_t p = 0; p < spec_.layers.size(); ++p) {
        int sig = -1;
        for (size_t q = 0; q < p; ++q)
            if (same_layer_medium(spec_.layers[p], spec_.layers[q])) {
                sig = signature_[q];
                break;
            }
        if (sig < 0) {
            sig = static_cast<int>(representative_.size());
            representative_.push_back(static_cast<int>(p));
        }
        signature_[p] = sig;
    }
    states_.resize(representative_.size());
    for (auto& per_m : states_)
        per_m.resize(order_count_);
}

void VrteSolver::prepare_homogeneous() {
    if (homogeneous_ready_)
        return;
    ScopedStageTimer timer(timers_.homogeneous);

    struct Item {
        int sig, m;
    };
    std::vector<Item> items;
    for (size_t sig = 0; sig < states_.size(); ++sig)
        for (int m = 0; m < order_count_; ++m)
            items.push_back({static_cast<int>(sig), m});

    std::vector<std::string> failures(items.size());
    exec_.parallel_for(items.size(), [&](size_t idx) {
        const auto [sig, m] = items[idx];
        try {
            auto state = std::make_unique<OrderState>();
            const LayerSpec& layer = spec_.layers[representative_[sig]];
            state->kernel = phase::assemble_azimuth_kernel(m, layer, quad_);
            state->ops = build_reduced_operators(m, layer, quad_, state->kernel);
            state->modes = solve_homogeneous(state->ops, state->kernel);
            states_[sig][m] = std::move(state);
        } catch (const std::exception& e) {
            failures[idx] = e.what();
        }
    });
    for (const auto& f : failures)
        if (!f.empty())
            throw NumericalError(f);

    counters_.homogeneous_solves += items.size();
    homogeneous_ready_ = true;

    if (!options_.dump_kernel_path.empty())
        phase::dump_kernels_csv(options_.dump_kernel_path, spec_.layers.front(), quad_, order_count_);
}

IncidentSolution VrteSolver::solve_incident(const Incident& incident) {
    prepare_homogeneous();
    if (!(incident.mu0 > 0.0 && incident.mu0 <= 1.0))
        throw ValidationError("incident mu0 must lie in (0,1]");

    IncidentSolution sol;
    sol.incident = incident;
    sol.chains.resize(order_count_);

    const int layers = static_cast<int>(spec_.layers.size());
    BeamSource beam;
    beam.mu0 = incident.mu0;
    beam.phi0 = incident.phi0;
    beam.stokes = incident.stokes;

    std::vector<double> tau_top(layers, 0.0);
    for (int p = 1; p < layers; ++p)
        tau_top[p] = tau_top[p - 1] + spec_.layers[p - 1].tau;

    // Beam responses: one per (m, k, distinct layer), then shared over
    // duplicated layers.
    struct PartSlot {
        std::unique_ptr<ParticularVectors> part;
        std::string error;
    };
    const int sigs = static_cast<int>(representative_.size());
    std::vector<PartSlot> parts(static_cast<size_t>(order_count_) * 2 * sigs);
    {
        ScopedStageTimer timer(timers_.particular);
        exec_.parallel_for(parts.size(), [&](size_t idx) {
            const int m = static_cast<int>(idx / (2 * sigs));
            const int k = static_cast<int>((idx / sigs) % 2) + 1;
            const int sig = static_cast<int>(idx % sigs);
            try {
                const LayerSpec& layer = spec_.layers[representative_[sig]];
                const auto& state = *states_[sig][m];
                const auto src = build_beam_source(m, k, layer, beam, quad_);
                parts[idx].part = std::make_unique<ParticularVectors>(
                    solve_particular(state.ops, src, state.modes, state.kernel, &diagnostics_));
            } catch (const std::exception& e) {
                parts[idx].error = e.what();
            }
        });
        for (const auto& slot : parts)
            if (!slot.error.empty())
                throw NumericalError(slot.error);
        counters_.particular_solves += parts.size();
    }

    // Boundary systems: one factorization per order, both k solved together.
    {
        ScopedStageTimer timer(timers_.boundary);
        struct OrderResult {
            OrderBoundarySolution solution;
            std::string error;
        };
        std::vector<OrderResult> results(order_count_);
        exec_.parallel_for(static_cast<size_t>(order_count_), [&](size_t m) {
            try {
                std::vector<const EigenModeSet*> modes(layers);
                std::array<std::vector<const ParticularVectors*>, 2> pk;
                pk[0].resize(layers);
                pk[1].resize(layers);
                for (int p = 0; p < layers; ++p) {
                    const int sig = signature_[p];
                    modes[p] = &states_[sig][m]->modes;
                    pk[0][p] = parts[(m * 2 + 0) * sigs + sig].part.get();
                    pk[1][p] = parts[(m * 2 + 1) * sigs + sig].part.get();
                }
                results[m].solution = assemble_and_solve_boundary(spec_, beam, quad_,
                                                                  static_cast<int>(m), modes, pk,
                                                                  &diagnostics_);
            } catch (const std::exception& e) {
                results[m].error = e.what();
            }
        });
        for (const auto& r : results)
            if (!r.error.empty())
                throw NumericalError(r.error);
        counters_.boundary_solves += order_count_;

        for (int m = 0; m < order_count_; ++m) {
            boundary_log_.emplace_back(m, results[m].solution.diagnostics);
            for (int k = 0; k < 2; ++k) {
                LayerChain chain(layers);
                for (int p = 0; p < layers; ++p) {
                    auto& entry = chain[p];
                    entry.layer = &spec_.layers[p];
                    const int sig = signature_[p];
                    entry.modes = &states_[sig][m]->modes;
                    entry.part = parts[(m * 2 + k) * sigs + sig].part.get();
                    entry.coef_a = results[m].solution.coefficients[k][p].first;
                    entry.coef_b = results[m].solution.coefficients[k][p].second;
                    entry.tau_top = tau_top[p];
                    entry.thickness = spec_.layers[p].tau;
                    entry.beam_top = std::exp(-tau_top[p] / incident.mu0);
                }
                sol.chains[m][k] = std::move(chain);
            }
        }
    }
    for (auto& slot : parts)
        sol.owned_parts.push_back(std::move(slot.part));
    return sol;
}

VrteSolver::NodalComponents VrteSolver::nodal_components(const IncidentSolution& sol, double tau) const {
    NodalComponents comps;
    comps.up.resize(order_count_);
    comps.down.resize(order_count_);
    for (int m = 0; m < order_count_; ++m)
        for (int k = 0; k < 2; ++k)
            nodal_stacks(sol.chains[m][k], sol.incident.mu0, tau, comps.up[m][k], comps.down[m][k]);
    return comps;
}

StokesVector VrteSolver::nodal_value(const NodalComponents& comps, int node, bool upward,
                                     double dphi) const {
    std::vector<std::array<Eigen::Vector4cd, 2>> components(order_count_);
    for (int m = 0; m < order_count_; ++m)
        for (int k = 0; k < 2; ++k) {
            const auto& stack = upward ? comps.up[m][k] : comps.down[m][k];
            components[m][k] = stack.segment<4>(4 * node);
        }
    return azimuthal_assemble(components, dphi);
}

const phase::KernelRow* VrteSolver::cached_row(int signature, int m, double mu) {
    const auto key = std::make_tuple(signature, m, double_bits(mu));
    {
        std::lock_guard<std::mutex> lk(row_cache_mutex_);
        auto it = row_cache_.find(key);
        if (it != row_cache_.end())
            return it->second.get();
    }
    auto row = std::make_unique<phase::KernelRow>(
        phase::kernel_row(m, spec_.layers[representative_[signature]], quad_, mu));
    std::lock_guard<std::mutex> lk(row_cache_mutex_);
    auto [it, inserted] = row_cache_.emplace(key, std::move(row));
    return it->second.get();
}

VrteSolver::DirectionKernels VrteSolver::direction_kernels(int m, double mu_signed, double mu0) {
    DirectionKernels dk;
    const int layers = static_cast<int>(spec_.layers.size());
    dk.rows.resize(layers);
    dk.beam_blocks.resize(layers);
    for (int p = 0; p < layers; ++p) {
        dk.rows[p] = cached_row(signature_[p], m, mu_signed);
        // A^m(mu, -mu0): direct two-point evaluation.
        const LayerSpec& layer = spec_.layers[p];
        Eigen::Matrix4d block = Eigen::Matrix4d::Zero();
        if (m < layer.order_count()) {
            const auto g_out = phase::gsf_sequence(m, layer.order_count() - 1, mu_signed);
            const auto g_in = phase::gsf_sequence(m, layer.order_count() - 1, -mu0);
            for (int l = m; l < layer.order_count(); ++l)
                block += phase::gsf_matrix(g_out, l) * layer.coeffs[l] * phase::gsf_matrix(g_in, l);
        }
        dk.beam_blocks[p] = block;
    }
    return dk;
}

RadianceField VrteSolver::radiance_field(const IncidentSolution& sol, std::span<const double> taus,
                                         std::span<const double> mus_signed,
                                         std::span<const double> phis) {
    ScopedStageTimer timer(timers_.reconstruction);
    RadianceField field;
    field.taus.assign(taus.begin(), taus.end());
    field.mus.assign(mus_signed.begin(), mus_signed.end());
    field.phis.assign(phis.begin(), phis.end());
    field.order_count = order_count_;
    field.quadrature_n = quad_.n;
    field.values.assign(field.taus.size() * field.mus.size() * field.phis.size(), StokesVector{});

    // Kernel rows are built up front so the parallel phase only reads.
    for (size_t imu = 0; imu < field.mus.size(); ++imu)
        for (int m = 0; m < order_count_; ++m)
            direction_kernels(m, field.mus[imu], sol.incident.mu0);

    BeamSource beam;
    beam.mu0 = sol.incident.mu0;
    beam.phi0 = sol.incident.phi0;
    beam.stokes = sol.incident.stokes;

    std::vector<std::string> failures(field.mus.size());
    exec_.parallel_for(field.mus.size(), [&](size_t imu) {
        try {
            const double mu = field.mus[imu];
            std::vector<std::vector<std::array<Eigen::Vector4cd, 2>>> per_tau(
                field.taus.size(), std::vector<std::array<Eigen::Vector4cd, 2>>(order_count_));
            for (int m = 0; m < order_count_; ++m) {
                const auto dk = direction_kernels(m, mu, beam.mu0);
                for (int k = 0; k < 2; ++k) {
                    const auto values =
                        reconstruct_component(sol.chains[m][k], quad_, m, k + 1, beam, spec_.base, mu,
                                              taus, dk.rows, dk.beam_blocks);
                    for (size_t it = 0; it < field.taus.size(); ++it)
                        per_tau[it][m][k] = values[it];
                }
            }
            for (size_t it = 0; it < field.taus.size(); ++it)
                for (size_t ip = 0; ip < field.phis.size(); ++ip)
                    field.at(it, imu, ip) =
                        azimuthal_assemble(per_tau[it], field.phis[ip] - sol.incident.phi0);
        } catch (const std::exception& e) {
            failures[imu] = e.what();
        }
    });
    for (const auto& f : failures)
        if (!f.empty())
            throw NumericalError(f);
    counters_.reconstruction_items += field.mus.size() * field.taus.size();
    return field;
}

std::vector<std::vector<std::array<Eigen::Vector4cd, 2>>> VrteSolver::reconstruct_components(
    const IncidentSolution& sol, double mu_signed, std::span<const double> taus) {
    BeamSource beam;
    beam.mu0 = sol.incident.mu0;
    beam.phi0 = sol.incident.phi0;
    beam.stokes = sol.incident.stokes;

    std::vector<std::vector<std::array<Eigen::Vector4cd, 2>>> out(
        taus.size(), std::vector<std::array<Eigen::Vector4cd, 2>>(order_count_));
    for (int m = 0; m < order_count_; ++m) {
        const auto dk = direction_kernels(m, mu_signed, beam.mu0);
        for (int k = 0; k < 2; ++k) {
            const auto values = reconstruct_component(sol.chains[m][k], quad_, m, k + 1, beam,
                                                      spec_.base, mu_signed, taus, dk.rows,
                                                      dk.beam_blocks);
            for (size_t it = 0; it < taus.size(); ++it)
                out[it][m][k] = values[it];
        }
    }
    return out;
}

void VrteSolver::write_dumps() {
    if (!options_.dump_eigen_path.empty() && homogeneous_ready_) {
        std::ofstream out(options_.dump_eigen_path);
        out << "m,lambda_re,lambda_im,nu_re,nu_im,residual\n";
        char buf[160];
        for (size_t sig = 0; sig < states_.size(); ++sig)
            for (int m = 0; m < order_count_; ++m)
                for (const auto& mode : states_[sig][m]->modes.modes) {
                    const auto lambda = 1.0 / (mode.nu * mode.nu);
                    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.3g\n", m,
                                  lambda.real(), lambda.imag(), mode.nu.real(), mode.nu.imag(),
                                  mode.residual);
                    out << buf;
                }
    }
    if (!options_.dump_boundary_path.empty()) {
        std::ofstream out(options_.dump_boundary_path);
        out << "m,condition_estimate,residual\n";
        char buf[96];
        for (const auto& [m, diag] : boundary_log_) {
            std::snprintf(buf, sizeof buf, "%d,%.6g,%.3g\n", m, diag.condition_estimate, diag.residual);
            out << buf;
        }
    }
}

std::vector<double> default_zenith_grid(int zenith) {
    std::vector<double> mus(zenith);
    if (zenith == 1) {
        mus[0] = 1.0;
        return mus;
    }
    for (int i = 0; i < zenith; ++i)
        mus[i] = clamp_mu(static_cast<double>(i) / (zenith - 1));
    return mus;
}

std::vector<double> signed_zenith_grid(int zenith) {
    const auto up = default_zenith_grid(zenith);
    std::vector<double> mus;
    mus.reserve(2 * up.size());
    for (double mu : up)
        mus.push_back(mu);
    for (double mu : up)
        mus.push_back(-mu);
    return mus;
}

std::vector<double> default_azimuth_grid(int azimuth, double phi0) {
    std::vector<double> phis(azimuth);
    if (azimuth == 1) {
        phis[0] = reduce_azimuth(phi0);
        return phis;
    }
    for (int j = 0; j < azimuth; ++j)
        phis[j] = reduce_azimuth(phi0 + kPi * j / (azimuth - 1));
    return phis;
}

}  // namespace vrte::solver
