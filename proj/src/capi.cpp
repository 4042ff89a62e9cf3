#include "vrte/vrte.h"

#include "brdf/brdf.hpp"
#include "io/csv.hpp"
#include "mc/mc.hpp"
#include "solver/pipeline.hpp"

#include <cstring>

using namespace vrte;

namespace {

thread_local std::string g_last_error;

vrte_status set_error(vrte_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

template <typename Fn>
vrte_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const ValidationError& e) {
        return set_error(VRTE_E_VALIDATION, e.what());
    } catch (const NumericalError& e) {
        return set_error(VRTE_E_NUMERICAL, e.what());
    } catch (const std::exception& e) {
        return set_error(VRTE_E_NUMERICAL, e.what());
    }
}

solver::SolveOptions to_solver_options(const vrte_options* options) {
    solver::SolveOptions out;
    if (!options)
        return out;
    out.quadrature_n = options->quadrature_n;
    out.order_cap = options->order_cap;
    out.out_zenith = options->out_zenith;
    out.out_azimuth = options->out_azimuth;
    if (options->dump_eigen_path)
        out.dump_eigen_path = options->dump_eigen_path;
    if (options->dump_boundary_path)
        out.dump_boundary_path = options->dump_boundary_path;
    if (options->dump_kernel_path)
        out.dump_kernel_path = options->dump_kernel_path;
    return out;
}

void fill_timings(const StepTimers& timers, const WorkCounters& counters, vrte_timings* out) {
    out->homogeneous = timers.homogeneous;
    out->particular = timers.particular;
    out->boundary = timers.boundary;
    out->reconstruction = timers.reconstruction;
    out->total_wall = timers.total_wall;
    out->homogeneous_solves = counters.homogeneous_solves;
    out->particular_solves = counters.particular_solves;
    out->boundary_solves = counters.boundary_solves;
    out->reconstruction_items = counters.reconstruction_items;
}

}  // namespace

struct vrte_material {
    MaterialSpec spec;
};

struct vrte_field {
    solver::RadianceField field;
    StepTimers timers;
    WorkCounters counters;
    std::array<double, 4> reflectance{0, 0, 0, 0};
};

struct vrte_brdf {
    brdf::BrdfTable table;
    Quadrature quadrature;
    StepTimers timers;
    WorkCounters counters;
};

struct vrte_mc_tally {
    mc::TallyGrid grid;
    double tau_bottom = 0.0;
};

extern "C" {

const char* vrte_last_error(void) { return g_last_error.c_str(); }

const char* vrte_version(void) { return "1.0.0"; }

vrte_status vrte_material_load(const char* path, vrte_material** out) {
    if (!path || !out)
        return set_error(VRTE_E_ARGUMENT, "null argument");
    return guarded([&] {
        auto handle = std::make_unique<vrte_material>();
        handle->spec = load_material_file(path);
        *out = handle.release();
        return VRTE_OK;
    });
}

vrte_status vrte_material_parse(const char* json_text, const char* base_dir, vrte_material** out) {
    if (!json_text || !out)
        return set_error(VRTE_E_ARGUMENT, "null argument");
    return guarded([&] {
        auto handle = std::make_unique<vrte_material>();
        handle->spec = parse_material_json(json_text, base_dir ? base_dir : "");
        *out = handle.release();
        return VRTE_OK;
    });
}

void vrte_material_free(vrte_material* material) { delete material; }

vrte_status vrte_material_info(const vrte_material* material, int32_t* order_count,
                               int32_t* layer_count) {
    if (!material)
        return set_error(VRTE_E_ARGUMENT, "null material");
    if (order_count)
        *order_count = material->spec.order_count();
    if (layer_count)
        *layer_count = static_cast<int32_t>(material->spec.layers.size());
    return VRTE_OK;
}

void vrte_options_init(vrte_options* options) {
    if (!options)
        return;
    std::memset(options, 0, sizeof *options);
    options->quadrature_n = 40;
    options->out_zenith = 11;
    options->out_azimuth = 19;
}

vrte_status vrte_solve_radiance(const vrte_material* material, const vrte_options* options,
                                const double* tau_levels, size_t n_tau, vrte_field** out) {
    if (!material || !out || (n_tau > 0 && !tau_levels))
        return set_error(VRTE_E_ARGUMENT, "null argument");
    return guarded([&] {
        const StopWatch wall;
        auto handle = std::make_unique<vrte_field>();
        ExecutionContext exec(options ? options->threads : 0);
        solver::VrteSolver solver(material->spec, to_solver_options(options), exec);

        solver::Incident incident;
        incident.mu0 = material->spec.source.mu0;
        incident.phi0 = material->spec.source.phi0;
        incident.stokes = material->spec.source.stokes;
        if (options && options->incident_override) {
            incident.mu0 = options->incident_mu0;
            incident.phi0 = options->incident_phi0;
        }

        solver.prepare_homogeneous();
        const auto sol = solver.solve_incident(incident);

        std::vector<double> taus(tau_levels, tau_levels + n_tau);
        if (taus.empty())
            taus.push_back(0.0);
        const auto mus = solver::signed_zenith_grid(options ? options->out_zenith : 11);
        const auto phis =
            solver::default_azimuth_grid(options ? options->out_azimuth : 19, incident.phi0);
        handle->field = solver.radiance_field(sol, taus, mus, phis);
        handle->reflectance = brdf::directional_hemispherical_reflectance(solver, sol);
        solver.write_dumps();

        handle->timers = solver.timers();
        handle->timers.total_wall = wall.seconds();
        handle->counters = solver.counters();
        *out = handle.release();
        return VRTE_OK;
    });
}

vrte_status vrte_field_size(const vrte_field* field, size_t* n_tau, size_t* n_mu, size_t* n_phi) {
    if (!field)
        return set_error(VRTE_E_ARGUMENT, "null field");
    if (n_tau)
        *n_tau = field->field.taus.size();
    if (n_mu)
        *n_mu = field->field.mus.size();
    if (n_phi)
        *n_phi = field->field.phis.size();
    return VRTE_OK;
}

vrte_status vrte_field_row(const vrte_field* field, size_t tau_index, size_t mu_index,
                           size_t phi_index, double row[7]) {
    if (!field || !row)
        return set_error(VRTE_E_ARGUMENT, "null argument");
    const auto& f = field->field;
    if (tau_index >= f.taus.size() || mu_index >= f.mus.size() || phi_index >= f.phis.size())
        return set_error(VRTE_E_ARGUMENT, "field index out of range");
    const auto& s = f.at(tau_index, mu_index, phi_index);
    row[0] = f.taus[tau_index];
    row[1] = f.mus[mu_index];
    row[2] = f.phis[phi_index];
    row[3] = s.i;
    row[4] = s.q;
    row[5] = s.u;
    row[6] = s.v;
    return VRTE_OK;
}

vrte_status vrte_field_write_csv(const vrte_field* field, const char* path) {
    if (!field || !path)
        return set_error(VRTE_E_ARGUMENT, "null argument");
    return guarded([&] {
        io::write_radiance_csv(path, field->field);
        return VRTE_OK;
    });
}

vrte_status vrte_field_timings(const vrte_field* field, vrte_timings* out) {
    if (!field || !out)
        return set_error(VRTE_E_ARGUMENT, "null argument");
    fill_timings(field->timers, field->counters, out);
    return VRTE_OK;
}

vrte_status vrte_field_reflectance(const vrte_field* field, double out[4]) {
    if (!field || !out)
        return set_error(VRTE_E_ARGUMENT, "null argument");
    for (int c = 0; c < 4; ++c)
        out[c] = field->reflectance[c];
    return VRTE_OK;
}

void vrte_field_free(vrte_field* field) { delete field; }

vrte_status vrte_compute_brdf(const vrte_material* material, const vrte_options* options,
                              const double* mu_in, size_t n_mu_in, int32_t n_dphi,
                              const double* basis, vrte_brdf** out) {
    if (!material || !out || !mu_in || n_mu_in == 0)
        return set_error(VRTE_E_ARGUMENT, "null argument");
    return guarded([&] {
        const StopWatch wall;
        auto handle = std::make_unique<vrte_brdf>();
        ExecutionContext exec(options ? options->threads : 0);
        solver::VrteSolver solver(material->spec, to_solver_options(options), exec);

        std::vector<StokesVector> basis_vectors = brdf::default_incident_basis();
        if (basis)
            for (int b = 0; b < 4; ++b)
                basis_vectors[b] = {basis[4 * b + 0], basis[4 * b + 1], basis[4 * b + 2],
                                    basis[4 * b + 3]};

        handle->table = brdf::compute_brdf(solver, std::span<const double>(mu_in, n_mu_in),
                                           n_dphi > 0 ? n_dphi : 19, basis_vectors);
        handle->quadrature = solver.quadrature();
        solver.write_dumps();
        handle->timers = solver.timers();
        handle->timers.total_wall = wall.seconds();
        handle->counters = solver.counters();
        *out = handle.release();
        return VRTE_OK;
    });
}

vrte_status vrte_brdf_size(const vrte_brdf* brdf, size_t* n_in, size_t* n_out, size_t* n_dphi) {
    if (!brdf)
        return set_error(VRTE_E_ARGUMENT, "null brdf");
    if (n_in)
        *n_in = brdf->table.mu_in.size();
    if (n_out)
        *n_out = brdf->table.mu_out.size();
    if (n_dphi)
        *n_dphi = brdf->table.dphi.size();
    return VRTE_OK;
}

vrte_status vrte_brdf_entry(const vrte_brdf* brdf, size_t in_index, size_t out_index,
                            size_t dphi_index, double entry[16]) {
    if (!brdf || !entry)
        return set_error(VRTE_E_ARGUMENT, "null argument");
    const auto& t = brdf->table;
    if (in_index >= t.mu_in.size() || out_index >= t.mu_out.size() || dphi_index >= t.dphi.size())
        return set_error(VRTE_E_ARGUMENT, "brdf index out of range");
    const auto& m = t.at(in_index, out_index, dphi_index).m;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            entry[4 * r + c] = m(r, c);
    return VRTE_OK;
}

vrte_status vrte_brdf_write_csv(const vrte_brdf* brdf, const char* path) {
    if (!brdf || !path)
        return set_error(VRTE_E_ARGUMENT, "null argument");
    return guarded([&] {
        io::write_brdf_csv(path, brdf->table);
        return VRTE_OK;
    });
}

vrte_status vrte_brdf_write_binary(const vrte_brdf* brdf, const char* path) {
    if (!brdf || !path)
        return set_error(VRTE_E_ARGUMENT, "null argument");
    return guarded([&] {
        io::write_brdf_binary(path, brdf->table);
        return VRTE_OK;
    });
}

vrte_status vrte_brdf_reflectance(const vrte_brdf* brdf, size_t in_index, double out[4]) {
    if (!brdf || !out)
        return set_error(VRTE_E_ARGUMENT, "null argument");
    if (in_index >= brdf->table.mu_in.size())
        return set_error(VRTE_E_ARGUMENT, "brdf index out of range");
    const auto r =
        brdf::directional_hemispherical_reflectance(brdf->table, brdf->quadrature, in_index);
    for (int c = 0; c < 4; ++c)
        out[c] = r[c];
    return VRTE_OK;
}

vrte_status vrte_brdf_timings(const vrte_brdf* brdf, vrte_timings* out) {
    if (!brdf || !out)
        return set_error(VRTE_E_ARGUMENT, "null argument");
    fill_timings(brdf->timers, brdf->counters, out);
    return VRTE_OK;
}

void vrte_brdf_free(vrte_brdf* brdf) { delete brdf; }

vrte_status vrte_mc_trace(const vrte_material* material, const vrte_options* options,
                          uint64_t photons, uint64_t seed, int32_t zenith_bins,
                          int32_t azimuth_bins, vrte_mc_tally** out) {
    if (!material || !out)
        return set_error(VRTE_E_ARGUMENT, "null argument");
    return guarded([&] {
        auto handle = std::make_unique<vrte_mc_tally>();
        ExecutionContext exec(options ? options->threads : 0);
        MaterialSpec spec = material->spec;
        if (options && options->incident_override) {
            spec.source.mu0 = options->incident_mu0;
            spec.source.phi0 = options->incident_phi0;
        }
        handle->grid = mc::mc_trace(spec, photons, seed, zenith_bins, azimuth_bins, exec);
        handle->tau_bottom = spec.total_tau();
        *out = handle.release();
        return VRTE_OK;
    });
}

vrte_status vrte_mc_tally_row(const vrte_mc_tally* tally, int32_t hemisphere, int32_t zenith_bin,
                              int32_t azimuth_bin, double row[10]) {
    if (!tally || !row)
        return set_error(VRTE_E_ARGUMENT, "null argument");
    const auto& g = tally->grid;
    if (hemisphere < 0 || hemisphere > 1 || zenith_bin < 0 || zenith_bin >= g.zenith_bins ||
        azimuth_bin < 0 || azimuth_bin >= g.azimuth_bins)
        return set_error(VRTE_E_ARGUMENT, "tally index out of range");
    const auto s = g.radiance(hemisphere, zenith_bin, azimuth_bin);
    const auto se = g.std_error(hemisphere, zenith_bin, azimuth_bin);
    row[0] = g.bin_mu_center(zenith_bin);
    row[1] = g.bin_phi_center(azimuth_bin);
    for (int c = 0; c < 4; ++c) {
        row[2 + c] = s[c];
        row[6 + c] = se[c];
    }
    return VRTE_OK;
}

vrte_status vrte_mc_tally_write_csv(const vrte_mc_tally* tally, const char* path) {
    if (!tally || !path)
        return set_error(VRTE_E_ARGUMENT, "null argument");
    return guarded([&] {
        io::write_mc_csv(path, tally->grid, tally->tau_bottom);
        return VRTE_OK;
    });
}

void vrte_mc_tally_free(vrte_mc_tally* tally) { delete tally; }

}  // extern "C"
