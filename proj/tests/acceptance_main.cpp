// Acceptance suite: one check per stated criterion, each printing a single
// PASS/FAIL line. Run with a criterion number (1..10) or no argument for all.

#include <vrte/vrte.h>

#include "brdf/brdf.hpp"
#include "io/csv.hpp"
#include "mc/mc.hpp"
#include "solver/pipeline.hpp"

#include "support/materials.hpp"
#include "support/unreduced.hpp"

#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#ifndef VRTE_TEST_DATA_DIR
#define VRTE_TEST_DATA_DIR "data"
#endif

using namespace vrte;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

solver::IncidentSolution solve_source(solver::VrteSolver& vs) {
    return vs.solve_incident({vs.material().source.mu0, vs.material().source.phi0,
                              vs.material().source.stokes});
}

double max_mode_residual(solver::VrteSolver& vs) {
    double worst = 0.0;
    for (size_t p = 0; p < vs.material().layers.size(); ++p)
        for (int m = 0; m < vs.order_count(); ++m)
            worst = std::max(worst, vs.order_state(static_cast<int>(p), m).modes.max_residual);
    return worst;
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------- criterion 1
Outcome criterion_vacuum_exactness() {
    const StopWatch watch;
    LayerSpec layer = testmat::isotropic_layer(0.0, 1.0);
    layer.coeffs.resize(4, Eigen::Matrix4d::Zero());
    auto spec = testmat::single_layer_material(layer, 0.6);

    ExecutionContext exec(0);
    solver::VrteSolver vs(spec, {.quadrature_n = 8}, exec);
    const auto sol = solve_source(vs);
    const auto mus = solver::signed_zenith_grid(11);
    const auto phis = solver::default_azimuth_grid(19, 0.0);
    const std::vector<double> taus = {0.0, 0.5, 1.0};
    const auto field = vs.radiance_field(sol, taus, mus, phis);

    double worst = 0.0;
    for (const auto& s : field.values)
        for (int c = 0; c < 4; ++c)
            worst = std::max(worst, std::abs(s[c]));

    solver::VrteSolver vb(spec, {.quadrature_n = 8}, exec);
    const std::vector<double> mu_in = {0.6, 1.0};
    const auto table = brdf::compute_brdf(vb, mu_in, 19);
    for (const auto& e : table.entries)
        worst = std::max(worst, e.m.cwiseAbs().maxCoeff());

    const double elapsed = watch.seconds();
    Outcome out;
    out.pass = worst < 1e-12 && elapsed < 1.0;
    out.detail = fmt("max |entry| = %.2e (< 1e-12), runtime %.2f s (< 1 s)", worst, elapsed);
    return out;
}

// ---------------------------------------------------------------- criterion 2
Outcome criterion_single_scattering() {
    const StopWatch watch;
    const double tau0 = 0.01, mu0 = 0.6;
    LayerSpec layer = testmat::rayleigh_layer(0.2, tau0);
    auto spec = testmat::single_layer_material(layer, mu0);

    ExecutionContext exec(0);
    solver::VrteSolver vs(spec, {.quadrature_n = 16}, exec);
    const auto sol = solve_source(vs);

    std::vector<double> mus;
    for (int i = 1; i <= 10; ++i)
        mus.push_back(0.1 * i);
    const auto phis = solver::default_azimuth_grid(19, 0.0);
    const std::vector<double> taus = {0.0};
    const auto field = vs.radiance_field(sol, taus, mus, phis);

    double worst_i = 0.0, worst_q = 0.0;
    for (size_t imu = 0; imu < mus.size(); ++imu)
        for (size_t ip = 0; ip < phis.size(); ++ip) {
            const Direction out_dir(mus[imu], phis[ip]);
            const Direction in_dir(-mu0, 0.0);
            const Eigen::Matrix4d p = phase::evaluate_phase_matrix(in_dir, out_dir, layer).m;
            const double path =
                (1.0 - std::exp(-tau0 * (1.0 / mus[imu] + 1.0 / mu0))) * mu0 / (mus[imu] + mu0);
            const Eigen::Vector4d expect =
                (layer.omega / (4.0 * kPi)) * path * (p * spec.source.stokes.to_eigen());
            const auto& got = field.at(0, imu, ip);
            const double scale = std::abs(expect[0]);
            worst_i = std::max(worst_i, std::abs(got.i - expect[0]) / scale);
            worst_q = std::max(worst_q, std::abs(got.q - expect[1]) / scale);
        }

    const double elapsed = watch.seconds();
    Outcome out;
    out.pass = worst_i < 0.01 && worst_q < 0.02 && elapsed < 10.0;
    out.detail = fmt("I err %.3f%% (< 1%%), Q err %.3f%% (< 2%%), runtime %.2f s (< 10 s)",
                     100 * worst_i, 100 * worst_q, elapsed);
    return out;
}

// ---------------------------------------------------------------- criterion 3
Outcome criterion_flux_conservation() {
    const StopWatch watch;
    auto coeffs = load_coefficient_file(std::string(VRTE_TEST_DATA_DIR) + "/forward12.coef");
    Outcome out;
    std::string details;
    for (double tau0 : {1.0, 10.0, 100.0}) {
        LayerSpec layer;
        layer.omega = 1.0;
        layer.tau = tau0;
        layer.coeffs = coeffs;
        auto spec = testmat::single_layer_material(layer, 0.6, LambertianBase{1.0});
        ExecutionContext exec(0);
        solver::VrteSolver vs(spec, {.quadrature_n = 24}, exec);
        const auto sol = solve_source(vs);
        const auto r = brdf::directional_hemispherical_reflectance(vs, sol);
        if (std::abs(r[0] - 1.0) > 1e-3)
            out.pass = false;
        details += fmt("R(tau0=%g) = %.6f  ", tau0, r[0]);
    }
    const double elapsed = watch.seconds();
    if (elapsed >= 60.0)
        out.pass = false;
    out.detail = details + fmt("(1 +- 1e-3), runtime %.1f s (< 60 s)", elapsed);
    return out;
}

// ---------------------------------------------------------------- criterion 4
Outcome criterion_reduced_unreduced() {
    Outcome out;
    double worst_part = 0.0, worst_bound = 0.0;
    for (int n : {2, 4, 8}) {
        for (const auto& layer :
             {testmat::isotropic_layer(0.5, 1.0), testmat::rayleigh_layer(0.9, 1.5)}) {
            auto spec = testmat::single_layer_material(layer, 0.6, LambertianBase{0.3});
            ExecutionContext exec(1);
            solver::VrteSolver vs(spec, {.quadrature_n = n}, exec);
            vs.prepare_homogeneous();
            const auto quad = vs.quadrature();
            BeamSource beam = spec.source;
            const auto sol = solve_source(vs);
            for (int m = 0; m < vs.order_count(); ++m) {
                const auto& state = vs.order_state(0, m);
                for (int k = 1; k <= 2; ++k) {
                    const auto src = solver::build_beam_source(m, k, layer, beam, quad);
                    const auto part =
                        solver::solve_particular(state.ops, src, state.modes, state.kernel);
                    const auto [zp, zm] = unreduced::particular(layer, quad, state.kernel, src, 0.6);
                    const double scale =
                        std::max({zp.cwiseAbs().maxCoeff(), zm.cwiseAbs().maxCoeff(), 1e-30});
                    worst_part = std::max(worst_part,
                                          (part.z_plus - zp).cwiseAbs().maxCoeff() / scale);
                    worst_part = std::max(worst_part,
                                          (part.z_minus - zm).cwiseAbs().maxCoeff() / scale);

                    const auto c = unreduced::boundary_coefficients(spec, beam, quad, m,
                                                                    state.modes, part, k);
                    const auto& entry = sol.chains[m][k - 1][0];
                    const int dim = 4 * n;
                    const double cscale = std::max(c.cwiseAbs().maxCoeff(), 1e-30);
                    worst_bound = std::max(
                        worst_bound, (entry.coef_a - c.head(dim)).cwiseAbs().maxCoeff() / cscale);
                    worst_bound = std::max(
                        worst_bound, (entry.coef_b - c.tail(dim)).cwiseAbs().maxCoeff() / cscale);
                }
            }
        }
    }
    out.pass = worst_part < 1e-10 && worst_bound < 1e-9;
    out.detail = fmt("beam-response diff %.2e (< 1e-10), coefficient diff %.2e (< 1e-9)",
                     worst_part, worst_bound);
    return out;
}

// ---------------------------------------------------------------- criterion 5
double node_consistency_worst(solver::VrteSolver& vs, const solver::IncidentSolution& sol,
                              std::span<const double> taus) {
    const auto& quad = vs.quadrature();
    double worst = 0.0;
    std::vector<solver::VrteSolver::NodalComponents> nodal;
    for (double tau : taus)
        nodal.push_back(vs.nodal_components(sol, tau));
    for (int i = 0; i < quad.n; ++i)
        for (const double sign : {1.0, -1.0}) {
            const auto recon = vs.reconstruct_components(sol, sign * quad.nodes[i], taus);
            for (size_t it = 0; it < taus.size(); ++it)
                for (int m = 0; m < vs.order_count(); ++m)
                    for (int k = 0; k < 2; ++k) {
                        const auto& stack = sign > 0 ? nodal[it].up[m][k] : nodal[it].down[m][k];
                        const double scale =
                            std::max({nodal[it].up[m][k].cwiseAbs().maxCoeff(),
                                      nodal[it].down[m][k].cwiseAbs().maxCoeff(), 1e-12});
                        worst = std::max(worst, (recon[it][m][k] - stack.segment<4>(4 * i))
                                                        .cwiseAbs()
                                                        .maxCoeff() /
                                                    scale);
                    }
        }
    return worst;
}

MaterialSpec random_material(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> layer_count(1, 3);
    std::uniform_int_distribution<int> orders(2, 5);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    MaterialSpec spec;
    const int layers = layer_count(rng);
    const int order_count = orders(rng);
    for (int p = 0; p < layers; ++p)
        spec.layers.push_back(testmat::random_layer(rng, order_count));
    const double base_pick = uni(rng);
    if (base_pick < 0.4)
        spec.base = BlackBase{};
    else
        spec.base = LambertianBase{uni(rng)};
    spec.source.mu0 = 0.2 + 0.8 * uni(rng);
    spec.source.stokes = {1.0, 0.4 * (uni(rng) - 0.5), 0.4 * (uni(rng) - 0.5),
                          0.4 * (uni(rng) - 0.5)};
    validate_material(spec);
    return spec;
}

Outcome criterion_node_consistency() {
    Outcome out;
    std::mt19937_64 rng(20240914);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        auto spec = random_material(rng);
        ExecutionContext exec(0);
        solver::VrteSolver vs(spec, {.quadrature_n = 8}, exec);
        const auto sol = solve_source(vs);
        const double total = spec.total_tau();
        const std::vector<double> taus = {0.0, 0.31 * total, total};
        worst = std::max(worst, node_consistency_worst(vs, sol, taus));
    }
    out.pass = worst < 1e-8;
    out.detail = fmt("worst node-consistency error %.2e (< 1e-8) over 5 random materials", worst);
    return out;
}

// ---------------------------------------------------------------- criterion 6
Outcome criterion_layer_splitting() {
    Outcome out;
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 4; ++trial) {
        LayerSpec layer = testmat::random_layer(rng, 3);
        layer.tau = 0.2 + 4.8 * uni(rng);  // tau <= 5
        auto whole = testmat::single_layer_material(layer, 0.6, LambertianBase{0.3});

        const int pieces = 2 + trial % 3;  // up to 4 sublayers
        MaterialSpec split = whole;
        split.layers.clear();
        for (int p = 0; p < pieces; ++p) {
            LayerSpec part = layer;
            part.tau = layer.tau / pieces;
            split.layers.push_back(part);
        }
        validate_material(split);

        ExecutionContext exec(0);
        solver::VrteSolver vw(whole, {.quadrature_n = 8}, exec);
        solver::VrteSolver vsp(split, {.quadrature_n = 8}, exec);
        const auto sw = solve_source(vw);
        const auto ss = solve_source(vsp);
        const auto cw = vw.nodal_components(sw, 0.0);
        const auto cs = vsp.nodal_components(ss, 0.0);
        const auto cwb = vw.nodal_components(sw, layer.tau);
        const auto csb = vsp.nodal_components(ss, layer.tau);
        for (int m = 0; m < vw.order_count(); ++m)
            for (int k = 0; k < 2; ++k) {
                const double scale = std::max({cw.up[m][k].cwiseAbs().maxCoeff(),
                                               cwb.down[m][k].cwiseAbs().maxCoeff(), 1e-12});
                worst = std::max(worst,
                                 (cw.up[m][k] - cs.up[m][k]).cwiseAbs().maxCoeff() / scale);
                worst = std::max(worst,
                                 (cwb.down[m][k] - csb.down[m][k]).cwiseAbs().maxCoeff() / scale);
            }
    }
    out.pass = worst < 1e-8;
    out.detail = fmt("worst exiting-field change %.2e (< 1e-8) for up to 4 sublayers", worst);
    return out;
}

// ---------------------------------------------------------------- criterion 7
Outcome criterion_monte_carlo() {
    const StopWatch watch;
    Outcome out;
    const uint64_t photons = 10000000;
    const int zb = 8, ab = 8;
    ExecutionContext exec(0);

    uint64_t bins_total = 0, bins_passed = 0;
    double worst_fraction = 1.0;
    std::string worst_name;

    int config_index = 0;
    for (const bool rayleigh : {false, true})
        for (const double omega : {0.5, 0.9})
            for (const double tau0 : {1.0, 10.0})
                for (const double mu0 : {0.6, 1.0}) {
                    ++config_index;
                    const LayerSpec layer = rayleigh ? testmat::rayleigh_layer(omega, tau0)
                                                     : testmat::isotropic_layer(omega, tau0);
                    auto spec = testmat::single_layer_material(layer, mu0);
                    const auto grid =
                        mc::mc_trace(spec, photons, 1000 + config_index, zb, ab, exec);

                    solver::VrteSolver vs(spec, {.quadrature_n = 16}, exec);
                    const auto sol = solve_source(vs);

                    // flux-weighted bin averages from one batched field per
                    // hemisphere (2 Gauss points per bin axis)
                    const double g0 = 0.5 - 0.5 / std::sqrt(3.0), g1 = 0.5 + 0.5 / std::sqrt(3.0);
                    uint64_t cfg_total = 0, cfg_passed = 0;
                    for (int hemi = 0; hemi < 2; ++hemi) {
                        const double tau = hemi == 0 ? 0.0 : tau0;
                        std::vector<double> mus, phis;
                        for (int iz = 0; iz < zb; ++iz)
                            for (double g : {g0, g1}) {
                                const double mu =
                                    grid.bin_mu_edge(iz) +
                                    g * (grid.bin_mu_edge(iz + 1) - grid.bin_mu_edge(iz));
                                mus.push_back(hemi == 0 ? mu : -mu);
                            }
                        for (int ia = 0; ia < ab; ++ia)
                            for (double g : {g0, g1})
                                phis.push_back(grid.bin_phi_edge(ia) +
                                               g * (grid.bin_phi_edge(ia + 1) -
                                                    grid.bin_phi_edge(ia)));
                        const std::vector<double> taus = {tau};
                        const auto field = vs.radiance_field(sol, taus, mus, phis);

                        for (int iz = 0; iz < zb; ++iz)
                            for (int ia = 0; ia < ab; ++ia) {
                                if (grid.hits[grid.index(hemi, iz, ia)] < 50)
                                    continue;
                                Eigen::Vector4d dom = Eigen::Vector4d::Zero();
                                double wsum = 0.0;
                                for (int gm = 0; gm < 2; ++gm)
                                    for (int gp = 0; gp < 2; ++gp) {
                                        const double mu = std::abs(mus[2 * iz + gm]);
                                        dom += mu *
                                               field.at(0, 2 * iz + gm, 2 * ia + gp).to_eigen();
                                        wsum += mu;
                                    }
                                dom /= wsum;
                                const auto s = grid.radiance(hemi, iz, ia);
                                const auto se = grid.std_error(hemi, iz, ia);
                                ++cfg_total;
                                bool ok = true;
                                for (int c = 0; c < 4; ++c)
                                    if (std::abs(s[c] - dom[c]) > 3.0 * se[c] + 1e-9)
                                        ok = false;
                                if (ok)
                                    ++cfg_passed;
                            }
                    }
                    bins_total += cfg_total;
                    bins_passed += cfg_passed;
                    const double fraction =
                        cfg_total ? static_cast<double>(cfg_passed) / cfg_total : 1.0;
                    if (fraction < worst_fraction) {
                        worst_fraction = fraction;
                        worst_name = fmt("%s omega=%.1f tau0=%g mu0=%.1f",
                                         rayleigh ? "rayleigh" : "isotropic", omega, tau0, mu0);
                    }
                }

    const double elapsed = watch.seconds();
    out.pass = worst_fraction >= 0.95 && elapsed < 600.0;
    out.detail = fmt("%llu/%llu bins within 3 sigma; worst config %.1f%% (%s); runtime %.0f s (< 600 s)",
                     static_cast<unsigned long long>(bins_passed),
                     static_cast<unsigned long long>(bins_total), 100 * worst_fraction,
                     worst_name.c_str(), elapsed);
    return out;
}

// ---------------------------------------------------------------- criterion 8
Outcome criterion_eigen_residuals() {
    Outcome out;
    double worst = 0.0;
    auto record = [&](MaterialSpec spec, int n) {
        ExecutionContext exec(0);
        solver::VrteSolver vs(spec, {.quadrature_n = n}, exec);
        vs.prepare_homogeneous();
        worst = std::max(worst, max_mode_residual(vs));
    };

    // the configurations the other criteria run
    LayerSpec vac = testmat::isotropic_layer(0.0, 1.0);
    vac.coeffs.resize(4, Eigen::Matrix4d::Zero());
    record(testmat::single_layer_material(vac, 0.6), 8);
    record(testmat::single_layer_material(testmat::rayleigh_layer(0.2, 0.01), 0.6), 16);
    auto coeffs = load_coefficient_file(std::string(VRTE_TEST_DATA_DIR) + "/forward12.coef");
    for (double tau0 : {1.0, 10.0, 100.0}) {
        LayerSpec layer;
        layer.omega = 1.0;
        layer.tau = tau0;
        layer.coeffs = coeffs;
        record(testmat::single_layer_material(layer, 0.6, LambertianBase{1.0}), 24);
    }
    for (const double omega : {0.5, 0.9}) {
        record(testmat::single_layer_material(testmat::isotropic_layer(omega, 1.0), 0.6), 16);
        record(testmat::single_layer_material(testmat::rayleigh_layer(omega, 10.0), 1.0), 16);
    }
    {
        LayerSpec layer;
        layer.omega = 0.95;
        layer.tau = 1.0;
        layer.coeffs = coeffs;
        record(testmat::single_layer_material(layer, 0.6), 30);
    }

    out.pass = worst < 1e-9;
    out.detail = fmt("worst full-operator mode residual %.2e (< 1e-9)", worst);
    return out;
}

// ---------------------------------------------------------------- criterion 9
Outcome criterion_determinism() {
    Outcome out;
    auto slurp = [](const char* path) {
        std::ifstream in(path, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    // criteria 1-3 configurations through the shared-library interface
    const std::string dir = VRTE_TEST_DATA_DIR;
    struct Config {
        std::string json;
        int quadrature;
    };
    std::vector<Config> configs = {
        {R"({"layers":[{"omega":0,"tau":1,"coeff_file":")" + dir + R"(/isotropic.coef"}],
             "source":{"mu0":0.6,"phi0":0,"stokes":[1,0,0,0]}})", 8},
        {R"({"layers":[{"omega":0.2,"tau":0.01,"coeff_file":")" + dir + R"(/rayleigh.coef"}],
             "source":{"mu0":0.6,"phi0":0,"stokes":[1,0,0,0]}})", 16},
        {R"({"layers":[{"omega":1.0,"tau":1,"coeff_file":")" + dir + R"(/forward12.coef"}],
             "base":{"type":"lambertian","albedo":1.0},
             "source":{"mu0":0.6,"phi0":0,"stokes":[1,0,0,0]}})", 24},
    };

    bool all_equal = true;
    for (size_t cfg = 0; cfg < configs.size() && all_equal; ++cfg) {
        vrte_material* material = nullptr;
        if (vrte_material_parse(configs[cfg].json.c_str(), ".", &material) != VRTE_OK) {
            out.pass = false;
            out.detail = std::string("material parse failed: ") + vrte_last_error();
            return out;
        }
        for (int pass = 0; pass < 2; ++pass) {
            vrte_options options;
            vrte_options_init(&options);
            options.quadrature_n = configs[cfg].quadrature;
            options.threads = pass == 0 ? 1 : 0;  // serial vs full pool
            const double taus[] = {0.0};
            vrte_field* field = nullptr;
            if (vrte_solve_radiance(material, &options, taus, 1, &field) != VRTE_OK) {
                out.pass = false;
                out.detail = std::string("solve failed: ") + vrte_last_error();
                vrte_material_free(material);
                return out;
            }
            vrte_field_write_csv(field, pass == 0 ? "acc9_serial.tmp" : "acc9_pooled.tmp");
            vrte_field_free(field);

            vrte_brdf* brdf = nullptr;
            const double mu_in[] = {0.6};
            if (vrte_compute_brdf(material, &options, mu_in, 1, 9, nullptr, &brdf) != VRTE_OK) {
                out.pass = false;
                out.detail = std::string("brdf failed: ") + vrte_last_error();
                vrte_material_free(material);
                return out;
            }
            vrte_brdf_write_csv(brdf, pass == 0 ? "acc9_serial_b.tmp" : "acc9_pooled_b.tmp");
            vrte_brdf_free(brdf);
        }
        vrte_material_free(material);
        all_equal = slurp("acc9_serial.tmp") == slurp("acc9_pooled.tmp") &&
                    slurp("acc9_serial_b.tmp") == slurp("acc9_pooled_b.tmp") &&
                    !slurp("acc9_serial.tmp").empty();
    }
    std::remove("acc9_serial.tmp");
    std::remove("acc9_pooled.tmp");
    std::remove("acc9_serial_b.tmp");
    std::remove("acc9_pooled_b.tmp");
    out.pass = all_equal;
    out.detail = all_equal ? "single-thread and pooled outputs byte-identical"
                           : "outputs differ across thread counts";
    return out;
}

// --------------------------------------------------------------- criterion 10
Outcome criterion_benchmark_shape() {
    const StopWatch watch;
    Outcome out;
    auto coeffs = load_coefficient_file(std::string(VRTE_TEST_DATA_DIR) + "/forward12.coef");
    LayerSpec layer;
    layer.omega = 0.95;
    layer.tau = 1.0;
    layer.coeffs = coeffs;  // 12 expansion orders
    auto spec = testmat::single_layer_material(layer, 0.6, LambertianBase{0.1});

    ExecutionContext exec(0);
    solver::VrteSolver vs(spec, {.quadrature_n = 30}, exec);
    const auto sol = solve_source(vs);
    const auto mus = solver::signed_zenith_grid(11);
    const auto phis = solver::default_azimuth_grid(19, 0.0);
    const std::vector<double> taus = {0.0};
    const auto field = vs.radiance_field(sol, taus, mus, phis);

    bool finite = true;
    for (const auto& s : field.values)
        if (!s.is_physical(1e-9))
            finite = false;

    const std::vector<double> check_taus = {0.0, 0.4, 1.0};
    const double consistency = node_consistency_worst(vs, sol, check_taus);
    const double residual = max_mode_residual(vs);

    out.pass = finite && consistency < 1e-8 && residual < 1e-9;
    out.detail = fmt("30 nodes x 12 orders: node consistency %.2e (< 1e-8), residual %.2e (< 1e-9), "
                     "runtime %.1f s",
                     consistency, residual, watch.seconds());
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        const char* name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {"absorbing-vacuum exactness", criterion_vacuum_exactness},
        {"single-scattering analytic check", criterion_single_scattering},
        {"flux conservation", criterion_flux_conservation},
        {"reduced/unreduced equivalence", criterion_reduced_unreduced},
        {"node-consistency of reconstruction", criterion_node_consistency},
        {"layer-splitting invariance", criterion_layer_splitting},
        {"monte carlo cross-validation", criterion_monte_carlo},
        {"eigen residuals", criterion_eigen_residuals},
        {"determinism across thread counts", criterion_determinism},
        {"benchmark-shape run", criterion_benchmark_shape},
    };

    int only = 0;
    if (argc > 1)
        only = std::atoi(argv[1]);

    bool all_pass = true;
    for (int idx = 1; idx <= 10; ++idx) {
        if (only != 0 && only != idx)
            continue;
        Outcome outcome;
        try {
            outcome = criteria[idx - 1].run();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s criterion %d (%s): %s\n", outcome.pass ? "PASS" : "FAIL", idx,
                    criteria[idx - 1].name, outcome.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && outcome.pass;
    }
    return all_pass ? 0 : 1;
}
