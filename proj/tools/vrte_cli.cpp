// Command-line front end for the vrte shared library. Talks to the solver
// exclusively through the C API in vrte/vrte.h.

#include <vrte/vrte.h>

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct CliConfig {
    std::string mode;
    std::string material_path;
    int quadrature = 40;
    int orders = 0;
    std::string incident;
    std::string tau_levels = "0";
    int out_zenith = 11;
    int out_azimuth = 19;
    int threads = 0;
    uint64_t seed = 20240914;
    uint64_t photons = 1000000;
    bool compare_serial = false;
    bool binary = false;
    std::string dump_eigen;
    std::string dump_boundary;
    std::string dump_kernel;
    std::string out_path = "vrte_out.csv";
};

std::vector<double> parse_doubles(const std::string& text, char sep) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (item.empty())
            continue;
        values.push_back(std::stod(item));
    }
    return values;
}

struct Incident {
    double mu0;
    double phi0;
};

std::vector<Incident> parse_incidents(const std::string& text) {
    std::vector<Incident> incidents;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty())
            continue;
        const auto parts = parse_doubles(item, ',');
        if (parts.empty() || parts.size() > 2)
            throw std::runtime_error("bad --incident entry: " + item);
        incidents.push_back({parts[0], parts.size() > 1 ? parts[1] : 0.0});
    }
    return incidents;
}

int fail(vrte_status status) {
    std::cerr << "error: " << vrte_last_error() << "\n";
    return status == VRTE_E_VALIDATION || status == VRTE_E_ARGUMENT ? 2 : 3;
}

void print_timings(const vrte_timings& t, const char* label) {
    const double sum = t.homogeneous + t.particular + t.boundary + t.reconstruction;
    const double denom = sum > 0 ? sum : 1.0;
    std::printf("timing report (%s)\n", label);
    std::printf("  %-15s %9.4f s   %6.1f%%\n", "homogeneous", t.homogeneous,
                100.0 * t.homogeneous / denom);
    std::printf("  %-15s %9.4f s   %6.1f%%\n", "particular", t.particular,
                100.0 * t.particular / denom);
    std::printf("  %-15s %9.4f s   %6.1f%%\n", "boundary", t.boundary, 100.0 * t.boundary / denom);
    std::printf("  %-15s %9.4f s   %6.1f%%\n", "reconstruction", t.reconstruction,
                100.0 * t.reconstruction / denom);
    std::printf("  %-15s %9.4f s\n", "total (wall)", t.total_wall);
}

void write_timing_csv(const std::string& path, const vrte_timings& t) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f)
        return;
    const double sum = t.homogeneous + t.particular + t.boundary + t.reconstruction;
    const double denom = sum > 0 ? sum : 1.0;
    std::fprintf(f, "step,seconds,fraction\n");
    std::fprintf(f, "homogeneous,%.17g,%.17g\n", t.homogeneous, t.homogeneous / denom);
    std::fprintf(f, "particular,%.17g,%.17g\n", t.particular, t.particular / denom);
    std::fprintf(f, "boundary,%.17g,%.17g\n", t.boundary, t.boundary / denom);
    std::fprintf(f, "reconstruction,%.17g,%.17g\n", t.reconstruction, t.reconstruction / denom);
    std::fprintf(f, "total_wall,%.17g,\n", t.total_wall);
    std::fclose(f);
}

void report_speedup(const vrte_timings& serial, const vrte_timings& parallel) {
    auto ratio = [](double a, double b) { return b > 0 ? a / b : 0.0; };
    std::printf("speedup vs single thread\n");
    std::printf("  homogeneous     %6.2fx\n", ratio(serial.homogeneous, parallel.homogeneous));
    std::printf("  particular      %6.2fx\n", ratio(serial.particular, parallel.particular));
    std::printf("  boundary        %6.2fx\n", ratio(serial.boundary, parallel.boundary));
    std::printf("  reconstruction  %6.2fx\n", ratio(serial.reconstruction, parallel.reconstruction));
    std::printf("  total           %6.2fx\n", ratio(serial.total_wall, parallel.total_wall));
}

vrte_options make_options(const CliConfig& cfg, const std::vector<Incident>& incidents,
                          bool override_incident) {
    vrte_options options;
    vrte_options_init(&options);
    options.quadrature_n = cfg.quadrature;
    options.order_cap = cfg.orders;
    options.threads = cfg.threads;
    options.out_zenith = cfg.out_zenith;
    options.out_azimuth = cfg.out_azimuth;
    if (override_incident && !incidents.empty()) {
        options.incident_override = 1;
        options.incident_mu0 = incidents.front().mu0;
        options.incident_phi0 = incidents.front().phi0;
    }
    if (!cfg.dump_eigen.empty())
        options.dump_eigen_path = cfg.dump_eigen.c_str();
    if (!cfg.dump_boundary.empty())
        options.dump_boundary_path = cfg.dump_boundary.c_str();
    if (!cfg.dump_kernel.empty())
        options.dump_kernel_path = cfg.dump_kernel.c_str();
    return options;
}

int run_radiance(const CliConfig& cfg, vrte_material* material,
                 const std::vector<Incident>& incidents) {
    const auto taus = parse_doubles(cfg.tau_levels, ',');
    const auto options = make_options(cfg, incidents, !incidents.empty());

    vrte_field* field = nullptr;
    vrte_status status =
        vrte_solve_radiance(material, &options, taus.data(), taus.size(), &field);
    if (status != VRTE_OK)
        return fail(status);
    status = vrte_field_write_csv(field, cfg.out_path.c_str());
    if (status != VRTE_OK) {
        vrte_field_free(field);
        return fail(status);
    }

    vrte_timings timings;
    vrte_field_timings(field, &timings);
    print_timings(timings, "radiance");
    write_timing_csv(cfg.out_path + ".timings.csv", timings);

    if (cfg.compare_serial && cfg.threads != 1) {
        auto serial_options = options;
        serial_options.threads = 1;
        vrte_field* serial_field = nullptr;
        if (vrte_solve_radiance(material, &serial_options, taus.data(), taus.size(),
                                &serial_field) == VRTE_OK) {
            vrte_timings serial_timings;
            vrte_field_timings(serial_field, &serial_timings);
            report_speedup(serial_timings, timings);
            vrte_field_free(serial_field);
        }
    }
    std::printf("wrote %s\n", cfg.out_path.c_str());
    vrte_field_free(field);
    return 0;
}

int run_brdf(const CliConfig& cfg, vrte_material* material,
             const std::vector<Incident>& incidents) {
    std::vector<double> mu_in;
    for (const auto& inc : incidents)
        mu_in.push_back(inc.mu0);
    if (mu_in.empty())
        mu_in = {0.6, 1.0};
    const auto options = make_options(cfg, incidents, false);

    vrte_brdf* brdf = nullptr;
    vrte_status status = vrte_compute_brdf(material, &options, mu_in.data(), mu_in.size(),
                                           cfg.out_azimuth, nullptr, &brdf);
    if (status != VRTE_OK)
        return fail(status);
    status = cfg.binary ? vrte_brdf_write_binary(brdf, cfg.out_path.c_str())
                        : vrte_brdf_write_csv(brdf, cfg.out_path.c_str());
    if (status != VRTE_OK) {
        vrte_brdf_free(brdf);
        return fail(status);
    }

    vrte_timings timings;
    vrte_brdf_timings(brdf, &timings);
    print_timings(timings, "brdf");
    write_timing_csv(cfg.out_path + ".timings.csv", timings);

    if (cfg.compare_serial && cfg.threads != 1) {
        auto serial_options = options;
        serial_options.threads = 1;
        vrte_brdf* serial = nullptr;
        if (vrte_compute_brdf(material, &serial_options, mu_in.data(), mu_in.size(),
                              cfg.out_azimuth, nullptr, &serial) == VRTE_OK) {
            vrte_timings serial_timings;
            vrte_brdf_timings(serial, &serial_timings);
            report_speedup(serial_timings, timings);
            vrte_brdf_free(serial);
        }
    }
    std::printf("wrote %s\n", cfg.out_path.c_str());
    vrte_brdf_free(brdf);
    return 0;
}

int run_mc(const CliConfig& cfg, vrte_material* material, const std::vector<Incident>& incidents) {
    const auto options = make_options(cfg, incidents, !incidents.empty());
    vrte_mc_tally* tally = nullptr;
    vrte_status status = vrte_mc_trace(material, &options, cfg.photons, cfg.seed, cfg.out_zenith,
                                       cfg.out_azimuth, &tally);
    if (status != VRTE_OK)
        return fail(status);
    status = vrte_mc_tally_write_csv(tally, cfg.out_path.c_str());
    vrte_mc_tally_free(tally);
    if (status != VRTE_OK)
        return fail(status);
    std::printf("wrote %s\n", cfg.out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CliConfig cfg;
    CLI::App app{"vrte: polarized discrete-ordinate radiative transfer in layered media"};
    app.add_option("--mode", cfg.mode, "radiance | brdf | mc-validate")->required();
    app.add_option("--material", cfg.material_path, "material description file (JSON)")->required();
    app.add_option("--quadrature", cfg.quadrature, "half-range quadrature size N");
    app.add_option("--orders", cfg.orders, "cap on the number of Fourier orders");
    app.add_option("--incident", cfg.incident, "incident directions \"mu0,phi0[;mu0,phi0...]\"");
    app.add_option("--tau-levels", cfg.tau_levels, "comma-separated optical depths (radiance mode)");
    app.add_option("--out-zenith", cfg.out_zenith, "output zenith count / mc zenith bins");
    app.add_option("--out-azimuth", cfg.out_azimuth, "output azimuth count / mc azimuth bins");
    app.add_option("--threads", cfg.threads, "worker threads (0: VRTE_THREADS or hardware)");
    app.add_option("--seed", cfg.seed, "random seed (mc mode)");
    app.add_option("--photons", cfg.photons, "photon count (mc mode)");
    app.add_flag("--compare-serial", cfg.compare_serial, "rerun single-threaded and report speedups");
    app.add_flag("--binary", cfg.binary, "emit the binary table layout (brdf mode)");
    app.add_option("--dump-eigen", cfg.dump_eigen, "write per-order eigen diagnostics CSV");
    app.add_option("--dump-boundary", cfg.dump_boundary, "write per-order boundary diagnostics CSV");
    app.add_option("--dump-kernel", cfg.dump_kernel, "write kernel block dump CSV");
    app.add_option("--out", cfg.out_path, "output file path");
    CLI11_PARSE(app, argc, argv);

    std::vector<Incident> incidents;
    try {
        incidents = parse_incidents(cfg.incident);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    vrte_material* material = nullptr;
    const vrte_status status = vrte_material_load(cfg.material_path.c_str(), &material);
    if (status != VRTE_OK)
        return fail(status);

    int rc = 2;
    if (cfg.mode == "radiance")
        rc = run_radiance(cfg, material, incidents);
    else if (cfg.mode == "brdf")
        rc = run_brdf(cfg, material, incidents);
    else if (cfg.mode == "mc-validate")
        rc = run_mc(cfg, material, incidents);
    else
        std::cerr << "error: unknown mode \"" << cfg.mode << "\"\n";

    vrte_material_free(material);
    return rc;
}
