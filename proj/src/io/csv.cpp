#include "io/csv.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>

namespace vrte::io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out)
        throw ValidationError("cannot open output file: " + path);
    return out;
}

}  // namespace

void write_radiance_csv(const std::string& path, const solver::RadianceField& field) {
    auto out = open_out(path);
    out << "tau,mu,phi,I,Q,U,V\n";
    for (size_t it = 0; it < field.taus.size(); ++it)
        for (size_t imu = 0; imu < field.mus.size(); ++imu)
            for (size_t ip = 0; ip < field.phis.size(); ++ip) {
                const auto& s = field.at(it, imu, ip);
                out << format_double(field.taus[it]) << ',' << format_double(field.mus[imu]) << ','
                    << format_double(field.phis[ip]) << ',' << format_double(s.i) << ','
                    << format_double(s.q) << ',' << format_double(s.u) << ',' << format_double(s.v)
                    << '\n';
            }
}

solver::RadianceField read_radiance_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open radiance file: " + path);
    std::string header;
    std::getline(in, header);

    struct Row {
        double tau, mu, phi;
        StokesVector s;
    };
    std::vector<Row> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        Row r;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf", &r.tau, &r.mu, &r.phi, &r.s.i,
                        &r.s.q, &r.s.u, &r.s.v) != 7)
            throw ValidationError(path + ": malformed radiance row: " + line);
        rows.push_back(r);
    }

    solver::RadianceField field;
    auto push_unique = [](std::vector<double>& v, double x) {
        for (double y : v)
            if (y == x)
                return;
        v.push_back(x);
    };
    for (const auto& r : rows) {
        push_unique(field.taus, r.tau);
        push_unique(field.mus, r.mu);
        push_unique(field.phis, r.phi);
    }
    field.values.assign(field.taus.size() * field.mus.size() * field.phis.size(), StokesVector{});
    auto index_of = [](const std::vector<double>& v, double x) {
        for (size_t i = 0; i < v.size(); ++i)
            if (v[i] == x)
                return i;
        return v.size();
    };
    for (const auto& r : rows)
        field.at(index_of(field.taus, r.tau), index_of(field.mus, r.mu),
                 index_of(field.phis, r.phi)) = r.s;
    return field;
}

void write_mc_csv(const std::string& path, const mc::TallyGrid& grid, double tau_bottom) {
    auto out = open_out(path);
    out << "tau,mu,phi,I,Q,U,V,se_i,se_q,se_u,se_v\n";
    for (int hemi = 0; hemi < 2; ++hemi) {
        const double tau = hemi == 0 ? 0.0 : tau_bottom;
        const double sign = hemi == 0 ? 1.0 : -1.0;
        for (int iz = 0; iz < grid.zenith_bins; ++iz)
            for (int ia = 0; ia < grid.azimuth_bins; ++ia) {
                const auto s = grid.radiance(hemi, iz, ia);
                const auto se = grid.std_error(hemi, iz, ia);
                out << format_double(tau) << ',' << format_double(sign * grid.bin_mu_center(iz))
                    << ',' << format_double(grid.bin_phi_center(ia));
                for (int c = 0; c < 4; ++c)
                    out << ',' << format_double(s[c]);
                for (int c = 0; c < 4; ++c)
                    out << ',' << format_double(se[c]);
                out << '\n';
            }
    }
}

void write_brdf_csv(const std::string& path, const brdf::BrdfTable& table) {
    auto out = open_out(path);
    out << "mu_in,mu_out,dphi";
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            out << ",m" << r << c;
    out << '\n';
    for (size_t ii = 0; ii < table.mu_in.size(); ++ii)
        for (size_t io = 0; io < table.mu_out.size(); ++io)
            for (size_t ip = 0; ip < table.dphi.size(); ++ip) {
                out << format_double(table.mu_in[ii]) << ',' << format_double(table.mu_out[io])
                    << ',' << format_double(table.dphi[ip]);
                const auto& m = table.at(ii, io, ip).m;
                for (int r = 0; r < 4; ++r)
                    for (int c = 0; c < 4; ++c)
                        out << ',' << format_double(m(r, c));
                out << '\n';
            }
}

namespace {

constexpr char kBrdfMagic[8] = {'V', 'R', 'T', 'E', 'B', 'R', 'D', 'F'};

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void read_raw(std::ifstream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof v);
}

}  // namespace

void write_brdf_binary(const std::string& path, const brdf::BrdfTable& table) {
    auto out = open_out(path, true);
    out.write(kBrdfMagic, sizeof kBrdfMagic);
    const uint32_t version = 1;
    const uint32_t ni = static_cast<uint32_t>(table.mu_in.size());
    const uint32_t no = static_cast<uint32_t>(table.mu_out.size());
    const uint32_t np = static_cast<uint32_t>(table.dphi.size());
    write_raw(out, version);
    write_raw(out, ni);
    write_raw(out, no);
    write_raw(out, np);
    for (double v : table.mu_in)
        write_raw(out, v);
    for (double v : table.mu_out)
        write_raw(out, v);
    for (double v : table.dphi)
        write_raw(out, v);
    for (const auto& entry : table.entries)
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                write_raw(out, entry.m(r, c));
}

brdf::BrdfTable read_brdf_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open brdf file: " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (std::memcmp(magic, kBrdfMagic, sizeof magic) != 0)
        throw ValidationError(path + ": not a brdf table");
    uint32_t version, ni, no, np;
    read_raw(in, version);
    read_raw(in, ni);
    read_raw(in, no);
    read_raw(in, np);
    if (version != 1)
        throw ValidationError(path + ": unsupported brdf table version");
    brdf::BrdfTable table;
    table.mu_in.resize(ni);
    table.mu_out.resize(no);
    table.dphi.resize(np);
    for (auto& v : table.mu_in)
        read_raw(in, v);
    for (auto& v : table.mu_out)
        read_raw(in, v);
    for (auto& v : table.dphi)
        read_raw(in, v);
    table.entries.resize(static_cast<size_t>(ni) * no * np);
    for (auto& entry : table.entries)
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                read_raw(in, entry.m(r, c));
    if (!in)
        throw ValidationError(path + ": truncated brdf table");
    return table;
}

namespace {

struct StepRow {
    const char* name;
    double seconds;
};

std::vector<StepRow> step_rows(const StepTimers& t) {
    return {{"homogeneous", t.homogeneous},
            {"particular", t.particular},
            {"boundary", t.boundary},
            {"reconstruction", t.reconstruction}};
}

}  // namespace

void print_timing_report(std::ostream& out, const StepTimers& timers, const WorkCounters& counters) {
    const double sum = std::max(timers.step_sum(), 1e-300);
    char buf[128];
    out << "step             seconds   fraction\n";
    for (const auto& row : step_rows(timers)) {
        std::snprintf(buf, sizeof buf, "%-15s %9.4f   %7.4f\n", row.name, row.seconds,
                      row.seconds / sum);
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "%-15s %9.4f\n", "total (wall)", timers.total_wall);
    out << buf;
    out << "work items: homogeneous=" << counters.homogeneous_solves
        << " particular=" << counters.particular_solves << " boundary=" << counters.boundary_solves
        << " reconstruction=" << counters.reconstruction_items << "\n";
}

void write_timing_csv(const std::string& path, const StepTimers& timers,
                      const WorkCounters& counters) {
    auto out = open_out(path);
    const double sum = std::max(timers.step_sum(), 1e-300);
    out << "step,seconds,fraction\n";
    for (const auto& row : step_rows(timers))
        out << row.name << ',' << format_double(row.seconds) << ','
            << format_double(row.seconds / sum) << '\n';
    out << "total_wall," << format_double(timers.total_wall) << ",\n";
    out << "# counters: homogeneous=" << counters.homogeneous_solves
        << " particular=" << counters.particular_solves << " boundary=" << counters.boundary_solves
        << " reconstruction=" << counters.reconstruction_items << '\n';
}

}  // namespace vrte::io
