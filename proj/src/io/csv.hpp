#pragma once

#include "brdf/brdf.hpp"
#include "mc/mc.hpp"
#include "solver/reconstruction.hpp"

#include <iosfwd>

namespace vrte::io {

/// Radiance table: "tau,mu,phi,I,Q,U,V" with 17 significant digits, one row
/// per (tau, mu, phi) grid point.
void write_radiance_csv(const std::string& path, const solver::RadianceField& field);
solver::RadianceField read_radiance_csv(const std::string& path);

/// Monte Carlo tallies in the same schema plus per-channel standard errors:
/// "tau,mu,phi,I,Q,U,V,se_i,se_q,se_u,se_v". Rows are bin centers; tau is 0
/// for the top hemisphere and the total thickness for the bottom.
void write_mc_csv(const std::string& path, const mc::TallyGrid& grid, double tau_bottom);

/// BRDF table: "mu_in,mu_out,dphi,m00,...,m33" (row-major Mueller entries).
void write_brdf_csv(const std::string& path, const brdf::BrdfTable& table);

/// Binary BRDF table (little-endian): magic "VRTEBRDF", u32 version = 1,
/// u32 counts (n_in, n_out, n_dphi), then the three f64 grids, then entries
/// as 16 f64 in row-major order, dphi fastest.
void write_brdf_binary(const std::string& path, const brdf::BrdfTable& table);
brdf::BrdfTable read_brdf_binary(const std::string& path);

/// Timing report. The human-readable form goes to `out`; the CSV form holds
/// "step,seconds,fraction" rows where fractions are of the timed-step sum,
/// plus counters and the wall total.
void print_timing_report(std::ostream& out, const StepTimers& timers, const WorkCounters& counters);
void write_timing_csv(const std::string& path, const StepTimers& timers, const WorkCounters& counters);

std::string format_double(double v);

}  // namespace vrte::io
