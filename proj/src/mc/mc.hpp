#pragma once

#include "core/execution.hpp"
#include "core/material.hpp"

namespace vrte::mc {

/// Exiting-radiance tallies over uniform (mu, phi) bins for both exit
/// hemispheres, with per-bin second moments for standard errors. Stored sums
/// are of w/mu per photon, so radiance follows by the flux normalization in
/// radiance()/std_error().
struct TallyGrid {
    int zenith_bins = 0;
    int azimuth_bins = 0;
    uint64_t photons = 0;
    double mu0 = 1.0;
    double incident_i = 1.0;

    // hemisphere 0 = top exit (reflection), 1 = bottom exit (transmission)
    std::vector<Eigen::Vector4d> sum;
    std::vector<Eigen::Vector4d> sum_sq;
    std::vector<uint64_t> hits;

    size_t index(int hemisphere, int iz, int ia) const {
        return (static_cast<size_t>(hemisphere) * zenith_bins + iz) * azimuth_bins + ia;
    }
    /// Flux-weighted bin-average radiance and its standard error; the bin
    /// measure is int_bin mu dmu dphi, so stored weights stay bounded even
    /// for grazing exits.
    StokesVector radiance(int hemisphere, int iz, int ia) const;
    StokesVector std_error(int hemisphere, int iz, int ia) const;
    double bin_flux_measure(int iz) const;
    double bin_mu_center(int iz) const { return (iz + 0.5) / zenith_bins; }
    double bin_phi_center(int ia) const { return kTwoPi * (ia + 0.5) / azimuth_bins; }
    double bin_mu_edge(int iz) const { return static_cast<double>(iz) / zenith_bins; }
    double bin_phi_edge(int ia) const { return kTwoPi * ia / azimuth_bins; }

    void add(const TallyGrid& other);
};

/// Polarized photon tracer for the layer stack: exponential free paths in
/// optical depth, survival weighting by the local albedo, scattering angles
/// sampled from a tabulated inverse CDF of the intensity phase function with
/// full Mueller weight correction, meridian-frame Stokes bookkeeping, and
/// base reflection per reflector variant. Photons that exit without any
/// interaction (the direct beam) are not tallied. Deterministic for a fixed
/// (spec, photons, seed, bins) tuple regardless of thread count.
TallyGrid mc_trace(const MaterialSpec& spec, uint64_t photons, uint64_t seed, int zenith_bins,
                   int azimuth_bins, ExecutionContext& exec);

}  // namespace vrte::mc
