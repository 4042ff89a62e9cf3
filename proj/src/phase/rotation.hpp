#pragma once

#include "core/material.hpp"
#include "core/types.hpp"

namespace vrte::phase {

/// Meridian-plane polarization basis of a propagation direction d:
/// l_hat = d(theta)/d(theta) (toward increasing zenith angle), r_hat =
/// azimuthal unit vector, with (l_hat, r_hat, d) right-handed. Directions too
/// close to the poles are nudged off-axis before the basis is formed.
struct PolarizationBasis {
    Eigen::Vector3d l;
    Eigen::Vector3d r;
};

PolarizationBasis meridian_basis(const Eigen::Vector3d& d);

/// Mueller rotation matrix for a reference-frame rotation by eta about the
/// propagation direction (from l toward r for positive eta).
Eigen::Matrix4d stokes_rotation(double eta);

/// Rotation angles carrying a Stokes vector through one scattering event:
/// eta_in rotates from the incident meridian frame into the scattering plane,
/// eta_out from the scattering plane into the outgoing meridian frame.
struct ScatterGeometry {
    double cos_theta;
    double eta_in;
    double eta_out;
};

ScatterGeometry scatter_geometry(const Eigen::Vector3d& d_in, const Eigen::Vector3d& d_out);

/// Full phase matrix via scattering-plane rotations (the rotation path):
///   Z(out <- in) = L(eta_out) F(Theta) L(eta_in).
/// Equivalent to the azimuthal series of evaluate_phase_matrix; this form is
/// what the photon tracer applies per event.
MuellerMatrix phase_with_rotations(const Direction& d_in, const Direction& d_out, const LayerSpec& layer);

}  // namespace vrte::phase
