#include "phase/rotation.hpp"

#include "phase/kernel.hpp"

namespace vrte::phase {

namespace {

Eigen::Vector3d nudge_off_pole(Eigen::Vector3d d) {
    if (1.0 - std::abs(d.z()) < 1e-12) {
        d.x() += 1e-9;
        d.normalize();
    }
    return d;
}

}  // namespace

PolarizationBasis meridian_basis(const Eigen::Vector3d& dir) {
    const Eigen::Vector3d d = nudge_off_pole(dir);
    const double s = std::sqrt(std::max(1e-300, d.x() * d.x() + d.y() * d.y()));
    const double cphi = d.x() / s;
    const double sphi = d.y() / s;
    // l = (mu*cos(phi), mu*sin(phi), -sin(theta)), r = (-sin(phi), cos(phi), 0)
    PolarizationBasis basis;
    basis.l = Eigen::Vector3d(d.z() * cphi, d.z() * sphi, -s);
    basis.r = Eigen::Vector3d(-sphi, cphi, 0.0);
    return basis;
}

Eigen::Matrix4d stokes_rotation(double eta) {
    const double c = std::cos(2.0 * eta);
    const double s = std::sin(2.0 * eta);
    Eigen::Matrix4d l = Eigen::Matrix4d::Identity();
    l(1, 1) = c;
    l(1, 2) = s;
    l(2, 1) = -s;
    l(2, 2) = c;
    return l;
}

ScatterGeometry scatter_geometry(const Eigen::Vector3d& din_raw, const Eigen::Vector3d& dout_raw) {
    Eigen::Vector3d din = nudge_off_pole(din_raw);
    Eigen::Vector3d dout = nudge_off_pole(dout_raw);

    double c = std::clamp(din.dot(dout), -1.0, 1.0);
    // Nudge exactly forward/backward geometries so the scattering plane and
    // the in-plane bases below stay well defined.
    if (1.0 - std::abs(c) < 1e-12) {
        Eigen::Vector3d probe = (std::abs(dout.z()) < 0.9) ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
        dout = (dout + 1e-9 * probe).normalized();
        c = std::clamp(din.dot(dout), -1.0, 1.0);
    }

    // In-plane bases continuous through forward scattering:
    //   for the incident beam, the transverse part of d_out,
    //   for the outgoing beam, minus the transverse part of d_in.
    const Eigen::Vector3d l_in_plane = (dout - c * din).normalized();
    const Eigen::Vector3d l_out_plane = (c * dout - din).normalized();
    const Eigen::Vector3d r_out_plane = dout.cross(l_out_plane);

    const PolarizationBasis in_m = meridian_basis(din);
    const PolarizationBasis out_m = meridian_basis(dout);

    ScatterGeometry geo;
    geo.cos_theta = c;
    geo.eta_in = std::atan2(l_in_plane.dot(in_m.r), l_in_plane.dot(in_m.l));
    geo.eta_out = std::atan2(out_m.l.dot(r_out_plane), out_m.l.dot(l_out_plane));
    return geo;
}

MuellerMatrix phase_with_rotations(const Direction& d_in, const Direction& d_out, const LayerSpec& layer) {
    const auto geo = scatter_geometry(d_in.unit_vector(), d_out.unit_vector());
    const Eigen::Matrix4d f = scatter_matrix(layer, geo.cos_theta);
    return MuellerMatrix(stokes_rotation(geo.eta_out) * f * stokes_rotation(geo.eta_in));
}

}  // namespace vrte::phase
