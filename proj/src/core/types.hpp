#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vrte {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Grazing-direction clamp: reconstruction grids asking for mu = 0 are moved
/// to this value to keep the 1/mu terms of the source-function integrals finite.
inline constexpr double kMinMu = 1e-6;

/// Raised for malformed inputs (material files, options). Maps to exit code 2.
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised for numerical failures (eigen residuals, singular systems).
/// Maps to exit code 3.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Polarized radiance as [I, Q, U, V]: total intensity, the two linear
/// polarization differences, and circular polarization. Units follow the
/// quantity being represented (radiance for fields, irradiance for sources).
struct StokesVector {
    double i = 0.0;
    double q = 0.0;
    double u = 0.0;
    double v = 0.0;

    StokesVector() = default;
    StokesVector(double i_, double q_, double u_, double v_) : i(i_), q(q_), u(u_), v(v_) {}

    static StokesVector unpolarized(double intensity) { return {intensity, 0.0, 0.0, 0.0}; }

    static StokesVector from_eigen(const Eigen::Vector4d& s) { return {s[0], s[1], s[2], s[3]}; }
    Eigen::Vector4d to_eigen() const { return {i, q, u, v}; }

    double operator[](int k) const { return k == 0 ? i : (k == 1 ? q : (k == 2 ? u : v)); }
    double& operator[](int k) {
        double* p[4] = {&i, &q, &u, &v};
        return *p[k];
    }

    StokesVector operator+(const StokesVector& o) const { return {i + o.i, q + o.q, u + o.u, v + o.v}; }
    StokesVector operator-(const StokesVector& o) const { return {i - o.i, q - o.q, u - o.u, v - o.v}; }
    StokesVector operator*(double c) const { return {i * c, q * c, u * c, v * c}; }

    /// Physicality of a fully assembled radiance vector: nonnegative intensity
    /// and i^2 >= q^2 + u^2 + v^2 within tolerance. Individual Fourier modes
    /// are not required to satisfy this.
    bool is_physical(double tol = 1e-9) const {
        if (!(std::isfinite(i) && std::isfinite(q) && std::isfinite(u) && std::isfinite(v)))
            return false;
        const double pol2 = q * q + u * u + v * v;
        return i >= -tol && i * i >= pol2 - tol * i * i - 1e-300;
    }
};

/// 4x4 real operator taking incident to outgoing Stokes vectors.
struct MuellerMatrix {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();

    MuellerMatrix() = default;
    explicit MuellerMatrix(const Eigen::Matrix4d& mat) : m(mat) {}

    static MuellerMatrix identity() { return MuellerMatrix(Eigen::Matrix4d::Identity()); }

    StokesVector apply(const StokesVector& s) const { return StokesVector::from_eigen(m * s.to_eigen()); }

    bool all_finite() const { return m.allFinite(); }
};

/// Propagation direction on the unit sphere. |mu| is the cosine of the zenith
/// angle; the sign of mu encodes the hemisphere (+ upward, - downward).
/// phi is the azimuth in [0, 2*pi). mu is never zero.
struct Direction {
    double mu;
    double phi;

    Direction(double mu_, double phi_);

    /// Cartesian unit vector with +z along the upward normal.
    Eigen::Vector3d unit_vector() const {
        const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        return {s * std::cos(phi), s * std::sin(phi), mu};
    }
};

/// Reduce an angle to [0, 2*pi).
double reduce_azimuth(double phi);

/// Clamp a zenith cosine away from zero, preserving hemisphere. A value of
/// exactly zero is pushed into the upward hemisphere.
double clamp_mu(double mu);

/// Half-range double-Gauss rule: a Gauss-Legendre rule mapped onto (0,1).
/// The same nodes/weights serve the downward hemisphere with negated nodes.
/// Weights sum to one.
struct Quadrature {
    int n = 0;
    std::vector<double> nodes;    // strictly increasing, in (0,1)
    std::vector<double> weights;  // positive
};

/// Build the n-point half-range rule. Throws ValidationError for n = 0.
Quadrature build_double_gauss_quadrature(int n);

/// Cosine of the angle between two directions:
/// mu*mu' + sqrt(1-mu^2)*sqrt(1-mu'^2)*cos(phi-phi').
double cos_scattering_angle(const Direction& d1, const Direction& d2);

}  // namespace vrte
