#pragma once

#include "core/types.hpp"

#include <optional>
#include <variant>

namespace vrte {

/// One homogeneous slab. `coeffs` holds the expansion-coefficient matrices
/// B_l of the scattering matrix, l = 0..L-1, in the 2+2 block layout of
/// randomly oriented particles:
///
///     [ beta   gamma   0       0     ]
///     [ gamma  alpha   0       0     ]
///     [ 0      0       zeta   -eps   ]
///     [ 0      0       eps     delta ]
///
/// normalized so that B_0(0,0) = 1 (scalar phase function integrates to 4*pi
/// with the omega/4pi scattering prefactor).
struct LayerSpec {
    double omega = 0.0;                    // single-scattering albedo in [0,1]
    double tau = 0.0;                      // optical thickness > 0
    std::vector<Eigen::Matrix4d> coeffs;   // B_l, l = 0..L-1

    int order_count() const { return static_cast<int>(coeffs.size()); }
};

struct BlackBase {};

struct LambertianBase {
    double rho = 0.0;  // albedo in [0,1]
};

/// Azimuth-independent Mueller reflection table R(mu_i, -mu_j) on the
/// quadrature grid, row i = outgoing node, column j = incoming node.
/// Entries must carry the same 2+2 block structure as the phase expansion,
/// which keeps the Fourier orders decoupled; such a reflector contributes
/// only to order m = 0.
struct MuellerTableBase {
    int n = 0;
    std::vector<Eigen::Matrix4d> table;  // row-major, size n*n

    const Eigen::Matrix4d& at(int i, int j) const { return table[static_cast<size_t>(i) * n + j]; }
};

using BaseReflector = std::variant<BlackBase, LambertianBase, MuellerTableBase>;

/// Collimated source: mu0 in (0,1] is the cosine toward the source, the beam
/// itself propagates downward along (-mu0, phi0). `stokes` is the incident
/// Stokes amplitude referenced to the beam's meridian plane.
struct BeamSource {
    double mu0 = 1.0;
    double phi0 = 0.0;
    StokesVector stokes = StokesVector::unpolarized(1.0);
};

/// Layer stack (top first) over a base reflector, lit by a single beam.
struct MaterialSpec {
    std::vector<LayerSpec> layers;
    BaseReflector base = BlackBase{};
    BeamSource source;

    int order_count() const { return layers.empty() ? 0 : layers.front().order_count(); }
    double total_tau() const {
        double t = 0.0;
        for (const auto& l : layers)
            t += l.tau;
        return t;
    }
};

/// Check every invariant (albedo range, thickness, B_l block structure and
/// normalization, base parameters, source direction) and equalize the order
/// count across layers by zero-padding. Throws ValidationError with messages
/// naming the offending layer and field.
void validate_material(MaterialSpec& spec);

/// Parse a coefficient file: one line per l, "l beta alpha gamma delta eps zeta".
/// Lines may appear in any order but must cover l = 0..L-1 exactly once.
std::vector<Eigen::Matrix4d> load_coefficient_file(const std::string& path);

/// Parse a material description from JSON text. Relative coeff_file /
/// table_file paths are resolved against `base_dir`. The result is validated.
MaterialSpec parse_material_json(const std::string& json_text, const std::string& base_dir);

/// Load and validate a material file (JSON document, schema in the README).
MaterialSpec load_material_file(const std::string& path);

}  // namespace vrte
