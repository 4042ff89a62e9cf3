#include "solver/reconstruction.hpp"

#include <sstream>

namespace vrte::solver {

namespace {

using Cplx = std::complex<double>;

int locate_layer(const LayerChain& chain, double tau, double& t_local) {
    int p = 0;
    while (p + 1 < static_cast<int>(chain.size()) && tau >= chain[p].tau_top + chain[p].thickness)
        ++p;
    t_local = std::clamp(tau - chain[p].tau_top, 0.0, chain[p].thickness);
    return p;
}

}  // namespace

void nodal_stacks(const LayerChain& chain, double mu0, double tau, Eigen::VectorXcd& up,
                  Eigen::VectorXcd& down) {
    double t_local = 0.0;
    const int p = locate_layer(chain, tau, t_local);
    chain_stacks(chain[p], mu0, t_local, up, down);
}

SourceCoefficients source_coefficients(const LayerChainEntry& entry, const Quadrature& quad, int k,
                                       const BeamSource& source, double /*mu_signed*/,
                                       const phase::KernelRow& row, const Eigen::Matrix4d& beam_block) {
    const int n = quad.n;
    const auto& modes = entry.modes->modes;
    const double half_omega = 0.5 * entry.layer->omega;

    SourceCoefficients out;
    out.mu0 = source.mu0;
    out.thickness = entry.thickness;
    out.from_top.reserve(modes.size());
    out.from_bottom.reserve(modes.size());

    // Weighted kernel blocks reused across modes.
    std::vector<Eigen::Matrix4cd> wp(n), wm(n);
    for (int i = 0; i < n; ++i) {
        wp[i] = (quad.weights[i] * row.plus[i]).cast<Cplx>();
        wm[i] = (quad.weights[i] * row.minus[i]).cast<Cplx>();
    }

    for (size_t j = 0; j < modes.size(); ++j) {
        const auto& mode = modes[j];
        const Eigen::VectorXcd down_a = apply_block_parity(mode.psi_minus);
        const Eigen::VectorXcd down_b = apply_block_parity(mode.psi_plus);
        Eigen::Vector4cd acc_a = Eigen::Vector4cd::Zero();
        Eigen::Vector4cd acc_b = Eigen::Vector4cd::Zero();
        for (int i = 0; i < n; ++i) {
            acc_a += wp[i] * mode.psi_plus.segment<4>(4 * i) + wm[i] * down_a.segment<4>(4 * i);
            acc_b += wp[i] * mode.psi_minus.segment<4>(4 * i) + wm[i] * down_b.segment<4>(4 * i);
        }
        out.from_top.emplace_back(mode.nu, half_omega * entry.coef_a[j] * acc_a);
        out.from_bottom.emplace_back(mode.nu, half_omega * entry.coef_b[j] * acc_b);
    }

    Eigen::Vector4cd beam = Eigen::Vector4cd::Zero();
    for (int i = 0; i < n; ++i)
        beam += wp[i] * entry.part->z_plus.segment<4>(4 * i).cast<Cplx>() +
                wm[i] * entry.part->z_minus.segment<4>(4 * i).cast<Cplx>();
    beam *= half_omega;
    const Eigen::Vector4d selected = phase::FourierBasis::selector(k) * source.stokes.to_eigen();
    beam += (entry.layer->omega / (2.0 * kPi)) * (beam_block * selected).cast<Cplx>();
    out.beam = entry.beam_top * beam;
    return out;
}

Eigen::Vector4cd evaluate_source(const SourceCoefficients& coeffs, double t) {
    Eigen::Vector4cd s = Eigen::Vector4cd::Zero();
    for (const auto& [rate, c] : coeffs.from_top)
        s += c * std::exp(-t / rate);
    for (const auto& [rate, c] : coeffs.from_bottom)
        s += c * std::exp(-(coeffs.thickness - t) / rate);
    s += coeffs.beam * std::exp(-t / coeffs.mu0);
    return s;
}

namespace {

inline constexpr double kDegenerateRate = 1e-9;

// integral_t^d c exp(-s/a) exp(-(s-t)/mu) ds / mu  (upward kernel, decaying-from-top term)
Eigen::Vector4cd up_term_top(Cplx a, const Eigen::Vector4cd& c, double mu, double t, double d) {
    const Cplx denom = 1.0 + mu / a;
    return c * (std::exp(-t / a) - std::exp(-d / a) * std::exp(-(d - t) / mu)) / denom;
}

// integral_t^d c exp(-(d-s)/b) exp(-(s-t)/mu) ds / mu  (upward kernel, decaying-from-bottom term)
Eigen::Vector4cd up_term_bottom(Cplx b, const Eigen::Vector4cd& c, double mu, double t, double d) {
    if (std::abs(1.0 / mu - 1.0 / b) < kDegenerateRate)
        return c * std::exp(-(d - t) / mu) * ((d - t) / mu);
    return c * (std::exp(-(d - t) / b) - std::exp(-(d - t) / mu)) / (1.0 - mu / b);
}

// integral_0^t c exp(-s/a) exp(-(t-s)/mu) ds / mu  (downward kernel, decaying-from-top term)
Eigen::Vector4cd down_term_top(Cplx a, const Eigen::Vector4cd& c, double mu, double t) {
    if (std::abs(1.0 / mu - 1.0 / a) < kDegenerateRate)
        return c * std::exp(-t / mu) * (t / mu);
    return c * (std::exp(-t / a) - std::exp(-t / mu)) / (1.0 - mu / a);
}

// integral_0^t c exp(-(d-s)/b) exp(-(t-s)/mu) ds / mu  (downward kernel, decaying-from-bottom term)
Eigen::Vector4cd down_term_bottom(Cplx b, const Eigen::Vector4cd& c, double mu, double t, double d) {
    const Cplx denom = 1.0 + mu / b;
    return c * (std::exp(-(d - t) / b) - std::exp(-d / b) * std::exp(-t / mu)) / denom;
}

}  // namespace

Eigen::Vector4cd integrate_source_upward(const SourceCoefficients& coeffs, double mu, double t,
                                         const Eigen::Vector4cd& i_bottom) {
    const double d = coeffs.thickness;
    Eigen::Vector4cd value = i_bottom * std::exp(-(d - t) / mu);
    for (const auto& [rate, c] : coeffs.from_top)
        value += up_term_top(rate, c, mu, t, d);
    for (const auto& [rate, c] : coeffs.from_bottom)
        value += up_term_bottom(rate, c, mu, t, d);
    value += up_term_top(coeffs.mu0, coeffs.beam, mu, t, d);
    return value;
}

Eigen::Vector4cd integrate_source_downward(const SourceCoefficients& coeffs, double mu, double t,
                                           const Eigen::Vector4cd& i_top) {
    const double d = coeffs.thickness;
    Eigen::Vector4cd value = i_top * std::exp(-t / mu);
    for (const auto& [rate, c] : coeffs.from_top)
        value += down_term_top(rate, c, mu, t);
    for (const auto& [rate, c] : coeffs.from_bottom)
        value += down_term_bottom(rate, c, mu, t, d);
    value += down_term_top(coeffs.mu0, coeffs.beam, mu, t);
    return value;
}

std::vector<Eigen::Vector4cd> reconstruct_component(
    const LayerChain& chain, const Quadrature& quad, int m, int k, const BeamSource& source,
    const BaseReflector& base, double mu_signed, std::span<const double> taus,
    const std::vector<const phase::KernelRow*>& rows_per_layer,
    const std::vector<Eigen::Matrix4d>& beam_blocks_per_layer) {
    const int layers = static_cast<int>(chain.size());
    const double mu = std::abs(mu_signed);
    const bool upward = mu_signed > 0.0;

    std::vector<SourceCoefficients> coeffs(layers);
    for (int p = 0; p < layers; ++p)
        coeffs[p] = source_coefficients(chain[p], quad, k, source, mu_signed, *rows_per_layer[p],
                                        beam_blocks_per_layer[p]);

    // Map each requested tau onto (layer, local depth).
    std::vector<std::pair<int, double>> targets(taus.size());
    for (size_t it = 0; it < taus.size(); ++it) {
        double t_local = 0.0;
        const int p = locate_layer(chain, taus[it], t_local);
        targets[it] = {p, t_local};
    }

    std::vector<Eigen::Vector4cd> out(taus.size(), Eigen::Vector4cd::Zero());

    if (!upward) {
        Eigen::Vector4cd boundary = Eigen::Vector4cd::Zero();  // no diffuse at the top
        for (int p = 0; p < layers; ++p) {
            for (size_t it = 0; it < taus.size(); ++it)
                if (targets[it].first == p)
                    out[it] = integrate_source_downward(coeffs[p], mu, targets[it].second, boundary);
            boundary = integrate_source_downward(coeffs[p], mu, chain[p].thickness, boundary);
        }
        return out;
    }

    // Base starting value: the reflected downward nodal field plus the
    // reflected attenuated beam (order 0 only for the supported reflectors).
    Eigen::Vector4cd boundary = Eigen::Vector4cd::Zero();
    if (m == 0 && !std::holds_alternative<BlackBase>(base)) {
        const double tau_total = chain.back().tau_top + chain.back().thickness;
        Eigen::VectorXcd up_nodal, down_nodal;
        chain_stacks(chain.back(), source.mu0, chain.back().thickness, up_nodal, down_nodal);
        for (int j = 0; j < quad.n; ++j) {
            const Eigen::Matrix4d r = base_row_at(base, quad, mu, quad.nodes[j]);
            boundary += quad.weights[j] * quad.nodes[j] *
                        (r.cast<Cplx>() * down_nodal.segment<4>(4 * j));
        }
        const Eigen::Matrix4d r_beam = base_row_at(base, quad, mu, source.mu0);
        Eigen::Vector4d s = (source.mu0 / kPi) * (r_beam * source.stokes.to_eigen()) *
                            std::exp(-tau_total / source.mu0);
        boundary += (phase::FourierBasis::selector(k) * s).cast<Cplx>();
    }

    for (int p = layers - 1; p >= 0; --p) {
        for (size_t it = 0; it < taus.size(); ++it)
            if (targets[it].first == p)
                out[it] = integrate_source_upward(coeffs[p], mu, targets[it].second, boundary);
        boundary = integrate_source_upward(coeffs[p], mu, 0.0, boundary);
    }
    return out;
}

StokesVector azimuthal_assemble(const std::vector<std::array<Eigen::Vector4cd, 2>>& components,
                                double dphi, double imag_tol) {
    // The solved components pair with the reversed-argument basis: the phase
    // expansion carries Phi_k^m(phi_in - phi_out), so the field series reads
    // I = 1/2 sum Phi_k^m(phi0 - phi) I_k^m. The rotation-path cross-checks
    // pin this choice.
    const double x = -dphi;
    Eigen::Vector4cd total = Eigen::Vector4cd::Zero();
    double scale = 0.0;
    for (size_t m = 0; m < components.size(); ++m) {
        const Eigen::Matrix4d phi1 = phase::FourierBasis::phi(1, static_cast<int>(m), x);
        const Eigen::Matrix4d phi2 = phase::FourierBasis::phi(2, static_cast<int>(m), x);
        total += 0.5 * (phi1.cast<std::complex<double>>() * components[m][0] +
                        phi2.cast<std::complex<double>>() * components[m][1]);
        scale = std::max({scale, components[m][0].cwiseAbs().maxCoeff(),
                          components[m][1].cwiseAbs().maxCoeff()});
    }
    const double imag = total.imag().cwiseAbs().maxCoeff();
    if (imag > imag_tol * scale + 1e-300) {
        std::ostringstream os;
        os << "imaginary residue " << imag << " exceeds tolerance (scale " << scale
           << "); conjugate mode pairing is broken";
        throw NumericalError(os.str());
    }
    const Eigen::Vector4d real = total.real();
    return {real[0], real[1], real[2], real[3]};
}

}  // namespace vrte::solver
