#include "solver/homogeneous.hpp"

#include "support/materials.hpp"

#include <doctest.h>

#include <complex>

using namespace vrte;
using solver::EigenModeSet;
using solver::ReducedOperators;

namespace {

solver::ReducedOperators make_ops(const LayerSpec& layer, const Quadrature& quad, int m,
                                  phase::AzimuthKernel* kernel_out = nullptr) {
    auto kernel = phase::assemble_azimuth_kernel(m, layer, quad);
    auto ops = solver::build_reduced_operators(m, layer, quad, kernel);
    if (kernel_out)
        *kernel_out = std::move(kernel);
    return ops;
}

// Characteristic equation of isotropic scattering, solved to long-double
// precision by bisection: 1 = omega * sum_n alpha_n / (1 - mu_n^2 / nu^2)
// for the discrete spectrum outside the node range.
long double isotropic_diffusion_nu(const Quadrature& quad, long double omega) {
    auto f = [&](long double nu) {
        long double sum = 0.0L;
        for (int n = 0; n < quad.n; ++n) {
            const long double mu = quad.nodes[n];
            const long double alpha = quad.weights[n];
            sum += alpha / (1.0L - (mu * mu) / (nu * nu));
        }
        return 1.0L - omega * sum;
    };
    long double lo = quad.nodes.back() * (1.0L + 1e-12L);
    while (f(lo) > 0.0L)
        lo = quad.nodes.back() + 0.5L * (lo - quad.nodes.back());
    long double hi = 1e6L;
    for (int i = 0; i < 200; ++i) {
        const long double mid = 0.5L * (lo + hi);
        if (f(mid) <= 0.0L)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5L * (lo + hi);
}

}  // namespace

TEST_CASE("reduced operators for a vacuum layer") {
    const auto layer = testmat::isotropic_layer(0.0, 1.0);
    const auto quad = build_double_gauss_quadrature(3);
    const auto ops = make_ops(layer, quad, 0);
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 4; ++c) {
            CHECK(ops.e(4 * i + c, 4 * i + c) == doctest::Approx(1.0 / quad.nodes[i]));
            CHECK(ops.f(4 * i + c, 4 * i + c) == doctest::Approx(1.0 / quad.nodes[i]));
        }
    CHECK((ops.e - ops.f).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("conservative isotropic single-node operators by hand") {
    // One node mu = 0.5 with weight 1: E has the intensity row removed and
    // the cosine scaling doubled, F is plain 2I.
    const auto layer = testmat::isotropic_layer(1.0, 1.0);
    const auto quad = build_double_gauss_quadrature(1);
    const auto ops = make_ops(layer, quad, 0);
    Eigen::Matrix4d expected_e = Eigen::Matrix4d::Zero();
    expected_e(1, 1) = expected_e(2, 2) = expected_e(3, 3) = 2.0;
    CHECK((ops.e - expected_e).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((ops.f - 2.0 * Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("kernel-block and stacked-function routes agree") {
    for (const auto& layer : {testmat::rayleigh_layer(0.7, 1.0), testmat::full_layer(0.95, 2.0)}) {
        const auto quad = build_double_gauss_quadrature(5);
        for (int m = 0; m < layer.order_count(); ++m) {
            const auto kernel = phase::assemble_azimuth_kernel(m, layer, quad);
            const auto a = solver::build_reduced_operators(m, layer, quad, kernel);
            const auto b = solver::build_reduced_operators_stacked(m, layer, quad);
            const double scale = a.e.cwiseAbs().maxCoeff();
            CHECK((a.e - b.e).cwiseAbs().maxCoeff() < 1e-12 * scale);
            CHECK((a.f - b.f).cwiseAbs().maxCoeff() < 1e-12 * scale);
        }
    }
}

TEST_CASE("vacuum spectrum is the node cosines with multiplicity four") {
    const auto layer = testmat::isotropic_layer(0.0, 1.0);
    const auto quad = build_double_gauss_quadrature(4);
    phase::AzimuthKernel kernel;
    const auto ops = make_ops(layer, quad, 0, &kernel);
    const auto modes = solver::solve_homogeneous(ops, kernel);
    REQUIRE(modes.modes.size() == 16);

    std::vector<int> counts(quad.n, 0);
    for (const auto& mode : modes.modes) {
        CHECK(std::abs(mode.nu.imag()) < 1e-12);
        bool matched = false;
        for (int i = 0; i < quad.n; ++i)
            if (std::abs(mode.nu.real() - quad.nodes[i]) < 1e-10) {
                ++counts[i];
                matched = true;
                break;
            }
        CHECK(matched);
    }
    for (int c : counts)
        CHECK(c == 4);
}

TEST_CASE("modes satisfy the full-operator residual bound") {
    for (const auto& layer : {testmat::isotropic_layer(0.99, 1.0), testmat::rayleigh_layer(0.9, 1.0),
                              testmat::full_layer(0.85, 1.0)}) {
        const auto quad = build_double_gauss_quadrature(8);
        for (int m = 0; m < layer.order_count(); ++m) {
            phase::AzimuthKernel kernel;
            const auto ops = make_ops(layer, quad, m, &kernel);
            const auto modes = solver::solve_homogeneous(ops, kernel);
            CHECK(modes.modes.size() == 4 * static_cast<size_t>(quad.n));
            CHECK(modes.max_residual < solver::kEigenResidualBound);
            for (const auto& mode : modes.modes)
                CHECK(mode.nu.real() > 0.0);
        }
    }
}

TEST_CASE("complex modes occur in conjugate pairs") {
    const auto layer = testmat::full_layer(0.9, 1.0);
    const auto quad = build_double_gauss_quadrature(6);
    for (int m = 0; m < layer.order_count(); ++m) {
        phase::AzimuthKernel kernel;
        const auto ops = make_ops(layer, quad, m, &kernel);
        const auto modes = solver::solve_homogeneous(ops, kernel);
        for (const auto& mode : modes.modes) {
            if (std::abs(mode.nu.imag()) < 1e-12 * std::abs(mode.nu))
                continue;
            bool found = false;
            for (const auto& other : modes.modes)
                if (std::abs(other.nu - std::conj(mode.nu)) < 1e-9 * std::abs(mode.nu)) {
                    found = true;
                    break;
                }
            CHECK(found);
        }
    }
}

TEST_CASE("recovered pair sums reproduce the reduced eigenvector") {
    const auto layer = testmat::rayleigh_layer(0.9, 1.0);
    const auto quad = build_double_gauss_quadrature(4);
    phase::AzimuthKernel kernel;
    const auto ops = make_ops(layer, quad, 0, &kernel);
    const auto modes = solver::solve_homogeneous(ops, kernel);

    // psi_plus + psi_minus = m^{-1} x and the separation constants square to
    // eigenvalues of FE, so FE (m (psi+ + psi-)) = (1/nu^2) m (psi+ + psi-).
    const Eigen::MatrixXcd fe = (ops.f * ops.e).cast<std::complex<double>>();
    for (const auto& mode : modes.modes) {
        const Eigen::VectorXcd x = ops.m_diag.asDiagonal() * (mode.psi_plus + mode.psi_minus);
        const Eigen::VectorXcd lhs = fe * x;
        const Eigen::VectorXcd rhs = x / (mode.nu * mode.nu);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9 * x.cwiseAbs().maxCoeff());

        // the two recovery branches sum back to the reduced eigenvector
        const Eigen::VectorXcd ex = ops.e.cast<std::complex<double>>() * x;
        const Eigen::VectorXcd sum_back =
            0.5 * ops.m_diag.cwiseInverse().asDiagonal() * (x - mode.nu * ex) +
            0.5 * ops.m_diag.cwiseInverse().asDiagonal() * (x + mode.nu * ex);
        const Eigen::VectorXcd direct = ops.m_diag.cwiseInverse().asDiagonal() * x;
        CHECK((sum_back - direct).cwiseAbs().maxCoeff() < 1e-12 * direct.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("spectral reality for conservative isotropic scattering") {
    const auto layer = testmat::isotropic_layer(1.0, 1.0);
    const auto quad = build_double_gauss_quadrature(6);
    phase::AzimuthKernel kernel;
    const auto ops = make_ops(layer, quad, 0, &kernel);
    const auto modes = solver::solve_homogeneous(ops, kernel);
    for (const auto& mode : modes.modes) {
        const auto lambda = 1.0 / (mode.nu * mode.nu);
        CHECK(std::abs(lambda.imag()) < 1e-10);
        CHECK(lambda.real() > -1e-10);
    }
}

TEST_CASE("diffusion mode against the high-precision characteristic equation") {
    const auto layer = testmat::isotropic_layer(0.99, 1.0);
    const auto quad = build_double_gauss_quadrature(8);
    phase::AzimuthKernel kernel;
    const auto ops = make_ops(layer, quad, 0, &kernel);
    const auto modes = solver::solve_homogeneous(ops, kernel);

    const double expected = static_cast<double>(isotropic_diffusion_nu(quad, 0.99L));
    // the largest separation constant exceeds every node cosine
    double largest = 0.0;
    for (const auto& mode : modes.modes)
        largest = std::max(largest, mode.nu.real());
    CHECK(largest > quad.nodes.back());
    CHECK(largest == doctest::Approx(expected).epsilon(1e-10));
    // frozen from the oracle at omega = 0.99, N = 8
    CHECK(expected == doctest::Approx(5.79672945130218).epsilon(1e-10));
}

TEST_CASE("full-operator spectrum pairs with the reduced one") {
    const auto layer = testmat::rayleigh_layer(0.8, 1.0);
    const auto quad = build_double_gauss_quadrature(3);
    phase::AzimuthKernel kernel;
    const auto ops = make_ops(layer, quad, 1, &kernel);
    const auto modes = solver::solve_homogeneous(ops, kernel);

    const Eigen::MatrixXd full = solver::full_transport_operator(ops, kernel);
    Eigen::EigenSolver<Eigen::MatrixXd> es(full, false);
    const auto full_vals = es.eigenvalues();

    // every 1/nu (and its mirror -1/nu) appears in the full spectrum
    for (const auto& mode : modes.modes) {
        const std::complex<double> target = 1.0 / mode.nu;
        double best = 1e300, best_mirror = 1e300;
        for (int i = 0; i < full_vals.size(); ++i) {
            best = std::min(best, std::abs(full_vals[i] - target));
            best_mirror = std::min(best_mirror, std::abs(full_vals[i] + target));
        }
        CHECK(best < 1e-8 * std::abs(target));
        CHECK(best_mirror < 1e-8 * std::abs(target));
    }
}
