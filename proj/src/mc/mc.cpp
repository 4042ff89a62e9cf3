#include "mc/mc.hpp"

#include "phase/kernel.hpp"
#include "phase/rotation.hpp"
#include "solver/boundary.hpp"

namespace vrte::mc {

namespace {

// splitmix64-seeded xoshiro256++, one stream per photon so results do not
// depend on the worker partition.
struct Rng {
    uint64_t s[4];

    static uint64_t splitmix(uint64_t& x) {
        x += 0x9e3779b97f4a7c15ull;
        uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    Rng(uint64_t seed, uint64_t stream) {
        uint64_t x = seed ^ (0x9e3779b97f4a7c15ull * (stream + 1));
        for (auto& w : s)
            w = splitmix(x);
    }

    static uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    uint64_t next() {
        const uint64_t result = rotl(s[0] + s[3], 23) + s[0];
        const uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Tabulated inverse CDF of the intensity phase function over cos(theta).
struct PhasePdf {
    static constexpr int kCells = 2048;
    std::vector<double> cdf;      // kCells + 1 edges
    std::vector<double> density;  // per cell, normalized over [-1, 1]

    explicit PhasePdf(const LayerSpec& layer) {
        cdf.resize(kCells + 1, 0.0);
        density.resize(kCells, 0.0);
        const double dx = 2.0 / kCells;
        double prev = std::max(0.0, phase::scalar_phase_function(layer, -1.0));
        double total = 0.0;
        for (int i = 0; i < kCells; ++i) {
            const double x1 = std::min(-1.0 + dx * (i + 1), 1.0);
            const double cur = std::max(0.0, phase::scalar_phase_function(layer, x1));
            total += 0.5 * (prev + cur) * dx;
            cdf[i + 1] = total;
            prev = cur;
        }
        if (total <= 0.0)
            throw ValidationError("mc: intensity phase function has no positive mass");
        for (auto& c : cdf)
            c /= total;
        for (int i = 0; i < kCells; ++i)
            density[i] = (cdf[i + 1] - cdf[i]) / dx;
    }

    std::pair<double, double> sample(double u) const {
        int lo = 0, hi = kCells;
        while (hi - lo > 1) {
            const int mid = (lo + hi) / 2;
            (cdf[mid] <= u ? lo : hi) = mid;
        }
        const double mass = cdf[lo + 1] - cdf[lo];
        const double frac = mass > 0.0 ? (u - cdf[lo]) / mass : 0.5;
        const double dx = 2.0 / kCells;
        const double x = std::clamp(-1.0 + dx * (lo + frac), -1.0, 1.0);
        return {x, std::max(density[lo], 1e-300)};
    }
};

struct LayerLookup {
    std::vector<double> tops;
    double total = 0.0;

    explicit LayerLookup(const MaterialSpec& spec) {
        tops.resize(spec.layers.size(), 0.0);
        for (size_t p = 1; p < spec.layers.size(); ++p)
            tops[p] = tops[p - 1] + spec.layers[p - 1].tau;
        total = tops.back() + spec.layers.back().tau;
    }

    int at(double tau) const {
        int p = static_cast<int>(tops.size()) - 1;
        while (p > 0 && tau < tops[p])
            --p;
        return p;
    }
};

Eigen::Vector3d rotate_direction(const Eigen::Vector3d& d, double cos_theta, double psi) {
    const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
    const Eigen::Vector3d a =
        std::abs(d.z()) < 0.99 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
    const Eigen::Vector3d t1 = d.cross(a).normalized();
    const Eigen::Vector3d t2 = d.cross(t1);
    return (cos_theta * d + sin_theta * (std::cos(psi) * t1 + std::sin(psi) * t2)).normalized();
}

constexpr double kRouletteThreshold = 1e-4;
constexpr double kRouletteBoost = 10.0;

struct Tracer {
    const MaterialSpec& spec;
    const LayerLookup& lookup;
    const std::vector<PhasePdf>& pdfs;
    const Quadrature* base_quad;  // only for table bases
    TallyGrid& grid;

    void tally(const Eigen::Vector3d& dir, const Eigen::Vector4d& weight, bool top_exit) {
        const double mu = std::abs(dir.z());
        if (mu <= 0.0)
            return;
        const double phi = reduce_azimuth(std::atan2(dir.y(), dir.x()));
        const int iz = std::min(static_cast<int>(mu * grid.zenith_bins), grid.zenith_bins - 1);
        const int ia =
            std::min(static_cast<int>(phi / kTwoPi * grid.azimuth_bins), grid.azimuth_bins - 1);
        const size_t idx = grid.index(top_exit ? 0 : 1, iz, ia);
        grid.sum[idx] += weight;
        grid.sum_sq[idx] += weight.cwiseProduct(weight);
        grid.hits[idx] += 1;
    }

    void trace(Rng& rng) {
        double tau = 0.0;
        Eigen::Vector3d dir = Direction(-spec.source.mu0, spec.source.phi0).unit_vector();
        Eigen::Vector4d weight = spec.source.stokes.to_eigen();
        int events = 0;

        for (int bounce = 0; bounce < 100000; ++bounce) {
            const double step = -std::log(std::max(1e-300, 1.0 - rng.uniform()));
            const double mu = dir.z();
            if (mu == 0.0)
                return;
            const double dtau = -mu * step;

            if (mu > 0.0 && tau + dtau < 0.0) {
                if (events > 0)
                    tally(dir, weight, true);
                return;
            }
            if (mu < 0.0 && tau + dtau > lookup.total) {
                if (std::holds_alternative<BlackBase>(spec.base)) {
                    if (events > 0)
                        tally(dir, weight, false);
                    return;
                }
                tau = lookup.total;
                if (const auto* lam = std::get_if<LambertianBase>(&spec.base)) {
                    const double reflected = lam->rho * weight[0];
                    if (reflected <= 0.0)
                        return;
                    weight = Eigen::Vector4d(reflected, 0.0, 0.0, 0.0);
                } else {
                    const double mu_in = -dir.z();
                    const double mu_up = std::sqrt(std::max(rng.uniform(), 1e-300));
                    const double phi = kTwoPi * rng.uniform();
                    const Eigen::Matrix4d r =
                        solver::base_row_at(spec.base, *base_quad, mu_up, mu_in);
                    weight = 0.5 * (r * weight);
                    if (weight[0] <= 0.0)
                        return;
                    dir = Direction(std::max(mu_up, 1e-9), phi).unit_vector();
                    ++events;
                    continue;
                }
                const double mu_up = std::sqrt(std::max(rng.uniform(), 1e-300));
                const double phi = kTwoPi * rng.uniform();
                dir = Direction(std::max(mu_up, 1e-9), phi).unit_vector();
                ++events;
                continue;
            }

            tau += dtau;
            const int layer_idx = lookup.at(tau);
            const LayerSpec& layer = spec.layers[layer_idx];
            if (layer.omega <= 0.0)
                return;  // absorbed

            const auto [cos_theta, pdf] = pdfs[layer_idx].sample(rng.uniform());
            const double psi = kTwoPi * rng.uniform();
            const Eigen::Vector3d new_dir = rotate_direction(dir, cos_theta, psi);

            const auto geo = phase::scatter_geometry(dir, new_dir);
            const Eigen::Matrix4d z = phase::stokes_rotation(geo.eta_out) *
                                      phase::scatter_matrix(layer, geo.cos_theta) *
                                      phase::stokes_rotation(geo.eta_in);
            weight = (layer.omega / (2.0 * pdf)) * (z * weight);
            dir = new_dir;
            ++events;

            if (weight[0] <= 0.0)
                return;
            if (weight[0] < kRouletteThreshold * spec.source.stokes.i) {
                if (rng.uniform() * kRouletteBoost > 1.0)
                    return;
                weight *= kRouletteBoost;
            }
        }
    }
};

}  // namespace

// Tallies store plain exiting weights, so the estimate is the flux-weighted
// bin average: radiance ~ mu0 * sum(w) / (N * int_bin mu dmu * dphi).
double TallyGrid::bin_flux_measure(int iz) const {
    const double lo = static_cast<double>(iz) / zenith_bins;
    const double hi = static_cast<double>(iz + 1) / zenith_bins;
    return 0.5 * (hi * hi - lo * lo) * (kTwoPi / azimuth_bins);
}

StokesVector TallyGrid::radiance(int hemisphere, int iz, int ia) const {
    const double norm = mu0 / (static_cast<double>(photons) * bin_flux_measure(iz));
    return StokesVector::from_eigen(sum[index(hemisphere, iz, ia)] * norm);
}

StokesVector TallyGrid::std_error(int hemisphere, int iz, int ia) const {
    const double n = static_cast<double>(photons);
    const double norm = mu0 / bin_flux_measure(iz);
    const size_t idx = index(hemisphere, iz, ia);
    Eigen::Vector4d se;
    for (int c = 0; c < 4; ++c) {
        const double mean = sum[idx][c] / n;
        const double var = std::max(0.0, sum_sq[idx][c] / n - mean * mean);
        se[c] = norm * std::sqrt(var / std::max(1.0, n - 1.0));
    }
    return StokesVector::from_eigen(se);
}

void TallyGrid::add(const TallyGrid& other) {
    for (size_t i = 0; i < sum.size(); ++i) {
        sum[i] += other.sum[i];
        sum_sq[i] += other.sum_sq[i];
        hits[i] += other.hits[i];
    }
    photons += other.photons;
}

TallyGrid mc_trace(const MaterialSpec& spec, uint64_t photons, uint64_t seed, int zenith_bins,
                   int azimuth_bins, ExecutionContext& exec) {
    if (photons < 1)
        throw ValidationError("mc: photon count must be positive");
    if (zenith_bins < 1 || azimuth_bins < 1)
        throw ValidationError("mc: bin counts must be positive");

    const LayerLookup lookup(spec);
    std::vector<PhasePdf> pdfs;
    pdfs.reserve(spec.layers.size());
    for (const auto& layer : spec.layers)
        pdfs.emplace_back(layer);

    std::optional<Quadrature> base_quad;
    if (const auto* tab = std::get_if<MuellerTableBase>(&spec.base))
        base_quad = build_double_gauss_quadrature(tab->n);

    auto make_grid = [&] {
        TallyGrid g;
        g.zenith_bins = zenith_bins;
        g.azimuth_bins = azimuth_bins;
        g.mu0 = spec.source.mu0;
        g.incident_i = spec.source.stokes.i;
        const size_t bins = 2 * static_cast<size_t>(zenith_bins) * azimuth_bins;
        g.sum.assign(bins, Eigen::Vector4d::Zero());
        g.sum_sq.assign(bins, Eigen::Vector4d::Zero());
        g.hits.assign(bins, 0);
        return g;
    };

    TallyGrid total = make_grid();

    // Fixed-size photon blocks merged in block order keep the result
    // independent of the thread count.
    constexpr uint64_t kBlock = 16384;
    const uint64_t n_blocks = (photons + kBlock - 1) / kBlock;
    constexpr uint64_t kChunk = 256;

    std::vector<TallyGrid> block_grids;
    for (uint64_t chunk_start = 0; chunk_start < n_blocks; chunk_start += kChunk) {
        const uint64_t chunk = std::min(kChunk, n_blocks - chunk_start);
        block_grids.assign(chunk, make_grid());
        exec.parallel_for(chunk, [&](size_t b) {
            const uint64_t block = chunk_start + b;
            const uint64_t begin = block * kBlock;
            const uint64_t end = std::min(begin + kBlock, photons);
            Tracer tracer{spec, lookup, pdfs, base_quad ? &*base_quad : nullptr, block_grids[b]};
            for (uint64_t p = begin; p < end; ++p) {
                Rng rng(seed, p);
                tracer.trace(rng);
            }
            block_grids[b].photons = end - begin;
        });
        for (uint64_t b = 0; b < chunk; ++b)
            total.add(block_grids[b]);
    }
    return total;
}

}  // namespace vrte::mc
