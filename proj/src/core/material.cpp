#include "core/material.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace vrte {

namespace {

void check_block_structure(const Eigen::Matrix4d& b, int layer_idx, int l, std::vector<std::string>& errors) {
    static const int zero_positions[8][2] = {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 0}, {3, 0}, {2, 1}, {3, 1}};
    for (const auto& p : zero_positions) {
        if (b(p[0], p[1]) != 0.0) {
            std::ostringstream os;
            os << "layer " << layer_idx << ": coeffs[" << l << "](" << p[0] << "," << p[1]
               << ") must be zero (2+2 block structure)";
            errors.push_back(os.str());
            return;
        }
    }
    if (!b.allFinite()) {
        std::ostringstream os;
        os << "layer " << layer_idx << ": coeffs[" << l << "] has non-finite entries";
        errors.push_back(os.str());
    }
    if (b(0, 1) != b(1, 0)) {
        std::ostringstream os;
        os << "layer " << layer_idx << ": coeffs[" << l << "] gamma entries (0,1) and (1,0) differ";
        errors.push_back(os.str());
    }
    if (b(2, 3) != -b(3, 2)) {
        std::ostringstream os;
        os << "layer " << layer_idx << ": coeffs[" << l << "] epsilon entries must satisfy (2,3) = -(3,2)";
        errors.push_back(os.str());
    }
}

}  // namespace

void validate_material(MaterialSpec& spec) {
    std::vector<std::string> errors;

    if (spec.layers.empty())
        errors.push_back("material: at least one layer is required");

    int max_order = 0;
    for (size_t k = 0; k < spec.layers.size(); ++k) {
        const auto& layer = spec.layers[k];
        if (!(layer.omega >= 0.0 && layer.omega <= 1.0)) {
            std::ostringstream os;
            os << "layer " << k << ": albedo out of range (omega = " << layer.omega << ", expected [0,1])";
            errors.push_back(os.str());
        }
        if (!(layer.tau > 0.0 && std::isfinite(layer.tau))) {
            std::ostringstream os;
            os << "layer " << k << ": optical thickness must be positive (tau = " << layer.tau << ")";
            errors.push_back(os.str());
        }
        if (layer.coeffs.empty()) {
            std::ostringstream os;
            os << "layer " << k << ": no expansion coefficients";
            errors.push_back(os.str());
        } else {
            if (std::abs(layer.coeffs[0](0, 0) - 1.0) > 1e-6) {
                std::ostringstream os;
                os << "layer " << k << ": coeffs[0](0,0) = " << layer.coeffs[0](0, 0)
                   << " violates the phase normalization B_0(0,0) = 1";
                errors.push_back(os.str());
            }
            for (int l = 0; l < layer.order_count(); ++l)
                check_block_structure(layer.coeffs[l], static_cast<int>(k), l, errors);
        }
        max_order = std::max(max_order, layer.order_count());
    }

    if (auto* lam = std::get_if<LambertianBase>(&spec.base)) {
        if (!(lam->rho >= 0.0 && lam->rho <= 1.0))
            errors.push_back("base: lambertian albedo out of range (rho = " + std::to_string(lam->rho) + ")");
    } else if (auto* tab = std::get_if<MuellerTableBase>(&spec.base)) {
        if (tab->n < 1 || tab->table.size() != static_cast<size_t>(tab->n) * tab->n) {
            errors.push_back("base: mueller table dimensions inconsistent");
        } else {
            std::vector<std::string> tab_errors;
            for (int i = 0; i < tab->n && tab_errors.empty(); ++i)
                for (int j = 0; j < tab->n && tab_errors.empty(); ++j)
                    check_block_structure(tab->at(i, j), -1, -1, tab_errors);
            if (!tab_errors.empty())
                errors.push_back("base: mueller table entries must carry the 2+2 block structure");
        }
    }

    if (!(spec.source.mu0 > 0.0 && spec.source.mu0 <= 1.0))
        errors.push_back("source: mu0 must lie in (0,1], got " + std::to_string(spec.source.mu0));
    spec.source.phi0 = reduce_azimuth(spec.source.phi0);

    if (!errors.empty()) {
        std::string joined;
        for (size_t k = 0; k < errors.size(); ++k)
            joined += (k ? "; " : "") + errors[k];
        throw ValidationError(joined);
    }

    // Equalize order counts by zero-padding the shorter coefficient lists.
    for (auto& layer : spec.layers)
        layer.coeffs.resize(max_order, Eigen::Matrix4d::Zero());
}

std::vector<Eigen::Matrix4d> load_coefficient_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open coefficient file: " + path);

    struct Row {
        int l;
        double beta, alpha, gamma, delta, eps, zeta;
    };
    std::vector<Row> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r\n");
        if (first == std::string::npos || line[first] == '#')
            continue;
        std::istringstream ls(line);
        Row r{};
        if (!(ls >> r.l >> r.beta >> r.alpha >> r.gamma >> r.delta >> r.eps >> r.zeta))
            throw ValidationError(path + ":" + std::to_string(lineno) +
                                  ": expected \"l beta alpha gamma delta epsilon zeta\"");
        rows.push_back(r);
    }
    if (rows.empty())
        throw ValidationError(path + ": no coefficient rows");

    int max_l = 0;
    for (const auto& r : rows)
        max_l = std::max(max_l, r.l);
    std::vector<Eigen::Matrix4d> coeffs(max_l + 1, Eigen::Matrix4d::Zero());
    std::vector<bool> seen(max_l + 1, false);
    for (const auto& r : rows) {
        if (r.l < 0 || seen[r.l])
            throw ValidationError(path + ": duplicate or negative order l = " + std::to_string(r.l));
        seen[r.l] = true;
        Eigen::Matrix4d b = Eigen::Matrix4d::Zero();
        b(0, 0) = r.beta;
        b(1, 1) = r.alpha;
        b(0, 1) = b(1, 0) = r.gamma;
        b(3, 3) = r.delta;
        b(2, 2) = r.zeta;
        b(2, 3) = -r.eps;
        b(3, 2) = r.eps;
        coeffs[r.l] = b;
    }
    for (int l = 0; l <= max_l; ++l)
        if (!seen[l])
            throw ValidationError(path + ": missing coefficient row for l = " + std::to_string(l));
    return coeffs;
}

namespace {

std::vector<Eigen::Matrix4d> load_base_table(const std::string& path, int& n_out) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open base table file: " + path);
    int n = 0;
    if (!(in >> n) || n < 1)
        throw ValidationError(path + ": expected leading table size");
    std::vector<Eigen::Matrix4d> table(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Eigen::Matrix4d m;
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c)
                    if (!(in >> m(r, c)))
                        throw ValidationError(path + ": truncated table");
            table[static_cast<size_t>(i) * n + j] = m;
        }
    n_out = n;
    return table;
}

std::string resolve_path(const std::string& p, const std::string& base_dir) {
    std::filesystem::path fp(p);
    if (fp.is_absolute() || base_dir.empty())
        return p;
    return (std::filesystem::path(base_dir) / fp).string();
}

}  // namespace

MaterialSpec parse_material_json(const std::string& json_text, const std::string& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const std::exception& e) {
        throw ValidationError(std::string("material JSON parse error: ") + e.what());
    }

    MaterialSpec spec;
    try {
        if (!j.contains("layers") || !j["layers"].is_array())
            throw ValidationError("material: \"layers\" array is required");
        for (const auto& jl : j["layers"]) {
            LayerSpec layer;
            layer.omega = jl.at("omega").get<double>();
            layer.tau = jl.at("tau").get<double>();
            layer.coeffs = load_coefficient_file(resolve_path(jl.at("coeff_file").get<std::string>(), base_dir));
            spec.layers.push_back(std::move(layer));
        }

        if (j.contains("base")) {
            const auto& jb = j["base"];
            const std::string type = jb.at("type").get<std::string>();
            if (type == "black") {
                spec.base = BlackBase{};
            } else if (type == "lambertian") {
                spec.base = LambertianBase{jb.at("albedo").get<double>()};
            } else if (type == "mueller_table") {
                MuellerTableBase tab;
                tab.table = load_base_table(resolve_path(jb.at("table_file").get<std::string>(), base_dir), tab.n);
                spec.base = std::move(tab);
            } else {
                throw ValidationError("base: unknown type \"" + type + "\"");
            }
        }

        if (j.contains("source")) {
            const auto& js = j["source"];
            spec.source.mu0 = js.at("mu0").get<double>();
            spec.source.phi0 = js.value("phi0", 0.0);
            if (js.contains("stokes")) {
                const auto s = js["stokes"].get<std::vector<double>>();
                if (s.size() != 4)
                    throw ValidationError("source: \"stokes\" must have 4 entries");
                spec.source.stokes = {s[0], s[1], s[2], s[3]};
            }
        }
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        throw ValidationError(std::string("material: ") + e.what());
    }

    validate_material(spec);
    return spec;
}

MaterialSpec load_material_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open material file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_material_json(buf.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace vrte
