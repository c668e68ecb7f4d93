#include "glpm/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace glpm {

namespace {

const char* axis_name(int a) {
    static const char* names[3] = {"x", "y", "z"};
    return names[a];
}

} // namespace

std::array<RunConfig::AxisBC, 3> parse_bc_string(const std::string& spec) {
    std::array<RunConfig::AxisBC, 3> bc{};
    std::istringstream in(spec);
    std::string part;
    while (std::getline(in, part, ';')) {
        if (part.empty()) continue;
        std::istringstream ps(part);
        std::string axis, type, vals;
        std::getline(ps, axis, ':');
        std::getline(ps, type, ':');
        std::getline(ps, vals);
        int a = axis == "x" ? 0 : axis == "y" ? 1 : axis == "z" ? 2 : -1;
        if (a < 0) throw validation_error("bc: unknown axis '" + axis + "'");
        if (type == "natural") {
            bc[a].dirichlet = false;
        } else if (type == "dirichlet") {
            bc[a].dirichlet = true;
            const auto comma = vals.find(',');
            if (comma == std::string::npos)
                throw validation_error("bc: dirichlet needs 'lo,hi' values");
            bc[a].lo = std::stod(vals.substr(0, comma));
            bc[a].hi = std::stod(vals.substr(comma + 1));
        } else {
            throw validation_error("bc: unknown face type '" + type + "'");
        }
    }
    return bc;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig cfg;
    // defaults: dirichlet -1/+1 across axis 0
    cfg.bc[0] = {true, -1.0, 1.0};

    cfg.experiment = j.value("experiment", cfg.experiment);
    cfg.name = j.value("name", cfg.name);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);

    if (j.contains("params")) {
        const auto& p = j.at("params");
        cfg.params.n = p.value("n", cfg.params.n);
        cfg.params.p = p.value("p", cfg.params.p);
        cfg.params.m = p.value("m", cfg.params.m);
        cfg.params.lambda = p.value("lambda", cfg.params.lambda);
        cfg.params.Lambda = p.value("Lambda", cfg.params.Lambda);
        cfg.params.Q = p.value("Q", cfg.params.Q);
        cfg.params.eps_reg = p.value("eps_reg", cfg.params.eps_reg);
    }
    if (j.contains("potential")) {
        const auto& p = j.at("potential");
        cfg.potential_kind = p.value("kind", cfg.potential_kind);
        cfg.potential_table = p.value("table", cfg.potential_table);
        if (p.contains("m")) {
            const double pm = p.at("m").get<double>();
            if (pm != cfg.params.m)
                throw validation_error("config: potential m differs from params m");
        }
    }
    if (j.contains("grid")) {
        const auto& gj = j.at("grid");
        if (gj.contains("box")) {
            const auto b = gj.at("box").get<std::vector<double>>();
            for (std::size_t a = 0; a < b.size() && a < 3; ++a) cfg.box[a] = b[a];
        }
        cfg.h = gj.value("h", cfg.h);
    }
    if (j.contains("bc")) {
        const auto& bj = j.at("bc");
        if (bj.is_string()) {
            cfg.bc = parse_bc_string(bj.get<std::string>());
        } else {
            for (int a = 0; a < 3; ++a) {
                if (!bj.contains(axis_name(a))) continue;
                const auto& fj = bj.at(axis_name(a));
                const std::string type = fj.value("type", "natural");
                cfg.bc[a].dirichlet = type == "dirichlet";
                cfg.bc[a].lo = fj.value("lo", -1.0);
                cfg.bc[a].hi = fj.value("hi", 1.0);
            }
        }
    }
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        cfg.tol = s.value("tol", cfg.tol);
        cfg.max_iter = s.value("max_iter", cfg.max_iter);
        cfg.noise = s.value("noise", cfg.noise);
    }
    if (j.contains("audit")) {
        const auto& aj = j.at("audit");
        cfg.T = aj.value("T", cfg.T);
        cfg.R0 = aj.value("R0", cfg.R0);
        cfg.Rmax = aj.value("Rmax", cfg.Rmax);
        if (aj.contains("R_list")) cfg.R_list = aj.at("R_list").get<std::vector<int>>();
    }
    if (j.contains("tails")) {
        const auto& t = j.at("tails");
        cfg.tail_T_lo = t.value("T_lo", cfg.tail_T_lo);
        cfg.tail_T_hi = t.value("T_hi", cfg.tail_T_hi);
        cfg.tail_samples = t.value("samples", cfg.tail_samples);
    }
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("config: invalid JSON: ") + e.what());
    }
    return from_json(j);
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["name"] = name;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    j["params"] = {{"n", params.n},     {"p", params.p}, {"m", params.m},
                   {"lambda", params.lambda}, {"Lambda", params.Lambda},
                   {"Q", params.Q},     {"eps_reg", params.eps_reg}};
    j["potential"] = {{"kind", potential_kind}, {"table", potential_table}};
    j["grid"] = {{"box", std::vector<double>(box.begin(), box.begin() + params.n)}, {"h", h}};
    nlohmann::json bj;
    for (int a = 0; a < params.n; ++a) {
        if (bc[a].dirichlet)
            bj[axis_name(a)] = {{"type", "dirichlet"}, {"lo", bc[a].lo}, {"hi", bc[a].hi}};
        else
            bj[axis_name(a)] = {{"type", "natural"}};
    }
    j["bc"] = bj;
    j["solver"] = {{"tol", tol}, {"max_iter", max_iter}, {"noise", noise}};
    j["audit"] = {{"T", T}, {"R0", R0}, {"Rmax", Rmax}, {"R_list", R_list}};
    j["tails"] = {{"T_lo", tail_T_lo}, {"T_hi", tail_T_hi}, {"samples", tail_samples}};
    return j;
}

std::string RunConfig::config_hash() const {
    const std::string dump = to_json().dump();
    std::uint64_t h = 1469598103934665603ull; // FNV-1a 64
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void RunConfig::validate() const {
    params.validate();
    if (potential_kind != "model" && potential_kind != "custom")
        throw validation_error("config: potential kind must be 'model' or 'custom'");
    if (potential_kind == "custom" && potential_table.empty())
        throw validation_error("config: custom potential needs a table path");
    if (!(h > 0.0)) throw validation_error("config: grid spacing must be positive");
    for (int a = 0; a < params.n; ++a)
        if (!(box[a] >= 4.0 * h)) throw validation_error("config: box too small for the spacing");
    if (!(tol > 0.0) || max_iter < 1) throw validation_error("config: bad solver options");
    if (T < 1 || R0 < 1) throw validation_error("config: audit window and R0 must be >= 1");
    if (experiment == "density-2d" || experiment == "profile-tails") {
        if (!params.slow_decay_regime())
            throw validation_error("config: experiment '" + experiment +
                                   "' requires m > p (degenerate slow-decay regime)");
    }
    if (experiment != "density-2d" && experiment != "profile-tails" &&
        experiment != "classical-1d")
        throw validation_error("config: unknown experiment '" + experiment + "'");
    for (int a = 0; a < params.n; ++a) {
        if (bc[a].dirichlet && (std::abs(bc[a].lo) > 1.0 || std::abs(bc[a].hi) > 1.0))
            throw validation_error("config: dirichlet values must lie in [-1, 1]");
    }
}

Potential RunConfig::make_potential() const {
    if (potential_kind == "model") return Potential::model(params.m);
    return Potential::from_csv(params.m, potential_table);
}

BoundaryCondition RunConfig::make_bc() const {
    BoundaryCondition b;
    for (int a = 0; a < params.n; ++a) {
        if (bc[a].dirichlet) {
            b.face[a][0] = {FaceType::dirichlet, bc[a].lo};
            b.face[a][1] = {FaceType::dirichlet, bc[a].hi};
        }
    }
    return b;
}

Grid RunConfig::make_grid() const {
    return Grid::box(params.n, box, h);
}

std::string RunConfig::resolved_out_dir() const {
    std::filesystem::path p = out_dir;
    if (p.is_relative()) {
        if (const char* root = std::getenv("GLPM_OUT")) p = std::filesystem::path(root) / p;
    }
    return p.string();
}

} // namespace glpm
