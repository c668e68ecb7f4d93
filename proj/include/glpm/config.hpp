#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "glpm/minimize.hpp"

namespace glpm {

// One experiment run: energy constants, potential spec, grid/bc spec,
// solver and audit knobs, seed and output location. A fixed config hashes
// to a fixed key, and fixed (config, seed) reruns are bit-identical.
struct RunConfig {
    std::string experiment = "density-2d";
    std::string name = "run";
    std::uint64_t seed = 0;
    std::string out_dir = "out";

    EnergyParams params;

    std::string potential_kind = "model";
    std::string potential_table; // CSV path for tabulated wells

    std::array<double, 3> box{20.0, 20.0, 20.0};
    double h = 0.25;

    struct AxisBC {
        bool dirichlet = false;
        double lo = -1.0, hi = 1.0;
    };
    std::array<AxisBC, 3> bc{};

    double tol = 1e-6;
    long max_iter = 200000;
    double noise = 0.0; // amplitude of seeded random bumps in the initial guess

    int T = 5;
    int R0 = 10;
    int Rmax = 0;            // 0: derive from the box
    std::vector<int> R_list; // radii for the per-R competitor records

    double tail_T_lo = 10.0, tail_T_hi = 1000.0;
    int tail_samples = 9;

    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig from_file(const std::string& path);
    nlohmann::json to_json() const; // canonical, defaults materialized
    std::string config_hash() const;

    void validate() const;
    Potential make_potential() const;
    BoundaryCondition make_bc() const;
    Grid make_grid() const;
    // output directory after applying the GLPM_OUT root for relative paths
    std::string resolved_out_dir() const;
};

// Parse "x:dirichlet:-1,1;y:natural" style face specs.
std::array<RunConfig::AxisBC, 3> parse_bc_string(const std::string& spec);

} // namespace glpm
