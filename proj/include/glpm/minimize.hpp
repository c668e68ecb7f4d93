#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "glpm/grid.hpp"
#include "glpm/profile1d.hpp"

namespace glpm {

enum class FaceType { natural, dirichlet };

struct FaceSpec {
    FaceType type = FaceType::natural;
    double value = 0.0; // dirichlet value, in [-1, 1]
};

// Per-face boundary data plus an optional interior pinning mask. Dirichlet
// faces pin the outermost cell layer.
struct BoundaryCondition {
    std::array<std::array<FaceSpec, 2>, 3> face{}; // [axis][side: 0=lo, 1=hi]
    std::vector<std::uint8_t> frozen;              // optional, per cell

    static BoundaryCondition all_natural() { return {}; }
    // Dirichlet lo/hi values on one axis, natural elsewhere.
    static BoundaryCondition axis_dirichlet(int axis, double lo, double hi);
};

struct SolveOptions {
    double tol = 1e-6;      // sup-norm of the projected energy gradient / h^n
    long max_iter = 200000;
    bool record_traces = true;
};

struct SolveReport {
    long iterations = 0;
    double final_energy = 0.0;
    double final_residual = 0.0;
    std::vector<double> step_sizes;
    std::vector<double> energy_trace;
    bool converged = false;
};

// Projected gradient descent on u in [-1,1] with Barzilai-Borwein step
// proposals and Armijo backtracking; the energy trace is nonincreasing
// across accepted steps.
std::pair<Field, SolveReport> minimize(Field u0, const BoundaryCondition& bc,
                                       const EnergyParams& params, const Potential& P,
                                       const SolveOptions& opts = {});

struct QMinimalityReport {
    double worst_ratio = 0.0;
    int trials = 0;
    bool degenerate = false; // some competitor had zero energy while u did not
    double ramp_ratio = 0.0;
    double radial_ratio = 0.0;
    double bump_worst_ratio = 0.0;
};

// Compares the energy of u on `region` against competitors that agree with
// u outside a one-cell inner margin of the region: the ramp to the lower
// phase, the radial comparison-profile wall, and random clamped bumps.
QMinimalityReport q_minimality_audit(const Field& u, const Region& region,
                                     const EnergyParams& params, const Potential& P, int trials,
                                     std::uint64_t seed);

struct NearPlusOneReport {
    bool found = false;
    std::size_t cell = 0;
    std::array<double, 3> location{};
    double distance = 0.0;       // |x_h - anchor|
    double radius = 0.0;         // largest R with u >= 0 on the ball at x_h
    bool radius_capped = false;  // limited by the domain, not by a sign change
};

// Nearest cell to `anchor` with u >= 1 - h_level (ties broken by smallest
// cell index), and the largest ball around it on which u stays nonnegative.
NearPlusOneReport find_near_plus_one(const Field& u, double h_level,
                                     std::array<double, 3> anchor);

struct SlidingReport {
    bool contact = false;
    int step = -1;
    std::array<double, 3> center{};
    std::size_t cell = 0;
    double u_value = 0.0;
    double v_value = 0.0;
    bool trivial_ordering = false;    // u stayed below the profile floor s0
    bool ordering_violation = false;  // clean slide ending above the floor
};

// Translates the radialized supersolution profile along x0 -> x1 in steps
// of at most the grid spacing and reports the first cell where u meets or
// exceeds the translated profile inside its support ball.
SlidingReport sliding_supersolution_test(const Field& u, const Profile1D& prof, double r,
                                         std::array<double, 3> x0, std::array<double, 3> x1);

// Radial extension v(x) = U(|x - center| - r) of a sampled profile, with
// the profile's flat plateaus outside [a, b].
Field radial_field(const Grid& g, const Profile1D& prof, std::array<double, 3> center, double r);

} // namespace glpm
