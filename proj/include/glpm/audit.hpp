#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "glpm/grid.hpp"

namespace glpm {

// Per-integer-radius measurements around a center: V[R] is the volume of
// the nonneg phase inside B_R, P[R] the potential mass, M[R] the weighted
// window mixture over the last T+1 radii. Arrays are indexed by R from 0 to
// R_max; M entries below R = T are NaN.
struct AuditSequences {
    int R_max = 0;
    int T = 0;
    double q = std::numeric_limits<double>::quiet_NaN();
    double gamma = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> V, P, M;
};

AuditSequences volume_potential_sequences(const Field& u, std::array<double, 3> center,
                                          int R_max, const EnergyParams& params,
                                          const Potential& P);

// M[R] = sum_{j=0..T} (P[R-j] + V[R-j] (1+j)^{-q}), q = pm/(m-p). Entries
// with R < T are NaN. Requires m > p.
std::vector<double> mixture_sequence(std::span<const double> V, std::span<const double> P, int T,
                                     double p, double m);

// Convenience: sequences plus their mixture for a given window length.
AuditSequences audit_sequences(const Field& u, std::array<double, 3> center, int R_max, int T,
                               const EnergyParams& params, const Potential& P);

// Radial comparison-profile competitor at integer radius R with its contact
// set and a quadrature ladder of level sets.
struct CompetitorSet {
    int R = 0;
    int T = 0;
    std::array<double, 3> center{};
    Field v;                          // U(|x - center| - R)
    Region S;                         // {u > v} within B_{R+1}
    double level_lo = 0.0;            // U(-T)
    std::vector<double> levels;       // quadrature nodes in [U(-T), 1)
    std::vector<double> level_weights;
    std::vector<std::size_t> level_counts; // cells with u > h_k > v
};

CompetitorSet build_competitor(const Field& u, std::array<double, 3> center, int R, int T,
                               const EnergyParams& params);

// Materialized contact set {u > h > v} within B_{R+1} for one level.
Region level_region(const Field& u, const CompetitorSet& comp, double h_level);

// Level integral int |S_{R,h}|^{(n-1)/n} W(h)^{(p-1)/p} dh over the ladder
// (lhs) against the competitor energy on the contact set (rhs).
std::pair<double, double> coarea_functional(const Field& u, const CompetitorSet& comp,
                                            const EnergyParams& params, const Potential& P);

struct MainInequalityRecord {
    int R = 0;
    int T = 0;
    double lhs = 0.0;   // (V_{R-T})^{(n-1)/n}
    double rhs = 0.0;   // J(v_R, S_R)
    double ratio = 0.0; // rhs / lhs
    double core = 0.0;      // J(v_R, S_R intersect B_{R-T})
    double core_ref = 0.0;  // R^{n-1} T^{-gamma}
    struct Annulus {
        int j;
        double energy; // J(v_R, S_R intersect (B_{R+1-j} \ B_{R-j}))
        double bound;  // (P_{R+1-j}-P_{R-j}) + (V_{R+1-j}-V_{R-j})(1+j)^{-q}
    };
    std::vector<Annulus> annuli;
};

MainInequalityRecord main_inequality_report(const Field& u, std::array<double, 3> center, int R,
                                            int T, const EnergyParams& params,
                                            const Potential& P);

// Growth inequality c1 [(M_{R-T} - C0 T R^{n-1})^+]^{(n-1)/n}
//                      <= R^{n-1} T^{-gamma} + M_{R+1} - M_R
// for every admissible integer R. NaN constants request a fit: C0 from the
// potential-mass scaling max P_R/R^{n-1} (window-adjusted), c1 as the
// largest constant passing every row.
struct DiscreteInequalityReport {
    double c1 = 0.0;
    double C0 = 0.0;
    bool c1_fitted = false;
    bool C0_fitted = false;
    bool degenerate = false; // no row had a positive clipped base
    bool all_pass = false;
    struct Row {
        int R;
        double base;  // (M_{R-T} - C0 T R^{n-1})^+
        double lhs;   // c1 * base^{(n-1)/n}
        double rhs;   // R^{n-1} T^{-gamma} + M_{R+1} - M_R
        double slack; // rhs - lhs
        bool pass;
    };
    std::vector<Row> rows;
};

DiscreteInequalityReport discrete_inequality_check(
    const AuditSequences& seq, int n,
    double c1 = std::numeric_limits<double>::quiet_NaN(),
    double C0 = std::numeric_limits<double>::quiet_NaN());

// Worst-case propagation of the growth inequality: every step assigns the
// minimal M_{R+1} it allows and checks that the window lower bound
// M_r >= sigma r^n survives.
struct InductionTrace {
    double rho1 = 0.0;        // 2^{n+1} C0 T / sigma
    bool hypothesis_met = false; // seed radius >= rho1
    bool maintained = false;     // lower bound held to R_stop
    int first_ind_violation = -1;   // radius where M_r < sigma r^n first failed
    int first_chain_violation = -1; // radius where M_{R-T} - C0 T R^{n-1} < (sigma/2)(R/2)^n
    struct Step {
        int R;             // radius being advanced
        double M;          // M_R
        double base;       // M_{R-T} - C0 T R^{n-1}
        double chain_need; // (sigma/2) (R/2)^n
        double increment;  // minimal M_{R+1} - M_R
        double step_need;  // sigma ((R+1)^n - R^n)
        bool ind_ok;       // M_{R+1} >= sigma (R+1)^n
    };
    std::vector<Step> steps;
};

InductionTrace induction_simulator(int n, double sigma, int T, double C0, double c1, double gamma,
                                   std::span<const double> M_init, int R_seed, int R_stop);

// Phase fractions |B_R cap {u >= 0}| / R^n and |B_R cap {u <= 0}| / R^n per
// integer radius, with the worst fraction over R >= R0.
struct DensityReport {
    int R0 = 0;
    int R_max = 0;
    double delta = 0.0;
    bool center_is_zero = false;
    bool plus_vanishing = false;
    bool minus_vanishing = false;
    struct Row {
        int R;
        double frac_plus;
        double frac_minus;
    };
    std::vector<Row> rows;
};

DensityReport density_report(const Field& u, std::array<double, 3> center, int R0, int R_max,
                             const EnergyParams& params);

} // namespace glpm
