#pragma once

#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "glpm/interp.hpp"
#include "glpm/potential.hpp"

namespace glpm {

enum class ProfileKind { comparison, heteroclinic, supersolution };

// A sampled monotone one-dimensional profile together with the constants
// that produced it. For the supersolution kind, [a, b] is the finite
// interval on which the profile increases from s0 to s1 with flat one-sided
// derivatives at both ends; eta is the signed first-integral constant
// (p-1)(U')^p - W(U) + eps*U.
class Profile1D {
public:
    ProfileKind kind = ProfileKind::comparison;
    std::vector<double> t, u, du;

    struct Meta {
        double p = 0.0, m = 0.0;
        double epsilon = 0.0, eta = 0.0;
        double s0 = -1.0, s1 = 1.0;
        double a = -std::numeric_limits<double>::infinity();
        double b = std::numeric_limits<double>::infinity();
    } meta;

    // Monotone interpolation of the samples; clamps to the end values
    // outside the sampled range.
    double eval(double tq) const;
    double eval_slope(double tq) const;

    void finalize(); // build the interpolant; called by the factory functions

private:
    std::shared_ptr<const CubicHermite> interp_;
};

// Piecewise comparison profile: identity ramp on [0,1] (clamped to 1 above)
// and the polynomial tail -1 + (1-t)^{-p/(m-p)} for t <= 0. Requires m > p.
double comparison_value(double p, double m, double t);
double comparison_slope(double p, double m, double t);
Profile1D comparison_profile(double p, double m, std::span<const double> t_grid);

// Energy of the comparison profile on (-inf, -T]: integral of |U'|^p + W(U).
// Requires m > p and T >= 1.
double tail_energy(double p, double m, double T, const Potential& P);

// Monotone connection between the wells, normalized by U(0) = 0, built by
// quadrature of the inverse function t(s) = int_0^s (W/(p-1))^{-1/p} and
// monotone inversion onto t_grid. For m < p the wells are reached at finite
// t (reported in meta.a/meta.b); for m >= p they are asymptotic.
Profile1D heteroclinic_profile(double p, const Potential& P, std::span<const double> t_grid);

// Increasing profile solving p((U')^{p-1})' = W'(U) - epsilon on a finite
// interval [a, b], with U(0) = 0, U' = 0 at both ends and s1 >= 1 - h_level.
// The offset constant is searched so that W(tau) - eps*tau + eta has
// transversal roots s0 < 0 < s1 bracketing [0, 1-h_level].
Profile1D supersolution_profile(double h_level, double p, const Potential& P, double epsilon);

// Least-squares slope of log(1+U) against log(1-t) over the window, negated.
// Requires the window to lie in {t < 0} and to contain >= 8 samples.
double fit_decay_exponent(const Profile1D& prof, double t_lo, double t_hi);

// Smallest rotation radius at which the curvature term of the radial
// operator is conservatively dominated by the epsilon margin of a
// supersolution profile in dimension n.
double supersolution_min_radius(const Profile1D& prof, int n);

} // namespace glpm
