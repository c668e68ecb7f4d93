#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace glpm {

// 15-point Gauss-Kronrod rule with embedded 7-point Gauss error estimate.
double gauss_kronrod_15(const std::function<double(double)>& f, double a, double b,
                        double* abs_err = nullptr);

// Adaptive bisection on [a, b] until the local error estimate drops below
// rel_tol * |integral| + abs_tol.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-12, double abs_tol = 0.0, int max_intervals = 4000);

// Integrand behaving like (x-a)^{-alpha_lo} near a and (b-x)^{-alpha_hi}
// near b with 0 <= alpha < 1. Each singular end is folded out by the
// substitution x = a + xi^{1/(1-alpha)}, after which the integrand is
// bounded and the adaptive rule applies. The transformed integrand is
// frozen once the distance to the singular endpoint drops below
// `min_offset` (defaults to 1e-13 of the interval), where the evaluation
// of f would be dominated by cancellation; with exactly matching alpha the
// transformed integrand is locally constant there.
double integrate_endpoint_singular(const std::function<double(double)>& f, double a, double b,
                                   double alpha_lo, double alpha_hi, double rel_tol = 1e-12,
                                   double min_offset = -1.0);

// Gauss-Legendre nodes/weights on [a, b].
struct QuadNodes {
    std::vector<double> x, w;
};
QuadNodes gauss_legendre(int n, double a, double b);

} // namespace glpm
