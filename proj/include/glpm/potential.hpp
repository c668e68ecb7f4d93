#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>

#include "glpm/params.hpp"

namespace glpm {

enum class PotentialKind { model, custom };

// Double-well potential W on [-1,1] with W(+-1) = 0 and W > 0 inside.
// The model kind is W(tau) = (1 - tau^2)^m exactly; custom kinds carry an
// evaluator pair, either analytic or backed by a tabulated cubic Hermite.
class Potential {
public:
    static Potential model(double m);
    static Potential custom(double m, std::function<double(double)> w,
                            std::function<double(double)> dw);
    // Tabulated (tau, W, dW) triples; the derivative evaluator is the exact
    // derivative of the value interpolant so the pair stays consistent.
    static Potential from_table(double m, std::vector<double> tau, std::vector<double> w,
                                std::vector<double> dw);
    // CSV with header "tau,W,dW".
    static Potential from_csv(double m, const std::string& path);

    // W(tau); throws domain_error for |tau| > 1.
    double operator()(double tau) const;
    // W'(tau); throws domain_error for |tau| >= 1.
    double deriv(double tau) const;
    // Continuous extension of W' to [-1,1]; the opt-in for callers (obstacle
    // projection, clamped fields) that need a defined forcing at tau = +-1.
    double deriv_extended(double tau) const;

    double m() const { return m_; }
    PotentialKind kind() const { return kind_; }

private:
    Potential() = default;

    PotentialKind kind_ = PotentialKind::model;
    double m_ = 2.0;
    std::function<double(double)> w_, dw_;
};

// One growth-ratio condition evaluated on a sample grid.
struct RatioCondition {
    double ratio_min = std::numeric_limits<double>::infinity();
    double ratio_max = -std::numeric_limits<double>::infinity();
    double arg_min = 0.0;   // sample attaining ratio_min
    double arg_max = 0.0;   // sample attaining ratio_max
    double lambda = 0.0;    // bounds the condition was checked against
    double Lambda = 0.0;
    bool pass = false;
};

struct AdmissibilityReport {
    RatioCondition well;    // W(tau) / (1-tau^2)^m on (-1,1)
    RatioCondition slope;   // -W'(tau) / ((1-tau^2)^{m-1} sgn tau) on (-1,-1/2) u (1/2,1)
    int samples = 0;
    bool pass = false;
};

// Samples both ratio conditions on uniform interior grids. The well ratio is
// gated on [params.lambda, params.Lambda]. The slope ratio is reported with
// its own observed constants; it is gated on [slope_lambda, slope_Lambda],
// which default to a pure sign/positivity check because the two conditions
// generally need different constants (the model slope ratio is 2m|tau|).
AdmissibilityReport check_admissible(
    const Potential& P, const EnergyParams& params, int samples,
    double slope_lambda = 0.0,
    double slope_Lambda = std::numeric_limits<double>::infinity());

} // namespace glpm
