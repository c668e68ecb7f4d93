#include "glpm/potential.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "glpm/interp.hpp"
#include "glpm/numerics.hpp"

namespace glpm {

Potential Potential::model(double m) {
    if (!(m > 0.0)) throw validation_error("Potential::model: m must be > 0");
    Potential P;
    P.kind_ = PotentialKind::model;
    P.m_ = m;
    return P;
}

Potential Potential::custom(double m, std::function<double(double)> w,
                            std::function<double(double)> dw) {
    if (!(m > 0.0)) throw validation_error("Potential::custom: m must be > 0");
    if (!w || !dw) throw validation_error("Potential::custom: evaluators required");
    Potential P;
    P.kind_ = PotentialKind::custom;
    P.m_ = m;
    P.w_ = std::move(w);
    P.dw_ = std::move(dw);
    // Well shape sanity at the data we can reach cheaply.
    if (std::abs(P.w_(1.0)) > 1e-9 || std::abs(P.w_(-1.0)) > 1e-9)
        throw validation_error("Potential::custom: W must vanish at tau = +-1");
    return P;
}

Potential Potential::from_table(double m, std::vector<double> tau, std::vector<double> w,
                                std::vector<double> dw) {
    if (tau.size() < 4) throw validation_error("Potential::from_table: need >= 4 rows");
    if (std::abs(tau.front() + 1.0) > 1e-12 || std::abs(tau.back() - 1.0) > 1e-12)
        throw validation_error("Potential::from_table: tau column must span [-1, 1]");
    auto interp = std::make_shared<CubicHermite>(
        CubicHermite::with_slopes(std::move(tau), std::move(w), std::move(dw)));
    return custom(
        m, [interp](double t) { return interp->eval(t); },
        [interp](double t) { return interp->deriv(t); });
}

Potential Potential::from_csv(double m, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("Potential::from_csv: cannot open " + path);
    std::vector<double> tau, w, dw;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream row(line);
        std::string a, b, c;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c))
            throw validation_error("Potential::from_csv: expected 3 columns tau,W,dW");
        if (tau.empty() && (a == "tau" || a == "t")) continue; // header
        tau.push_back(std::stod(a));
        w.push_back(std::stod(b));
        dw.push_back(std::stod(c));
    }
    return from_table(m, std::move(tau), std::move(w), std::move(dw));
}

double Potential::operator()(double tau) const {
    if (std::abs(tau) > 1.0) throw domain_error("Potential: W evaluated outside [-1, 1]");
    if (kind_ == PotentialKind::model) {
        const double s = 1.0 - tau * tau;
        return pow_fast(s, m_);
    }
    return w_(tau);
}

double Potential::deriv(double tau) const {
    if (std::abs(tau) >= 1.0) throw domain_error("Potential: W' evaluated outside (-1, 1)");
    if (kind_ == PotentialKind::model) {
        const double s = 1.0 - tau * tau;
        return -2.0 * m_ * tau * pow_fast(s, m_ - 1.0);
    }
    return dw_(tau);
}

double Potential::deriv_extended(double tau) const {
    if (std::abs(tau) > 1.0) throw domain_error("Potential: W' extension evaluated outside [-1, 1]");
    if (std::abs(tau) < 1.0) return deriv(tau);
    if (kind_ == PotentialKind::model) {
        if (m_ > 1.0) return 0.0;              // degenerate well: one-sided derivative vanishes
        if (m_ == 1.0) return -2.0 * tau;      // classical quadratic well
        throw domain_error("Potential: W' has no continuous extension to tau = +-1 for m < 1");
    }
    return dw_(tau);
}

AdmissibilityReport check_admissible(const Potential& P, const EnergyParams& params, int samples,
                                     double slope_lambda, double slope_Lambda) {
    if (samples < 2) throw validation_error("check_admissible: samples must be >= 2");
    AdmissibilityReport rep;
    rep.samples = samples;

    const double m = params.m;
    auto record = [](RatioCondition& c, double ratio, double tau) {
        if (ratio < c.ratio_min) {
            c.ratio_min = ratio;
            c.arg_min = tau;
        }
        if (ratio > c.ratio_max) {
            c.ratio_max = ratio;
            c.arg_max = tau;
        }
    };

    // Well growth on (-1,1): sample cell midpoints so the endpoints, where
    // both numerator and denominator vanish, are never touched.
    for (int k = 0; k < samples; ++k) {
        const double tau = -1.0 + 2.0 * (k + 0.5) / samples;
        const double denom = pow_fast(1.0 - tau * tau, m);
        record(rep.well, P(tau) / denom, tau);
    }

    // Outer slope condition on (-1,-1/2) u (1/2,1).
    const int half = samples / 2 + 1;
    for (int side = 0; side < 2; ++side) {
        for (int k = 0; k < half; ++k) {
            const double a = 0.5 + 0.5 * (k + 0.5) / half;
            const double tau = side == 0 ? -a : a;
            const double denom = pow_fast(1.0 - tau * tau, m - 1.0) * (tau > 0 ? 1.0 : -1.0);
            record(rep.slope, -P.deriv(tau) / denom, tau);
        }
    }

    const double tol = 1e-9;
    rep.well.lambda = params.lambda;
    rep.well.Lambda = params.Lambda;
    rep.well.pass = rep.well.ratio_min >= params.lambda * (1.0 - tol) &&
                    rep.well.ratio_max <= params.Lambda * (1.0 + tol);
    rep.slope.lambda = slope_lambda;
    rep.slope.Lambda = slope_Lambda;
    rep.slope.pass = rep.slope.ratio_min >= slope_lambda * (1.0 - tol) &&
                     rep.slope.ratio_max <= slope_Lambda * (1.0 + tol) &&
                     rep.slope.ratio_min > 0.0;
    rep.pass = rep.well.pass && rep.slope.pass;
    return rep;
}

} // namespace glpm
