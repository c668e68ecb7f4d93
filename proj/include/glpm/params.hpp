#pragma once

#include <cmath>

#include "glpm/errors.hpp"

namespace glpm {

// Structural constants of the energy: dimension, exponents, growth bounds,
// quasi-minimality factor and the gradient regularization knob.
struct EnergyParams {
    int n = 1;               // spatial dimension, 1..3
    double p = 2.0;          // gradient exponent, > 1
    double m = 2.0;          // well degeneracy exponent, > 0
    double lambda = 1.0;     // lower growth constant
    double Lambda = 1.0;     // upper growth constant
    double Q = 1.0;          // quasi-minimality factor, >= 1
    double eps_reg = -1.0;   // gradient regularization; < 0 selects the default

    // Effective regularization: defaults depend on whether |grad u|^{p-2}
    // is singular at critical points.
    double grad_eps() const { return eps_reg >= 0.0 ? eps_reg : (p >= 2.0 ? 1e-8 : 1e-4); }

    // q = pm/(m-p); the decay exponent of both energy densities along the
    // slow profile tail. Requires m > p.
    double q() const { return p * m / (m - p); }
    double gamma() const { return q() - 1.0; }

    // The density-estimate machinery needs the slow-decay regime m > p.
    bool slow_decay_regime() const { return m > p; }

    void validate() const {
        if (n < 1 || n > 3) throw validation_error("EnergyParams: dimension n must be 1, 2 or 3");
        if (!(p > 1.0)) throw validation_error("EnergyParams: exponent p must be > 1");
        if (!(m > 0.0)) throw validation_error("EnergyParams: exponent m must be > 0");
        if (!(lambda > 0.0) || !(Lambda > 0.0) || lambda > Lambda)
            throw validation_error("EnergyParams: need 0 < lambda <= Lambda");
        if (Q < 1.0) throw validation_error("EnergyParams: Q must be >= 1");
        if (eps_reg >= 0.0 && std::isnan(eps_reg))
            throw validation_error("EnergyParams: eps_reg must be a number");
    }

    void require_slow_decay(const char* what) const {
        if (!slow_decay_regime())
            throw validation_error(std::string(what) + " requires m > p (got m <= p)");
    }
};

} // namespace glpm
