#include "glpm/profile1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "glpm/numerics.hpp"
#include "glpm/quadrature.hpp"

namespace glpm {

namespace {

void require_slow_decay(double p, double m, const char* what) {
    if (!(p > 1.0)) throw validation_error(std::string(what) + ": need p > 1");
    if (!(m > p)) throw validation_error(std::string(what) + ": need m > p");
}

} // namespace

void Profile1D::finalize() {
    interp_ = std::make_shared<const CubicHermite>(CubicHermite::with_slopes(t, u, du));
}

double Profile1D::eval(double tq) const {
    return interp_->eval(tq);
}

double Profile1D::eval_slope(double tq) const {
    if (tq <= t.front()) return du.front();
    if (tq >= t.back()) return du.back();
    return interp_->deriv(tq);
}

double comparison_value(double p, double m, double t) {
    require_slow_decay(p, m, "comparison_profile");
    if (t >= 1.0) return 1.0;
    if (t >= 0.0) return t;
    const double beta = p / (m - p);
    return -1.0 + std::pow(1.0 - t, -beta);
}

double comparison_slope(double p, double m, double t) {
    require_slow_decay(p, m, "comparison_profile");
    if (t >= 1.0) return 0.0;
    if (t >= 0.0) return 1.0;
    const double beta = p / (m - p);
    return beta * std::pow(1.0 - t, -beta - 1.0);
}

Profile1D comparison_profile(double p, double m, std::span<const double> t_grid) {
    require_slow_decay(p, m, "comparison_profile");
    Profile1D prof;
    prof.kind = ProfileKind::comparison;
    prof.meta.p = p;
    prof.meta.m = m;
    prof.meta.s0 = -1.0;
    prof.meta.s1 = 1.0;
    prof.t.assign(t_grid.begin(), t_grid.end());
    std::sort(prof.t.begin(), prof.t.end());
    prof.u.resize(prof.t.size());
    prof.du.resize(prof.t.size());
    for (std::size_t i = 0; i < prof.t.size(); ++i) {
        prof.u[i] = comparison_value(p, m, prof.t[i]);
        prof.du[i] = comparison_slope(p, m, prof.t[i]);
    }
    prof.finalize();
    return prof;
}

double tail_energy(double p, double m, double T, const Potential& P) {
    require_slow_decay(p, m, "tail_energy");
    if (!(T >= 1.0)) throw validation_error("tail_energy: need T >= 1");
    const double beta = p / (m - p);
    const double q = p * m / (m - p); // both densities decay like s^{-q}
    const double S0 = 1.0 + T;
    // Substitute s = S0/xi to map the half line onto (0, 1]. The transformed
    // integrand behaves like xi^{q-2} near 0, integrable since q > 1.
    auto g = [&](double xi) {
        const double s = S0 / xi;
        const double w = std::pow(s, -beta); // 1 + U
        const double grad_term = std::pow(beta, p) * std::pow(s, -q);
        const double well_term = P(-1.0 + w);
        return (grad_term + well_term) * S0 / (xi * xi);
    };
    const double alpha_lo = std::max(0.0, 2.0 - q);
    return integrate_endpoint_singular(g, 0.0, 1.0, alpha_lo, 0.0, 1e-11);
}

namespace {

// Inverse-function lattice for the heteroclinic profile: strictly increasing
// s-nodes on (-1, 1) (or [-1, 1] when the wells are reached), with the
// cumulative time t(s) integrated panel by panel.
struct InverseLattice {
    std::vector<double> s, t;
    double p = 2.0;
    const Potential* P = nullptr;

    double speed(double tau) const { // dt/ds
        return std::pow((*P)(tau) / (p - 1.0), -1.0 / p);
    }
};

InverseLattice build_heteroclinic_lattice(double p, const Potential& P) {
    InverseLattice lat;
    lat.p = p;
    lat.P = &P;

    // Sanity: the first-integral speed needs W > 0 strictly inside.
    for (int k = 1; k < 64; ++k) {
        const double tau = -1.0 + 2.0 * k / 64.0;
        if (!(P(tau) > 0.0))
            throw validation_error("heteroclinic_profile: W vanishes in the interior");
    }

    const bool finite_walls = P.m() < p; // integrable wall approach
    const double core = 0.9, w_min = finite_walls ? 1e-10 : 1e-13;
    std::vector<double> nodes;
    for (int k = -90; k <= 90; ++k) nodes.push_back(k / 100.0); // exact 0 node
    const double ratio = 0.8;
    for (double w = 1.0 - core; w > w_min; w *= ratio) {
        nodes.push_back(-1.0 + w * ratio);
        nodes.push_back(1.0 - w * ratio);
    }
    if (finite_walls) {
        nodes.push_back(-1.0);
        nodes.push_back(1.0);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    lat.s = std::move(nodes);

    // Cumulative t with t(0) = 0; node layout guarantees s = 0 is present.
    const auto zero_it = std::lower_bound(lat.s.begin(), lat.s.end(), 0.0);
    const std::size_t iz = static_cast<std::size_t>(zero_it - lat.s.begin());
    lat.t.assign(lat.s.size(), 0.0);
    auto f = [&](double tau) { return lat.speed(tau); };
    const double alpha_wall = P.m() / p;
    for (std::size_t i = iz; i + 1 < lat.s.size(); ++i) {
        double seg;
        if (finite_walls && i + 2 == lat.s.size())
            seg = integrate_endpoint_singular(f, lat.s[i], lat.s[i + 1], 0.0, alpha_wall, 1e-12,
                                              1e-13);
        else
            seg = integrate_adaptive(f, lat.s[i], lat.s[i + 1], 1e-12);
        lat.t[i + 1] = lat.t[i] + seg;
    }
    for (std::size_t i = iz; i > 0; --i) {
        double seg;
        if (finite_walls && i == 1)
            seg = integrate_endpoint_singular(f, lat.s[0], lat.s[1], alpha_wall, 0.0, 1e-12,
                                              1e-13);
        else
            seg = integrate_adaptive(f, lat.s[i - 1], lat.s[i], 1e-12);
        lat.t[i - 1] = lat.t[i] - seg;
    }
    return lat;
}

// Solve t(s) = tq within the bracketing lattice panel by safeguarded Newton
// on the local quadrature increment.
double invert_lattice(const InverseLattice& lat, double tq) {
    if (tq <= lat.t.front()) return lat.s.front();
    if (tq >= lat.t.back()) return lat.s.back();
    const auto it = std::upper_bound(lat.t.begin(), lat.t.end(), tq);
    const std::size_t i = static_cast<std::size_t>(it - lat.t.begin()) - 1;
    double lo = lat.s[i], hi = lat.s[i + 1];
    double t_lo = lat.t[i]; // t(lo), updated as the bracket shrinks
    auto f = [&](double tau) { return lat.speed(tau); };
    double s = lo + (hi - lo) * (tq - t_lo) / (lat.t[i + 1] - t_lo);
    for (int iter = 0; iter < 60; ++iter) {
        const double r = t_lo + integrate_adaptive(f, lo, s, 1e-13) - tq; // t(s) - tq
        if (std::abs(r) < 1e-13 * std::max(1.0, std::abs(tq))) break;
        if (r > 0.0) {
            hi = s;
        } else {
            t_lo = tq + r;
            lo = s;
        }
        // Newton step with bisection fallback.
        double next = s - r / lat.speed(s);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        s = next;
    }
    return s;
}

} // namespace

Profile1D heteroclinic_profile(double p, const Potential& P, std::span<const double> t_grid) {
    if (!(p > 1.0)) throw validation_error("heteroclinic_profile: need p > 1");
    InverseLattice lat = build_heteroclinic_lattice(p, P);

    Profile1D prof;
    prof.kind = ProfileKind::heteroclinic;
    prof.meta.p = p;
    prof.meta.m = P.m();
    prof.meta.s0 = -1.0;
    prof.meta.s1 = 1.0;
    if (P.m() < p) {
        prof.meta.a = lat.t.front();
        prof.meta.b = lat.t.back();
    }
    prof.t.assign(t_grid.begin(), t_grid.end());
    std::sort(prof.t.begin(), prof.t.end());
    prof.u.resize(prof.t.size());
    prof.du.resize(prof.t.size());
    for (std::size_t i = 0; i < prof.t.size(); ++i) {
        const double s = invert_lattice(lat, prof.t[i]);
        prof.u[i] = s;
        const double w = std::abs(s) < 1.0 ? P(s) : 0.0;
        prof.du[i] = std::pow(w / (p - 1.0), 1.0 / p);
    }
    prof.finalize();
    return prof;
}

namespace {

struct OffsetScan {
    bool feasible = false;
    double s0 = 0.0, s1 = 0.0;
};

// Roots of F(tau) = W(tau) - eps*tau - eta_mag nearest zero on both sides,
// located by scan + bisection.
OffsetScan scan_offset(const Potential& P, double p, double eps, double eta_mag, double h_level) {
    (void)p;
    OffsetScan out;
    auto F = [&](double tau) { return P(tau) - eps * tau - eta_mag; };
    if (!(F(0.0) > 0.0)) return out;
    if (!(F(-1.0) < 0.0)) return out; // no transversal root on the negative side

    const int K = 4096;
    auto bisect = [&](double lo, double hi) {
        // sign(F(lo)) < 0 < sign(F(hi)) or vice versa; returns the root
        double flo = F(lo);
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = F(mid);
            if (fm == 0.0) return mid;
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
            if (std::abs(hi - lo) < 1e-15) break;
        }
        return 0.5 * (lo + hi);
    };

    double s0 = 0.0;
    bool found0 = false;
    for (int k = 1; k <= K; ++k) {
        const double tau = -static_cast<double>(k) / K;
        if (F(tau) < 0.0) {
            s0 = bisect(tau, tau + 1.0 / K);
            found0 = true;
            break;
        }
    }
    if (!found0) return out;
    double s1 = 1.0;
    bool found1 = false;
    for (int k = 1; k <= K; ++k) {
        const double tau = static_cast<double>(k) / K;
        if (F(tau) < 0.0) {
            s1 = bisect(tau, tau - 1.0 / K);
            found1 = true;
            break;
        }
    }
    if (!found1) return out;

    if (!(s1 >= 1.0 - h_level)) return out;
    // transversal crossings: the well slope must clear the line slope
    if (std::abs(P.deriv(s0) - eps) < eps / 10.0) return out;
    if (std::abs(P.deriv(s1) - eps) < eps / 10.0) return out;
    out.feasible = true;
    out.s0 = s0;
    out.s1 = s1;
    return out;
}

} // namespace

Profile1D supersolution_profile(double h_level, double p, const Potential& P, double epsilon) {
    if (!(h_level > 0.0 && h_level < 1.0))
        throw validation_error("supersolution_profile: h_level must lie in (0, 1)");
    if (!(p > 1.0)) throw validation_error("supersolution_profile: need p > 1");
    if (!(epsilon > 0.0)) throw validation_error("supersolution_profile: need epsilon > 0");

    const double W0 = P(0.0);

    // Smallest offset magnitude for which both transversal roots exist and
    // s1 still clears 1 - h_level. Coarse scan, then bisection onto the
    // feasibility boundary.
    const int KC = 512;
    double eta_feasible = -1.0;
    int k_feasible = -1;
    for (int k = 1; k <= KC; ++k) {
        const double eta = W0 * k / (KC + 1.0);
        if (scan_offset(P, p, epsilon, eta, h_level).feasible) {
            eta_feasible = eta;
            k_feasible = k;
            break;
        }
    }
    if (k_feasible < 0)
        throw validation_error(
            "supersolution_profile: no offset in [0, W(0)] gives transversal roots bracketing "
            "[0, 1-h]; epsilon too large or too small for this potential");
    double lo = W0 * (k_feasible - 1) / (KC + 1.0);
    double hi = eta_feasible;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (scan_offset(P, p, epsilon, mid, h_level).feasible)
            hi = mid;
        else
            lo = mid;
        if (hi - lo < 1e-12 * W0) break;
    }
    const double eta_mag = hi;
    OffsetScan roots = scan_offset(P, p, epsilon, eta_mag, h_level);

    auto F = [&](double tau) { return P(tau) - epsilon * tau - eta_mag; };
    auto speed_inv = [&](double tau) { // dt/ds = ((F)/(p-1))^{-1/p}
        return std::pow(std::max(F(tau), 0.0) / (p - 1.0), -1.0 / p);
    };

    // Graded nodes clustering at both flat ends, with s = 0 inserted.
    const int K = 512;
    std::vector<double> s_nodes;
    s_nodes.reserve(K + 2);
    for (int k = 0; k <= K; ++k) {
        const double xi = 0.5 * (1.0 - std::cos(std::numbers::pi * k / K));
        s_nodes.push_back(roots.s0 + (roots.s1 - roots.s0) * xi);
    }
    s_nodes.push_back(0.0);
    std::sort(s_nodes.begin(), s_nodes.end());
    s_nodes.erase(std::unique(s_nodes.begin(), s_nodes.end()), s_nodes.end());

    const std::size_t iz =
        static_cast<std::size_t>(std::lower_bound(s_nodes.begin(), s_nodes.end(), 0.0) -
                                 s_nodes.begin());
    std::vector<double> t_nodes(s_nodes.size(), 0.0);
    const double alpha = 1.0 / p;
    for (std::size_t i = iz; i + 1 < s_nodes.size(); ++i) {
        const bool last = (i + 2 == s_nodes.size());
        t_nodes[i + 1] =
            t_nodes[i] + (last ? integrate_endpoint_singular(speed_inv, s_nodes[i], s_nodes[i + 1],
                                                             0.0, alpha, 1e-11, 1e-11)
                               : integrate_adaptive(speed_inv, s_nodes[i], s_nodes[i + 1], 1e-11));
    }
    for (std::size_t i = iz; i > 0; --i) {
        const bool first = (i == 1);
        t_nodes[i - 1] =
            t_nodes[i] - (first ? integrate_endpoint_singular(speed_inv, s_nodes[0], s_nodes[1],
                                                              alpha, 0.0, 1e-11, 1e-11)
                                : integrate_adaptive(speed_inv, s_nodes[i - 1], s_nodes[i], 1e-11));
    }

    Profile1D prof;
    prof.kind = ProfileKind::supersolution;
    prof.meta.p = p;
    prof.meta.m = P.m();
    prof.meta.epsilon = epsilon;
    prof.meta.eta = -eta_mag; // signed first-integral constant
    prof.meta.s0 = roots.s0;
    prof.meta.s1 = roots.s1;
    prof.meta.a = t_nodes.front();
    prof.meta.b = t_nodes.back();
    prof.t = std::move(t_nodes);
    prof.u = std::move(s_nodes);
    prof.du.resize(prof.u.size());
    for (std::size_t i = 0; i < prof.u.size(); ++i) {
        const double Fi = (i == 0 || i + 1 == prof.u.size()) ? 0.0 : std::max(F(prof.u[i]), 0.0);
        prof.du[i] = std::pow(Fi / (p - 1.0), 1.0 / p);
    }
    prof.finalize();
    return prof;
}

double fit_decay_exponent(const Profile1D& prof, double t_lo, double t_hi) {
    if (!(t_lo < t_hi) || t_hi >= 0.0)
        throw validation_error("fit_decay_exponent: window must satisfy t_lo < t_hi < 0");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < prof.t.size(); ++i) {
        const double ti = prof.t[i];
        if (ti < t_lo || ti > t_hi) continue;
        const double w = 1.0 + prof.u[i];
        if (!(w > 0.0))
            throw validation_error("fit_decay_exponent: 1 + u must stay positive on the window");
        x.push_back(std::log(1.0 - ti));
        y.push_back(std::log(w));
    }
    if (x.size() < 8)
        throw validation_error("fit_decay_exponent: fewer than 8 samples in the window");
    return -least_squares_line(x, y).slope;
}

double supersolution_min_radius(const Profile1D& prof, int n) {
    if (prof.kind != ProfileKind::supersolution)
        throw validation_error("supersolution_min_radius: supersolution profile required");
    if (n < 1 || n > 3) throw validation_error("supersolution_min_radius: n must be 1..3");
    double flux_max = 0.0;
    for (double d : prof.du) flux_max = std::max(flux_max, std::pow(d, prof.meta.p - 1.0));
    const double r =
        -prof.meta.a + prof.meta.p * (n - 1) * flux_max / prof.meta.epsilon;
    return std::max(r, 1.0);
}

} // namespace glpm
