#include "glpm/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "glpm/numerics.hpp"

namespace glpm {

BoundaryCondition BoundaryCondition::axis_dirichlet(int axis, double lo, double hi) {
    if (axis < 0 || axis > 2) throw validation_error("BoundaryCondition: axis must be 0..2");
    if (std::abs(lo) > 1.0 || std::abs(hi) > 1.0)
        throw validation_error("BoundaryCondition: dirichlet values must lie in [-1, 1]");
    BoundaryCondition bc;
    bc.face[axis][0] = {FaceType::dirichlet, lo};
    bc.face[axis][1] = {FaceType::dirichlet, hi};
    return bc;
}

namespace {

// Pin mask: 1 where the value is held fixed by the boundary data.
std::vector<std::uint8_t> pinned_mask(const Grid& g, const BoundaryCondition& bc) {
    std::vector<std::uint8_t> pin(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto c = g.unravel(i);
        for (int a = 0; a < g.n; ++a) {
            if (c[a] == 0 && bc.face[a][0].type == FaceType::dirichlet) pin[i] = 1;
            if (c[a] == g.shape[a] - 1 && bc.face[a][1].type == FaceType::dirichlet) pin[i] = 1;
        }
    }
    if (!bc.frozen.empty()) {
        if (bc.frozen.size() != g.size())
            throw validation_error("BoundaryCondition: frozen mask size mismatch");
        for (std::size_t i = 0; i < g.size(); ++i)
            if (bc.frozen[i]) pin[i] = 1;
    }
    return pin;
}

void apply_dirichlet(Field& u, const BoundaryCondition& bc) {
    const Grid& g = u.grid;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto c = g.unravel(i);
        for (int a = 0; a < g.n; ++a) {
            if (c[a] == 0 && bc.face[a][0].type == FaceType::dirichlet)
                u.values[i] = bc.face[a][0].value;
            if (c[a] == g.shape[a] - 1 && bc.face[a][1].type == FaceType::dirichlet)
                u.values[i] = bc.face[a][1].value;
        }
    }
}

// Sup-norm of the projected gradient over free cells, in residual units.
double stationarity(const Field& u, std::span<const double> grad,
                    std::span<const std::uint8_t> pin, double inv_vol) {
    double worst = 0.0;
    for (std::size_t i = 0; i < grad.size(); ++i) {
        if (pin[i]) continue;
        double viol;
        if (u.values[i] >= 1.0)
            viol = std::max(grad[i], 0.0);
        else if (u.values[i] <= -1.0)
            viol = std::max(-grad[i], 0.0);
        else
            viol = std::abs(grad[i]);
        worst = std::max(worst, viol);
    }
    return worst * inv_vol;
}

} // namespace

std::pair<Field, SolveReport> minimize(Field u0, const BoundaryCondition& bc,
                                       const EnergyParams& params, const Potential& P,
                                       const SolveOptions& opts) {
    params.validate();
    const Grid& g = u0.grid;
    u0.clamp_range();
    apply_dirichlet(u0, bc);
    const auto pin = pinned_mask(g, bc);
    const double inv_vol = 1.0 / g.cell_volume();

    Field u = std::move(u0);
    const std::size_t N = g.size();
    std::vector<double> grad(N), grad_new(N);
    double E = energy_and_gradient(u, params, P, grad);

    SolveReport rep;
    if (opts.record_traces) rep.energy_trace.push_back(E);

    double alpha = g.h * g.h; // conservative first step; BB takes over
    for (long it = 0; it < opts.max_iter; ++it) {
        rep.final_residual = stationarity(u, grad, pin, inv_vol);
        if (rep.final_residual <= opts.tol) {
            rep.converged = true;
            break;
        }

        // Backtracking on the projected step.
        double E_new = 0.0;
        bool accepted = false;
        Field v = u;
        for (int bt = 0; bt < 60; ++bt) {
            double decrease = 0.0; // <grad, u - v> >= 0
            for (std::size_t i = 0; i < N; ++i) {
                if (pin[i]) {
                    v.values[i] = u.values[i];
                    continue;
                }
                v.values[i] = std::clamp(u.values[i] - alpha * grad[i], -1.0, 1.0);
                decrease += grad[i] * (u.values[i] - v.values[i]);
            }
            if (decrease == 0.0) break; // fully blocked: stationary on the box
            E_new = energy_and_gradient(v, params, P, grad_new);
            if (E_new <= E - 1e-4 * decrease) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            // No step size makes progress: stop at the current point.
            rep.iterations = it;
            rep.final_energy = E;
            rep.final_residual = stationarity(u, grad, pin, inv_vol);
            rep.converged = rep.final_residual <= opts.tol;
            return {std::move(u), std::move(rep)};
        }

        // Barzilai-Borwein step proposal from the accepted move.
        double ss = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double s = v.values[i] - u.values[i];
            const double y = grad_new[i] - grad[i];
            ss += s * s;
            sy += s * y;
        }
        u.values.swap(v.values);
        grad.swap(grad_new);
        E = E_new;
        rep.iterations = it + 1;
        if (opts.record_traces) {
            rep.energy_trace.push_back(E);
            rep.step_sizes.push_back(alpha);
        }
        if (sy > 0.0) {
            alpha = std::clamp(ss / sy, 1e-12, 1e8);
        } else {
            alpha *= 2.0;
        }
    }

    rep.final_energy = E;
    if (!rep.converged) rep.final_residual = stationarity(u, grad, pin, inv_vol);
    return {std::move(u), std::move(rep)};
}

namespace {

// Cells of the region whose full difference stencil stays inside it, so a
// modification there leaves the energy outside the region untouched.
std::vector<std::uint8_t> inner_cells(const Region& region) {
    const Grid& g = region.grid;
    std::vector<std::uint8_t> inner(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!region.mask[i]) continue;
        const auto c = g.unravel(i);
        bool ok = true;
        for (int a = 0; a < g.n && ok; ++a) {
            const std::size_t stride = a == 0 ? 1
                                     : a == 1 ? static_cast<std::size_t>(g.shape[0])
                                              : static_cast<std::size_t>(g.shape[0]) * g.shape[1];
            if (c[a] == 0 || c[a] == g.shape[a] - 1) {
                ok = false;
                break;
            }
            if (!region.mask[i - stride] || !region.mask[i + stride]) ok = false;
        }
        inner[i] = ok ? 1 : 0;
    }
    return inner;
}

struct RegionBall {
    std::array<double, 3> center{};
    double radius = 0.0;
};

RegionBall inscribed_ball(const Region& region) {
    const Grid& g = region.grid;
    RegionBall ball;
    double cnt = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!region.mask[i]) continue;
        const auto x = g.coord(i);
        for (int a = 0; a < g.n; ++a) ball.center[a] += x[a];
        cnt += 1.0;
    }
    if (cnt == 0.0) return ball;
    for (int a = 0; a < g.n; ++a) ball.center[a] /= cnt;
    double r = 1e300;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (region.mask[i]) continue;
        const auto x = g.coord(i);
        double d2 = 0.0;
        for (int a = 0; a < g.n; ++a) d2 += (x[a] - ball.center[a]) * (x[a] - ball.center[a]);
        r = std::min(r, std::sqrt(d2));
    }
    // also bounded by the domain box
    for (int a = 0; a < g.n; ++a) {
        r = std::min(r, ball.center[a] - g.axis_lo(a));
        r = std::min(r, g.axis_hi(a) - ball.center[a]);
    }
    ball.radius = std::max(r - g.h, 0.0);
    return ball;
}

} // namespace

QMinimalityReport q_minimality_audit(const Field& u, const Region& region,
                                     const EnergyParams& params, const Potential& P, int trials,
                                     std::uint64_t seed) {
    if (!region.grid.same_as(u.grid)) throw validation_error("q_minimality_audit: grid mismatch");
    if (trials < 1) throw validation_error("q_minimality_audit: trials must be >= 1");
    const Grid& g = u.grid;
    const auto inner = inner_cells(region);
    const auto ball = inscribed_ball(region);
    const double Ju = energy(u, region, params, P);

    QMinimalityReport rep;
    rep.trials = 0;

    auto score = [&](const Field& v) {
        const double Jv = energy(v, region, params, P);
        ++rep.trials;
        if (Jv <= 0.0) {
            if (Ju > 0.0) {
                rep.degenerate = true;
                return std::numeric_limits<double>::infinity();
            }
            return 1.0;
        }
        const double ratio = Ju / Jv;
        rep.worst_ratio = std::max(rep.worst_ratio, ratio);
        return ratio;
    };

    // Ramp competitor: push the inner ball down to the lower phase with a
    // unit-width ramp back up to u.
    {
        Field v = u;
        const double Rr = std::max(ball.radius - 2.0, 2.0 * g.h);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!inner[i]) continue;
            const auto x = g.coord(i);
            double d2 = 0.0;
            for (int a = 0; a < g.n; ++a) d2 += (x[a] - ball.center[a]) * (x[a] - ball.center[a]);
            const double ramp = std::clamp(std::sqrt(d2) - Rr - 1.0, -1.0, 1.0);
            v.values[i] = std::min(v.values[i], ramp);
        }
        rep.ramp_ratio = score(v);
    }

    // Radial comparison-profile wall, when the slow-decay regime applies.
    if (params.slow_decay_regime()) {
        Field v = u;
        const double Rw = std::max(ball.radius - 1.0 - g.h, 2.0 * g.h);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!inner[i]) continue;
            const auto x = g.coord(i);
            double d2 = 0.0;
            for (int a = 0; a < g.n; ++a) d2 += (x[a] - ball.center[a]) * (x[a] - ball.center[a]);
            const double w = comparison_value(params.p, params.m, std::sqrt(d2) - Rw);
            v.values[i] = std::min(v.values[i], w);
        }
        rep.radial_ratio = score(v);
    }

    // Random clamped bump perturbations.
    Rng rng(seed);
    while (rep.trials < trials) {
        Field v = u;
        std::array<double, 3> c{};
        for (int a = 0; a < g.n; ++a)
            c[a] = ball.center[a] + rng.uniform(-0.5, 0.5) * ball.radius;
        const double rho = std::max(rng.uniform(0.25, 0.75) * ball.radius, 2.0 * g.h);
        const double amp = rng.uniform(-0.5, 0.5);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!inner[i]) continue;
            const auto x = g.coord(i);
            double d2 = 0.0;
            for (int a = 0; a < g.n; ++a) d2 += (x[a] - c[a]) * (x[a] - c[a]);
            const double d = std::sqrt(d2);
            if (d >= rho) continue;
            const double wnd = std::cos(0.5 * std::numbers::pi * d / rho);
            v.values[i] = std::clamp(v.values[i] + amp * wnd * wnd, -1.0, 1.0);
        }
        rep.bump_worst_ratio = std::max(rep.bump_worst_ratio, score(v));
    }
    return rep;
}

NearPlusOneReport find_near_plus_one(const Field& u, double h_level,
                                     std::array<double, 3> anchor) {
    if (!(h_level > 0.0 && h_level < 1.0))
        throw validation_error("find_near_plus_one: h_level must lie in (0, 1)");
    const Grid& g = u.grid;
    NearPlusOneReport rep;
    double best = 1e300;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (u.values[i] < 1.0 - h_level) continue;
        const auto x = g.coord(i);
        double d2 = 0.0;
        for (int a = 0; a < g.n; ++a) d2 += (x[a] - anchor[a]) * (x[a] - anchor[a]);
        const double d = std::sqrt(d2);
        if (d < best) { // ties keep the smallest cell index
            best = d;
            rep.found = true;
            rep.cell = i;
            rep.location = x;
            rep.distance = d;
        }
    }
    if (!rep.found) return rep;

    double d_neg = 1e300;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (u.values[i] >= 0.0) continue;
        const auto x = g.coord(i);
        double d2 = 0.0;
        for (int a = 0; a < g.n; ++a)
            d2 += (x[a] - rep.location[a]) * (x[a] - rep.location[a]);
        d_neg = std::min(d_neg, std::sqrt(d2));
    }
    double d_dom = 1e300;
    for (int a = 0; a < g.n; ++a) {
        d_dom = std::min(d_dom, rep.location[a] - g.axis_lo(a));
        d_dom = std::min(d_dom, g.axis_hi(a) - rep.location[a]);
    }
    if (d_dom < d_neg) {
        rep.radius = d_dom;
        rep.radius_capped = true;
    } else {
        rep.radius = std::nextafter(d_neg, 0.0); // the ball at d_neg touches a negative cell
    }
    return rep;
}

Field radial_field(const Grid& g, const Profile1D& prof, std::array<double, 3> center,
                   double r) {
    Field v;
    v.grid = g;
    v.values.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.coord(i);
        double d2 = 0.0;
        for (int a = 0; a < g.n; ++a) d2 += (x[a] - center[a]) * (x[a] - center[a]);
        v.values[i] = prof.eval(std::sqrt(d2) - r);
    }
    v.clamp_range();
    return v;
}

SlidingReport sliding_supersolution_test(const Field& u, const Profile1D& prof, double r,
                                         std::array<double, 3> x0, std::array<double, 3> x1) {
    if (prof.kind != ProfileKind::supersolution)
        throw validation_error("sliding_supersolution_test: supersolution profile required");
    const Grid& g = u.grid;
    const double support = r + prof.meta.b;

    double dist = 0.0;
    for (int a = 0; a < g.n; ++a) dist += (x1[a] - x0[a]) * (x1[a] - x0[a]);
    dist = std::sqrt(dist);
    const int steps = std::max(1, static_cast<int>(std::ceil(dist / g.h)));

    SlidingReport rep;
    double u_max_seen = -1e300;
    for (int k = 0; k <= steps; ++k) {
        std::array<double, 3> c{};
        for (int a = 0; a < g.n; ++a)
            c[a] = x0[a] + (x1[a] - x0[a]) * static_cast<double>(k) / steps;
        for (int a = 0; a < g.n; ++a) {
            if (c[a] - support < g.axis_lo(a) - 1e-12 || c[a] + support > g.axis_hi(a) + 1e-12)
                throw geometry_error(
                    "sliding_supersolution_test: translated support leaves the domain");
        }
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto x = g.coord(i);
            double d2 = 0.0;
            for (int a = 0; a < g.n; ++a) d2 += (x[a] - c[a]) * (x[a] - c[a]);
            const double d = std::sqrt(d2);
            if (d > support) continue;
            u_max_seen = std::max(u_max_seen, u.values[i]);
            const double v = prof.eval(d - r);
            if (u.values[i] >= v) {
                rep.contact = true;
                rep.step = k;
                rep.center = c;
                rep.cell = i;
                rep.u_value = u.values[i];
                rep.v_value = v;
                return rep;
            }
        }
    }
    rep.trivial_ordering = u_max_seen < prof.meta.s0;
    // A clean slide is only consistent with u sitting below the profile
    // floor at the final center; anything else indicates a broken discrete
    // ordering.
    const Grid& gg = u.grid;
    std::size_t nearest = 0;
    double bd = 1e300;
    for (std::size_t i = 0; i < gg.size(); ++i) {
        const auto x = gg.coord(i);
        double d2 = 0.0;
        for (int a = 0; a < gg.n; ++a) d2 += (x[a] - x1[a]) * (x[a] - x1[a]);
        if (d2 < bd) {
            bd = d2;
            nearest = i;
        }
    }
    rep.ordering_violation = u.values[nearest] >= prof.meta.s0;
    return rep;
}

} // namespace glpm
