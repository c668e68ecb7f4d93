#include "glpm/audit.hpp"

#include <algorithm>
#include <cmath>

#include "glpm/numerics.hpp"
#include "glpm/profile1d.hpp"
#include "glpm/quadrature.hpp"

namespace glpm {

namespace {

double dist_to(const Grid& g, std::size_t idx, const std::array<double, 3>& center) {
    const auto x = g.coord(idx);
    double d2 = 0.0;
    for (int a = 0; a < g.n; ++a) d2 += (x[a] - center[a]) * (x[a] - center[a]);
    return std::sqrt(d2);
}

void require_ball_fits(const Grid& g, const std::array<double, 3>& center, double R,
                       const char* what) {
    for (int a = 0; a < g.n; ++a) {
        if (center[a] - R < g.axis_lo(a) - 1e-12 || center[a] + R > g.axis_hi(a) + 1e-12)
            throw geometry_error(std::string(what) + ": ball of radius " + std::to_string(R) +
                                 " does not fit inside the grid box");
    }
}

void check_nondecreasing(std::span<const double> v, const char* name) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (std::isnan(v[i]) || std::isnan(v[i - 1])) continue;
        if (v[i] < v[i - 1] - 1e-9 * std::max(1.0, std::abs(v[i])))
            throw std::logic_error(std::string(name) + " sequence not nondecreasing");
    }
}

} // namespace

AuditSequences volume_potential_sequences(const Field& u, std::array<double, 3> center,
                                          int R_max, const EnergyParams& params,
                                          const Potential& P) {
    if (R_max < 1) throw validation_error("volume_potential_sequences: R_max must be >= 1");
    const Grid& g = u.grid;
    require_ball_fits(g, center, static_cast<double>(R_max), "volume_potential_sequences");

    AuditSequences seq;
    seq.R_max = R_max;
    if (params.slow_decay_regime()) {
        seq.q = params.q();
        seq.gamma = params.gamma();
    }
    std::vector<double> vol_bin(R_max + 1, 0.0), pot_bin(R_max + 1, 0.0);
    const double vol = g.cell_volume();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double d = dist_to(g, i, center);
        const int bin = static_cast<int>(std::ceil(d));
        if (bin > R_max) continue;
        if (u.values[i] >= 0.0) vol_bin[bin] += vol;
        pot_bin[bin] += vol * P(u.values[i]);
    }
    seq.V.resize(R_max + 1);
    seq.P.resize(R_max + 1);
    double av = 0.0, ap = 0.0;
    for (int R = 0; R <= R_max; ++R) {
        av += vol_bin[R];
        ap += pot_bin[R];
        seq.V[R] = av;
        seq.P[R] = ap;
    }
    check_nondecreasing(seq.V, "V");
    check_nondecreasing(seq.P, "P");
    return seq;
}

std::vector<double> mixture_sequence(std::span<const double> V, std::span<const double> P, int T,
                                     double p, double m) {
    if (!(m > p)) throw validation_error("mixture_sequence: requires m > p");
    if (T < 0) throw validation_error("mixture_sequence: T must be >= 0");
    if (V.size() != P.size()) throw validation_error("mixture_sequence: size mismatch");
    if (static_cast<int>(V.size()) <= T)
        throw validation_error("mixture_sequence: need R_max >= T");
    const double q = p * m / (m - p);
    std::vector<double> w(T + 1);
    for (int j = 0; j <= T; ++j) w[j] = std::pow(1.0 + j, -q);
    std::vector<double> M(V.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t R = static_cast<std::size_t>(T); R < V.size(); ++R) {
        double acc = 0.0;
        for (int j = 0; j <= T; ++j) acc += P[R - j] + V[R - j] * w[j];
        M[R] = acc;
    }
    return M;
}

AuditSequences audit_sequences(const Field& u, std::array<double, 3> center, int R_max, int T,
                               const EnergyParams& params, const Potential& P) {
    AuditSequences seq = volume_potential_sequences(u, center, R_max, params, P);
    seq.T = T;
    seq.M = mixture_sequence(seq.V, seq.P, T, params.p, params.m);
    check_nondecreasing(seq.M, "M");
    return seq;
}

CompetitorSet build_competitor(const Field& u, std::array<double, 3> center, int R, int T,
                               const EnergyParams& params) {
    params.require_slow_decay("build_competitor");
    if (R < 1 || T < 1) throw validation_error("build_competitor: need R >= 1 and T >= 1");
    const Grid& g = u.grid;
    require_ball_fits(g, center, R + 1.0, "build_competitor");

    CompetitorSet comp;
    comp.R = R;
    comp.T = T;
    comp.center = center;
    comp.level_lo = comparison_value(params.p, params.m, -static_cast<double>(T));

    // quadrature ladder on [U(-T), 1), clipped below 1 where the weight dies
    const auto nodes = gauss_legendre(64, comp.level_lo, 1.0 - 1e-6);
    comp.levels = nodes.x;
    comp.level_weights = nodes.w;
    comp.level_counts.assign(comp.levels.size(), 0);

    comp.v.grid = g;
    comp.v.values.resize(g.size());
    std::vector<std::uint8_t> mask(g.size(), 0);
    std::size_t count = 0;
    std::vector<long> diff(comp.levels.size() + 1, 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double d = dist_to(g, i, center);
        const double v = comparison_value(params.p, params.m, d - R);
        comp.v.values[i] = v;
        if (d > R + 1.0) continue;
        if (u.values[i] > v) {
            mask[i] = 1;
            ++count;
            // levels h with v < h < u: piecewise count via a difference array
            const auto lo = std::lower_bound(comp.levels.begin(), comp.levels.end(), v);
            const auto hi = std::lower_bound(comp.levels.begin(), comp.levels.end(),
                                             u.values[i]);
            const std::size_t klo = static_cast<std::size_t>(lo - comp.levels.begin());
            const std::size_t khi = static_cast<std::size_t>(hi - comp.levels.begin());
            if (khi > klo) {
                ++diff[klo];
                --diff[khi];
            }
        }
    }
    long run = 0;
    for (std::size_t k = 0; k < comp.levels.size(); ++k) {
        run += diff[k];
        comp.level_counts[k] = static_cast<std::size_t>(run);
    }
    comp.S.grid = g;
    comp.S.mask = std::move(mask);
    comp.S.count = count;
    return comp;
}

Region level_region(const Field& u, const CompetitorSet& comp, double h_level) {
    const Grid& g = u.grid;
    std::vector<std::uint8_t> mask(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!comp.S.mask[i]) continue; // S_{R,h} is a subset of S_R
        if (u.values[i] > h_level && h_level > comp.v.values[i]) mask[i] = 1;
    }
    return Region::from_mask(g, std::move(mask));
}

std::pair<double, double> coarea_functional(const Field& u, const CompetitorSet& comp,
                                            const EnergyParams& params, const Potential& P) {
    const double vol = u.grid.cell_volume();
    const double exp_vol = (params.n - 1.0) / params.n;
    const double exp_well = (params.p - 1.0) / params.p;
    double lhs = 0.0;
    for (std::size_t k = 0; k < comp.levels.size(); ++k) {
        const double measure = static_cast<double>(comp.level_counts[k]) * vol;
        if (measure == 0.0) continue;
        lhs += comp.level_weights[k] * std::pow(measure, exp_vol) *
               std::pow(P(comp.levels[k]), exp_well);
    }
    const double rhs = energy(comp.v, comp.S, params, P);
    return {lhs, rhs};
}

MainInequalityRecord main_inequality_report(const Field& u, std::array<double, 3> center, int R,
                                            int T, const EnergyParams& params,
                                            const Potential& P) {
    params.require_slow_decay("main_inequality_report");
    if (R < T + 1) throw validation_error("main_inequality_report: need R >= T + 1");
    const Grid& g = u.grid;
    require_ball_fits(g, center, R + 1.0, "main_inequality_report");

    const AuditSequences seq = volume_potential_sequences(u, center, R + 1, params, P);
    const CompetitorSet comp = build_competitor(u, center, R, T, params);

    MainInequalityRecord rec;
    rec.R = R;
    rec.T = T;
    rec.lhs = std::pow(seq.V[R - T], (params.n - 1.0) / params.n);
    rec.rhs = energy(comp.v, comp.S, params, P);
    rec.ratio = rec.lhs > 0.0 ? rec.rhs / rec.lhs
                              : std::numeric_limits<double>::quiet_NaN();
    rec.core_ref = std::pow(static_cast<double>(R), params.n - 1.0) *
                   std::pow(static_cast<double>(T), -params.gamma());

    // split the contact set into the core ball and unit-width annuli
    const double q = params.q();
    const double vol = g.cell_volume();
    const double eps2 = params.grad_eps() * params.grad_eps();
    const double inv_h = 1.0 / g.h;
    const double half_p = 0.5 * params.p;
    std::vector<double> annulus_energy(T + 1, 0.0);
    double core = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!comp.S.mask[i]) continue;
        const double d = dist_to(g, i, center);
        // local energy density of the competitor field at this cell
        const auto c = g.unravel(i);
        double g2 = eps2;
        for (int a = 0; a < g.n; ++a) {
            if (c[a] >= g.shape[a] - 1) continue;
            const std::size_t stride = a == 0 ? 1
                                     : a == 1 ? static_cast<std::size_t>(g.shape[0])
                                              : static_cast<std::size_t>(g.shape[0]) * g.shape[1];
            const double diff = (comp.v.values[i + stride] - comp.v.values[i]) * inv_h;
            g2 += diff * diff;
        }
        const double dens = (pow_fast(g2, half_p) + P(comp.v.values[i])) * vol;
        if (d <= R - T)
            core += dens;
        else {
            // annulus index j with R - j < d <= R + 1 - j
            int j = static_cast<int>(std::floor(static_cast<double>(R) + 1.0 - d));
            j = std::clamp(j, 0, T);
            annulus_energy[j] += dens;
        }
    }
    rec.core = core;
    for (int j = 0; j <= T; ++j) {
        MainInequalityRecord::Annulus a;
        a.j = j;
        a.energy = annulus_energy[j];
        a.bound = (seq.P[R + 1 - j] - seq.P[R - j]) +
                  (seq.V[R + 1 - j] - seq.V[R - j]) * std::pow(1.0 + j, -q);
        rec.annuli.push_back(a);
    }
    return rec;
}

DiscreteInequalityReport discrete_inequality_check(const AuditSequences& seq, int n, double c1,
                                                   double C0) {
    if (seq.M.empty()) throw validation_error("discrete_inequality_check: mixture missing");
    if (!(seq.gamma > 0.0))
        throw validation_error("discrete_inequality_check: gamma undefined (m <= p?)");
    const int T = seq.T;
    DiscreteInequalityReport rep;

    if (std::isnan(C0)) {
        // potential-mass scaling constant, window-adjusted so that
        // C0 * T >= (T+1) * max_R P_R / R^{n-1}
        double cp = 0.0;
        for (int R = 1; R <= seq.R_max; ++R)
            cp = std::max(cp, seq.P[R] / std::pow(static_cast<double>(R), n - 1.0));
        rep.C0 = cp * (T + 1.0) / T;
        rep.C0_fitted = true;
    } else {
        rep.C0 = C0;
    }

    const double exp_vol = (n - 1.0) / static_cast<double>(n);
    struct Partial {
        int R;
        double base, rhs;
    };
    std::vector<Partial> parts;
    for (int R = 2 * T; R + 1 <= seq.R_max; ++R) {
        Partial p;
        p.R = R;
        const double drift = rep.C0 * T * std::pow(static_cast<double>(R), n - 1.0);
        p.base = std::max(seq.M[R - T] - drift, 0.0);
        p.rhs = std::pow(static_cast<double>(R), n - 1.0) * std::pow(seq.T, -seq.gamma) +
                seq.M[R + 1] - seq.M[R];
        parts.push_back(p);
    }
    if (parts.empty())
        throw validation_error("discrete_inequality_check: no admissible radii (R_max < 2T + 1)");

    if (std::isnan(c1)) {
        double best = std::numeric_limits<double>::infinity();
        bool any = false;
        for (const auto& p : parts) {
            if (p.base <= 0.0) continue;
            any = true;
            best = std::min(best, p.rhs / std::pow(p.base, exp_vol));
        }
        rep.degenerate = !any;
        rep.c1 = any ? best : 0.0;
        rep.c1_fitted = true;
    } else {
        rep.c1 = c1;
    }

    rep.all_pass = true;
    for (const auto& p : parts) {
        DiscreteInequalityReport::Row row;
        row.R = p.R;
        row.base = p.base;
        row.lhs = rep.c1 * std::pow(p.base, exp_vol);
        row.rhs = p.rhs;
        row.slack = row.rhs - row.lhs;
        row.pass = row.lhs <= row.rhs * (1.0 + 1e-12) + 1e-12;
        rep.all_pass = rep.all_pass && row.pass;
        rep.rows.push_back(row);
    }
    return rep;
}

InductionTrace induction_simulator(int n, double sigma, int T, double C0, double c1, double gamma,
                                   std::span<const double> M_init, int R_seed, int R_stop) {
    if (n < 1 || n > 3) throw validation_error("induction_simulator: n must be 1..3");
    if (!(sigma > 0.0) || !(C0 > 0.0) || !(c1 > 0.0) || !(gamma > 0.0) || T < 1)
        throw validation_error("induction_simulator: constants must be positive, T >= 1");
    if (static_cast<int>(M_init.size()) != T + 1)
        throw validation_error("induction_simulator: seed must cover T+1 consecutive radii");
    if (R_stop <= R_seed) throw validation_error("induction_simulator: R_stop must exceed seed");

    InductionTrace tr;
    tr.rho1 = std::pow(2.0, n + 1) * C0 * T / sigma;
    tr.hypothesis_met = static_cast<double>(R_seed) >= tr.rho1;

    // seed window must satisfy the lower bound
    for (int i = 0; i <= T; ++i) {
        const int r = R_seed - T + i;
        if (M_init[i] < sigma * powi(static_cast<double>(r), n) * (1.0 - 1e-12))
            throw validation_error("induction_simulator: seed window violates M_r >= sigma r^n");
    }

    std::vector<double> window(M_init.begin(), M_init.end()); // M at R-T .. R
    tr.maintained = true;
    for (int R = R_seed; R < R_stop; ++R) {
        InductionTrace::Step st;
        st.R = R;
        st.M = window.back();
        const double Rn1 = std::pow(static_cast<double>(R), n - 1.0);
        st.base = window.front() - C0 * T * Rn1;
        st.chain_need = 0.5 * sigma * powi(0.5 * R, n);
        if (st.base < st.chain_need && tr.first_chain_violation < 0)
            tr.first_chain_violation = R;
        st.increment = c1 * std::pow(std::max(st.base, 0.0), (n - 1.0) / n) -
                       Rn1 * std::pow(static_cast<double>(T), -gamma);
        st.step_need = sigma * (powi(R + 1.0, n) - powi(static_cast<double>(R), n));
        const double M_next = st.M + st.increment;
        st.ind_ok = M_next >= sigma * powi(R + 1.0, n) * (1.0 - 1e-12);
        if (!st.ind_ok && tr.first_ind_violation < 0) {
            tr.first_ind_violation = R + 1;
            tr.maintained = false;
        }
        tr.steps.push_back(st);
        window.erase(window.begin());
        window.push_back(M_next);
    }
    return tr;
}

DensityReport density_report(const Field& u, std::array<double, 3> center, int R0, int R_max,
                             const EnergyParams& params) {
    if (R0 < 1 || R_max < R0) throw validation_error("density_report: need 1 <= R0 <= R_max");
    const Grid& g = u.grid;
    require_ball_fits(g, center, static_cast<double>(R_max), "density_report");

    DensityReport rep;
    rep.R0 = R0;
    rep.R_max = R_max;

    // nearest cell to the requested center must carry a near-zero value
    std::size_t nearest = 0;
    double best = 1e300;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double d = dist_to(g, i, center);
        if (d < best) {
            best = d;
            nearest = i;
        }
    }
    rep.center_is_zero = std::abs(u.values[nearest]) <= g.h;

    std::vector<double> plus_bin(R_max + 1, 0.0), minus_bin(R_max + 1, 0.0);
    const double vol = g.cell_volume();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double d = dist_to(g, i, center);
        const int bin = static_cast<int>(std::ceil(d));
        if (bin > R_max) continue;
        if (u.values[i] >= 0.0) plus_bin[bin] += vol;
        if (u.values[i] <= 0.0) minus_bin[bin] += vol;
    }
    double ap = 0.0, am = 0.0;
    double fmax_p = 0.0, fmax_m = 0.0;
    rep.delta = std::numeric_limits<double>::infinity();
    for (int R = 1; R <= R_max; ++R) {
        ap += plus_bin[R];
        am += minus_bin[R];
        if (R == 1) {
            ap += plus_bin[0];
            am += minus_bin[0];
        }
        DensityReport::Row row;
        row.R = R;
        const double Rn = powi(static_cast<double>(R), params.n);
        row.frac_plus = ap / Rn;
        row.frac_minus = am / Rn;
        rep.rows.push_back(row);
        fmax_p = std::max(fmax_p, row.frac_plus);
        fmax_m = std::max(fmax_m, row.frac_minus);
        if (R >= R0) rep.delta = std::min({rep.delta, row.frac_plus, row.frac_minus});
    }
    const auto& last = rep.rows.back();
    rep.plus_vanishing = last.frac_plus < 0.25 * fmax_p || last.frac_plus <= 0.0;
    rep.minus_vanishing = last.frac_minus < 0.25 * fmax_m || last.frac_minus <= 0.0;
    return rep;
}

} // namespace glpm
