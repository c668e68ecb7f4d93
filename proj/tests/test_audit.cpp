#include <doctest.h>

#include <cmath>
#include <numbers>

#include "glpm/audit.hpp"
#include "glpm/minimize.hpp"
#include "glpm/numerics.hpp"
#include "glpm/quadrature.hpp"

using namespace glpm;

namespace {

EnergyParams make_params(int n, double p, double m) {
    EnergyParams params;
    params.n = n;
    params.p = p;
    params.m = m;
    params.Lambda = 100.0;
    return params;
}

// small 2-D planar minimizer shared by the measurement tests
const Field& planar_field() {
    static Field u = [] {
        const Grid g = Grid::box(2, {28, 28, 0}, 0.25);
        Field u0 = Field::from_function(
            g, [](std::array<double, 3> x) { return std::clamp(x[0] / 5.0, -1.0, 1.0); });
        SolveOptions opts;
        opts.tol = 1e-6;
        opts.record_traces = false;
        auto [v, rep] = minimize(std::move(u0), BoundaryCondition::axis_dirichlet(0, -1.0, 1.0),
                                 make_params(2, 2, 4), Potential::model(4.0), opts);
        REQUIRE(rep.converged);
        return v;
    }();
    return u;
}

} // namespace

TEST_CASE("volume and potential-mass sequences") {
    const auto params = make_params(2, 2, 2);
    const Potential P = Potential::model(2.0);
    const Grid g = Grid::box(2, {20, 20, 0}, 0.25);

    SUBCASE("pure plus phase") {
        const Field u = Field::constant(g, 1.0);
        const auto seq = volume_potential_sequences(u, {0, 0, 0}, 8, params, P);
        for (int R = 1; R <= 8; ++R) {
            const Region ball = ball_mask(g, {0, 0, 0}, R);
            CHECK(seq.V[R] == doctest::Approx(ball.volume()).epsilon(1e-12));
            CHECK(seq.P[R] == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
    SUBCASE("zero state: potential mass equals the ball volume") {
        const Field u = Field::constant(g, 0.0);
        const auto seq = volume_potential_sequences(u, {0, 0, 0}, 8, params, P);
        for (int R = 1; R <= 8; ++R) {
            CHECK(seq.P[R] == doctest::Approx(seq.V[R]).epsilon(1e-12)); // W(0) = 1
            if (R > 1) CHECK(seq.V[R] >= seq.V[R - 1]);
        }
    }
    SUBCASE("oversized radius is a geometry error") {
        const Field u = Field::constant(g, 0.0);
        CHECK_THROWS_AS(volume_potential_sequences(u, {0, 0, 0}, 30, params, P), geometry_error);
    }
}

TEST_CASE("window mixture") {
    SUBCASE("single term collapses to P + V") {
        std::vector<double> V{1, 2, 3, 4}, P{0.5, 0.5, 0.5, 0.5};
        const auto M = mixture_sequence(V, P, 0, 2.0, 4.0);
        for (std::size_t R = 0; R < V.size(); ++R)
            CHECK(M[R] == doctest::Approx(V[R] + P[R]).epsilon(1e-14));
    }
    SUBCASE("linear volumes with unit window") {
        // q = 4 at (p, m) = (2, 4): M_R = R + (R-1)/16
        std::vector<double> V, P;
        for (int R = 0; R <= 10; ++R) {
            V.push_back(R);
            P.push_back(0.0);
        }
        const auto M = mixture_sequence(V, P, 1, 2.0, 4.0);
        for (int R = 1; R <= 10; ++R)
            CHECK(M[R] == doctest::Approx(R + (R - 1) / 16.0).epsilon(1e-14));
        CHECK(std::isnan(M[0]));
    }
    SUBCASE("matches a direct-summation oracle") {
        Rng rng(314);
        std::vector<double> V, P;
        for (int R = 0; R <= 20; ++R) {
            V.push_back((R > 0 ? V[R - 1] : 0.0) + rng.uniform(0.0, 2.0));
            P.push_back((R > 0 ? P[R - 1] : 0.0) + rng.uniform(0.0, 0.5));
        }
        const int T = 3;
        const double p = 2.0, m = 3.0, q = p * m / (m - p);
        const auto M = mixture_sequence(V, P, T, p, m);
        for (int R = T; R <= 20; ++R) {
            double oracle = 0.0;
            for (int j = 0; j <= T; ++j) oracle += P[R - j] + V[R - j] * std::pow(1.0 + j, -q);
            CHECK(M[R] == doctest::Approx(oracle).epsilon(1e-14));
        }
    }
    SUBCASE("slow-decay regime required") {
        std::vector<double> V{1, 2}, P{0, 0};
        CHECK_THROWS_AS(mixture_sequence(V, P, 1, 2.0, 2.0), validation_error);
    }
    SUBCASE("mixture dominates the volume term") {
        const auto& u = planar_field();
        const auto seq = audit_sequences(u, {0, 0, 0}, 12, 3, make_params(2, 2, 4),
                                         Potential::model(4.0));
        for (int R = 3; R <= 12; ++R) {
            CHECK(seq.M[R] >= seq.V[R]);
            if (R > 3) CHECK(seq.M[R] >= seq.M[R - 1]);
        }
    }
}

TEST_CASE("volume lower bound from the mixture sandwich") {
    const auto params = make_params(2, 2, 4);
    const Potential P = Potential::model(4.0);
    const auto& u = planar_field();
    const int T = 3;
    const auto seq = audit_sequences(u, {0, 0, 0}, 12, T, params, P);
    double cp = 0.0;
    for (int R = 1; R <= seq.R_max; ++R)
        cp = std::max(cp, seq.P[R] / std::pow(static_cast<double>(R), params.n - 1.0));
    const double C0 = cp * (T + 1.0) / T;
    const double c0 = 1.0 / weight_series_sum(params.q());
    for (int R = T; R <= seq.R_max; ++R) {
        const double floor_term =
            c0 * (seq.M[R] - C0 * T * std::pow(static_cast<double>(R), params.n - 1.0));
        CHECK(seq.V[R] >= floor_term - 1e-9);
    }
}

TEST_CASE("competitor construction and contact sets") {
    const auto params = make_params(2, 2, 4);
    const Grid g = Grid::box(2, {24, 24, 0}, 0.25);

    SUBCASE("deep minus phase has an empty contact set") {
        const Field u = Field::constant(g, -1.0);
        const auto comp = build_competitor(u, {0, 0, 0}, 8, 3, params);
        CHECK(comp.S.count == 0);
        for (auto c : comp.level_counts) CHECK(c == 0);
    }
    SUBCASE("pure plus phase: contact set covers the open support") {
        const Field u = Field::constant(g, 1.0);
        const auto comp = build_competitor(u, {0, 0, 0}, 8, 3, params);
        const Region inner = ball_mask(g, {0, 0, 0}, 8.0);
        for (std::size_t i = 0; i < g.size(); ++i)
            if (inner.mask[i]) CHECK(comp.S.mask[i] == 1);
        // with u == 1 the level sets {h > v} grow with the level
        for (std::size_t k = 1; k < comp.level_counts.size(); ++k)
            CHECK(comp.level_counts[k] >= comp.level_counts[k - 1]);
        // each ladder region is contained in the contact set
        const Region sh = level_region(u, comp, comp.levels[32]);
        for (std::size_t i = 0; i < g.size(); ++i)
            if (sh.mask[i]) CHECK(comp.S.mask[i] == 1);
        CHECK(sh.count == comp.level_counts[32]);
    }
    SUBCASE("planar minimizer: level measures dominate the inner phase volume") {
        const auto& u = planar_field();
        const int R = 8, T = 3;
        const auto comp = build_competitor(u, {0, 0, 0}, R, T, params);
        const auto seq = volume_potential_sequences(u, {0, 0, 0}, R + 1, params,
                                                    Potential::model(4.0));
        const double vol = g.cell_volume();
        for (std::size_t k = 0; k < comp.levels.size(); ++k) {
            const double h_k = comp.levels[k];
            if (h_k <= comp.level_lo || h_k >= 0.0) continue;
            CHECK(static_cast<double>(comp.level_counts[k]) * vol >= seq.V[R - T] - 1e-9);
        }
    }
    SUBCASE("support must fit") {
        const Field u = Field::constant(g, 1.0);
        CHECK_THROWS_AS(build_competitor(u, {0, 0, 0}, 12, 3, params), geometry_error);
    }
}

TEST_CASE("level integral against the competitor energy") {
    const auto params = make_params(2, 2, 4);
    const Potential P = Potential::model(4.0);
    const Grid g = Grid::box(2, {24, 24, 0}, 0.25);

    SUBCASE("empty contact set gives the zero pair") {
        const Field u = Field::constant(g, -1.0);
        const auto comp = build_competitor(u, {0, 0, 0}, 8, 3, params);
        const auto [lhs, rhs] = coarea_functional(u, comp, params, P);
        CHECK(lhs == 0.0);
        CHECK(rhs == 0.0);
    }
    SUBCASE("planar minimizer: bounded ratio across radii") {
        const auto& u = planar_field();
        double worst = 0.0;
        for (int R : {7, 9, 11}) {
            const auto comp = build_competitor(u, {0, 0, 0}, R, 3, params);
            const auto [lhs, rhs] = coarea_functional(u, comp, params, P);
            CHECK(lhs > 0.0);
            CHECK(rhs > 0.0);
            worst = std::max(worst, lhs / rhs);
        }
        CHECK(worst < 10.0); // no blow-up across the measured range
    }
    SUBCASE("negative-level weight mass stays bounded below") {
        // int_{U(-T)}^{0} W(h)^{(p-1)/p} dh for the degenerate quartic well
        double prev = 0.0;
        for (double T : {1.0, 5.0, 20.0}) {
            const double lo = comparison_value(2.0, 4.0, -T);
            const double mass = integrate_adaptive(
                [&](double h) { return std::sqrt(P(h)); }, lo, 0.0, 1e-10);
            CHECK(mass >= 0.3);
            CHECK(mass >= prev); // increasing in T
            prev = mass;
        }
    }
}

TEST_CASE("main inequality records") {
    const auto params = make_params(2, 2, 4);
    const Potential P = Potential::model(4.0);
    const Grid g = Grid::box(2, {24, 24, 0}, 0.25);

    SUBCASE("deep minus phase: both sides vanish") {
        const Field u = Field::constant(g, -1.0);
        const auto rec = main_inequality_report(u, {0, 0, 0}, 8, 3, params, P);
        CHECK(rec.lhs == 0.0);
        CHECK(rec.rhs == 0.0);
    }
    SUBCASE("pure plus phase: structural record") {
        const Field u = Field::constant(g, 1.0);
        const auto rec = main_inequality_report(u, {0, 0, 0}, 8, 3, params, P);
        const Region ball = ball_mask(g, {0, 0, 0}, 5.0);
        CHECK(rec.lhs == doctest::Approx(std::sqrt(ball.volume())).epsilon(1e-12));
        CHECK(rec.rhs > 0.0);
        CHECK(std::isfinite(rec.ratio));
    }
    SUBCASE("annulus decomposition adds up to the contact-set energy") {
        const auto& u = planar_field();
        const auto rec = main_inequality_report(u, {0, 0, 0}, 9, 3, params, P);
        double total = rec.core;
        for (const auto& a : rec.annuli) total += a.energy;
        CHECK(total == doctest::Approx(rec.rhs).epsilon(1e-9));
        for (const auto& a : rec.annuli) CHECK(a.bound >= -1e-12);
    }
    SUBCASE("planar minimizer keeps a positive ratio across radii") {
        const auto& u = planar_field();
        double lo = 1e300;
        for (int R : {7, 9, 11}) {
            const auto rec = main_inequality_report(u, {0, 0, 0}, R, 3, params, P);
            CHECK(rec.lhs > 0.0);
            lo = std::min(lo, rec.rhs / rec.lhs);
        }
        CHECK(lo > 0.0);
    }
}

TEST_CASE("growth inequality rows and constant fitting") {
    SUBCASE("constant mixture passes with a large enough drift constant") {
        AuditSequences seq;
        seq.R_max = 30;
        seq.T = 3;
        seq.gamma = 3.0;
        seq.q = 4.0;
        seq.V.assign(31, 1.0);
        seq.P.assign(31, 0.25);
        seq.M.assign(31, 5.0);
        const auto rep = discrete_inequality_check(seq, 2, 1.0, 10.0);
        CHECK(rep.all_pass);
        for (const auto& row : rep.rows) CHECK(row.base == 0.0);
    }
    SUBCASE("synthetic quadratic growth passes with margin") {
        // M_R = sigma R^2 with small sigma: the chain increment argument
        AuditSequences seq;
        const double sigma = 0.01;
        seq.R_max = 60;
        seq.T = 10;
        seq.gamma = 3.0;
        seq.q = 4.0;
        seq.V.assign(61, 0.0);
        seq.P.assign(61, 0.0);
        seq.M.resize(61);
        for (int R = 0; R <= 60; ++R) seq.M[R] = sigma * R * R;
        const auto rep = discrete_inequality_check(seq, 2, 0.15, 1e-4);
        CHECK(rep.all_pass);
        for (const auto& row : rep.rows) CHECK(row.slack >= 0.0);
    }
    SUBCASE("fitted constants from the measured planar field") {
        const auto& u = planar_field();
        const auto seq = audit_sequences(u, {0, 0, 0}, 12, 3, make_params(2, 2, 4),
                                         Potential::model(4.0));
        const auto rep = discrete_inequality_check(seq, 2);
        CHECK(rep.c1_fitted);
        CHECK(rep.C0_fitted);
        CHECK_FALSE(rep.degenerate);
        CHECK(rep.c1 > 0.0);
        CHECK(std::isfinite(rep.C0));
        CHECK(rep.all_pass);
    }
}

TEST_CASE("worst-case growth recursion") {
    SUBCASE("threshold radius value") {
        const auto tr = induction_simulator(2, 0.1, 10, 1.0, 1.0, 3.0,
                                            [] {
                                                std::vector<double> s;
                                                for (int r = 790; r <= 800; ++r)
                                                    s.push_back(0.1 * r * r);
                                                return s;
                                            }(),
                                            800, 810);
        CHECK(tr.rho1 == doctest::Approx(800.0).epsilon(1e-14)); // 2^{n+1} C0 T / sigma
        CHECK(tr.hypothesis_met);
    }
    SUBCASE("seeded at the threshold the bound propagates far") {
        std::vector<double> seeds;
        for (int r = 790; r <= 800; ++r) seeds.push_back(0.1 * r * r);
        const auto tr = induction_simulator(2, 0.1, 10, 1.0, 1.0, 3.0, seeds, 800, 3200);
        CHECK(tr.maintained);
        CHECK(tr.first_ind_violation == -1);
        CHECK(tr.first_chain_violation == -1);
        for (const auto& st : tr.steps) CHECK(st.increment >= st.step_need - 1e-9);
    }
    SUBCASE("seeded far below the threshold the recursion is caught failing") {
        std::vector<double> seeds;
        for (int r = 190; r <= 200; ++r) seeds.push_back(0.1 * r * r);
        const auto tr = induction_simulator(2, 0.1, 10, 1.0, 1.0, 3.0, seeds, 200, 400);
        CHECK_FALSE(tr.hypothesis_met);
        CHECK_FALSE(tr.maintained);
        CHECK(tr.first_ind_violation == 201); // fails at the very first step
    }
    SUBCASE("seeds violating the lower bound are rejected") {
        std::vector<double> seeds(11, 1.0);
        CHECK_THROWS_AS(induction_simulator(2, 0.1, 10, 1.0, 1.0, 3.0, seeds, 800, 900),
                        validation_error);
    }
    SUBCASE("window size must match") {
        std::vector<double> seeds(5, 1e9);
        CHECK_THROWS_AS(induction_simulator(2, 0.1, 10, 1.0, 1.0, 3.0, seeds, 800, 900),
                        validation_error);
    }
}

TEST_CASE("phase density report") {
    SUBCASE("planar sign-symmetric field approaches the half-plane fractions") {
        const Grid g = Grid::box(2, {64, 64, 0}, 0.25);
        const Field u =
            Field::from_function(g, [](std::array<double, 3> x) { return std::tanh(x[0]); });
        const auto rep = density_report(u, {0, 0, 0}, 10, 30, make_params(2, 2, 4));
        CHECK(rep.center_is_zero);
        CHECK_FALSE(rep.plus_vanishing);
        CHECK_FALSE(rep.minus_vanishing);
        CHECK(std::abs(rep.delta - std::numbers::pi / 2) / (std::numbers::pi / 2) <= 0.05);
        const auto& last = rep.rows.back();
        CHECK(last.frac_plus == doctest::Approx(std::numbers::pi / 2).epsilon(0.03));
        CHECK(last.frac_minus == doctest::Approx(std::numbers::pi / 2).epsilon(0.03));
    }
    SUBCASE("degenerate input is flagged") {
        const Grid g = Grid::box(2, {24, 24, 0}, 0.25);
        const Field u = Field::constant(g, 1.0);
        const auto rep = density_report(u, {0, 0, 0}, 4, 10, make_params(2, 2, 4));
        CHECK_FALSE(rep.center_is_zero);
        CHECK(rep.minus_vanishing);
        CHECK(rep.delta == 0.0);
    }
    SUBCASE("thin 3-D slab keeps both phase fractions bounded below") {
        // strongly degenerate well (q = pm/(m-p) = 3 = n)
        const Grid g = Grid::box(3, {16, 16, 6.4}, 0.2);
        const Potential P6 = Potential::model(6.0);
        Field u0 = Field::from_function(
            g, [](std::array<double, 3> x) { return std::clamp(x[0] / 3.0, -1.0, 1.0); });
        SolveOptions opts;
        opts.tol = 1e-5;
        opts.record_traces = false;
        auto [u, rep_solve] = minimize(std::move(u0),
                                       BoundaryCondition::axis_dirichlet(0, -1.0, 1.0),
                                       make_params(3, 2, 6), P6, opts);
        CHECK(rep_solve.converged);
        const auto rep = density_report(u, {0, 0, 0}, 1, 3, make_params(3, 2, 6));
        for (const auto& row : rep.rows) {
            CHECK(row.frac_plus >= 0.1);
            CHECK(row.frac_minus >= 0.1);
        }
    }
}
