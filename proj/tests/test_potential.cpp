#include <doctest.h>

#include <cmath>

#include "glpm/numerics.hpp"
#include "glpm/potential.hpp"

using namespace glpm;

TEST_CASE("model potential values") {
    CHECK(Potential::model(2.0)(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(Potential::model(4.0)(1.0) == 0.0);
    CHECK(Potential::model(4.0)(-1.0) == 0.0);
    // (1 - 0.25)^3 = 0.421875
    CHECK(Potential::model(3.0)(0.5) == doctest::Approx(0.421875).epsilon(1e-14));
    CHECK_THROWS_AS(Potential::model(2.0)(1.5), domain_error);
}

TEST_CASE("model potential derivative") {
    // analytic: W'(tau) = -2 m tau (1 - tau^2)^{m-1}
    CHECK(Potential::model(2.0).deriv(0.0) == 0.0);
    CHECK(Potential::model(2.0).deriv(0.5) == doctest::Approx(-1.5).epsilon(1e-14));
    CHECK(Potential::model(4.0).deriv(-0.5) == doctest::Approx(1.6875).epsilon(1e-14));
    CHECK_THROWS_AS(Potential::model(2.0).deriv(1.0), domain_error);
    CHECK(Potential::model(2.0).deriv_extended(1.0) == 0.0);
    CHECK(Potential::model(1.0).deriv_extended(1.0) == doctest::Approx(-2.0));
}

TEST_CASE("even symmetry of the model well") {
    for (double m : {1.5, 2.0, 3.0, 4.5}) {
        const Potential P = Potential::model(m);
        for (int k = 0; k <= 20; ++k) {
            const double tau = k / 20.0;
            CHECK(P(tau) == doctest::Approx(P(-tau)).epsilon(1e-15));
        }
    }
}

TEST_CASE("derivative agrees with centered differences") {
    Rng rng(20240511);
    for (double m : {2.0, 3.0, 4.0}) {
        const Potential P = Potential::model(m);
        for (int k = 0; k < 100; ++k) {
            const double tau = rng.uniform(-0.95, 0.95);
            const double fd = (P(tau + 1e-6) - P(tau - 1e-6)) / 2e-6;
            const double an = P.deriv(tau);
            // relative where W' is O(1), absolute near its zeros where the
            // quotient is dominated by FD roundoff
            const double scale = std::max(std::abs(an), 1.0);
            CHECK(std::abs(fd - an) / scale <= 1e-8);
        }
    }
}

TEST_CASE("admissibility of the model potential") {
    EnergyParams params;
    params.n = 1;
    params.p = 2.0;
    params.m = 3.0;
    params.lambda = 1.0;
    params.Lambda = 1.0;
    const auto rep = check_admissible(Potential::model(3.0), params, 1000);
    CHECK(rep.pass);
    CHECK(rep.well.ratio_min == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.well.ratio_max == doctest::Approx(1.0).epsilon(1e-12));
    // outer slope ratio of the model well is 2m|tau| on (1/2, 1)
    CHECK(rep.slope.ratio_min > params.m);
    CHECK(rep.slope.ratio_max <= 2.0 * params.m);
}

TEST_CASE("admissibility with both conditions gated on one pair") {
    for (double m : {2.5, 3.0, 4.0, 6.0}) {
        EnergyParams params;
        params.p = 2.0;
        params.m = m;
        params.lambda = std::min(1.0, 2.0 * m) * (1.0 - 1e-9);
        params.Lambda = std::max(1.0, 2.0 * m) * (1.0 + 1e-9);
        const auto rep = check_admissible(Potential::model(m), params, 2000, params.lambda,
                                          params.Lambda);
        CHECK(rep.pass);
    }
}

TEST_CASE("admissibility of scaled and perturbed custom wells") {
    EnergyParams params;
    params.p = 2.0;
    params.m = 2.0;

    SUBCASE("constant ratio 2") {
        params.lambda = 1.0;
        params.Lambda = 3.0;
        auto P = Potential::custom(
            2.0, [](double t) { return 2.0 * powi(1.0 - t * t, 2); },
            [](double t) { return -8.0 * t * (1.0 - t * t); });
        const auto rep = check_admissible(P, params, 1000);
        CHECK(rep.pass);
        CHECK(rep.well.ratio_min == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(rep.well.ratio_max == doctest::Approx(2.0).epsilon(1e-12));
    }

    SUBCASE("higher-order correction stays within [1, 2]") {
        params.lambda = 1.0;
        params.Lambda = 2.0;
        auto P = Potential::custom(
            2.0, [](double t) { return powi(1.0 - t * t, 2) + powi(1.0 - t * t, 5); },
            [](double t) { return -4.0 * t * (1.0 - t * t) - 10.0 * t * powi(1.0 - t * t, 4); });
        const auto rep = check_admissible(P, params, 1000);
        CHECK(rep.pass);

        // dense-sampling oracle for the worst well ratio
        double lo = 1e300, hi = -1e300;
        for (int k = 0; k < 20000; ++k) {
            const double tau = -1.0 + 2.0 * (k + 0.5) / 20000;
            const double r = 1.0 + powi(1.0 - tau * tau, 3);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        CHECK(rep.well.ratio_min >= lo - 1e-9);
        CHECK(rep.well.ratio_max <= hi + 1e-9);
    }
}

TEST_CASE("tabulated potential reproduces its source well") {
    std::vector<double> tau, w, dw;
    const int N = 400;
    for (int k = 0; k <= N; ++k) {
        const double t = -1.0 + 2.0 * k / N;
        tau.push_back(t);
        w.push_back(powi(1.0 - t * t, 2));
        dw.push_back(-4.0 * t * (1.0 - t * t));
    }
    const Potential P = Potential::from_table(2.0, tau, w, dw);
    CHECK(P.kind() == PotentialKind::custom);
    for (double t : {-0.83, -0.31, 0.0, 0.47, 0.92}) {
        CHECK(P(t) == doctest::Approx(powi(1.0 - t * t, 2)).epsilon(1e-8));
        CHECK(P.deriv(t) == doctest::Approx(-4.0 * t * (1.0 - t * t)).epsilon(1e-6));
    }
    // derivative evaluator is the exact derivative of the value interpolant
    for (double t : {-0.5, 0.1, 0.77}) {
        const double fd = (P(t + 1e-6) - P(t - 1e-6)) / 2e-6;
        CHECK(std::abs(fd - P.deriv(t)) <= 1e-8 * std::max(1.0, std::abs(P.deriv(t))));
    }
}

TEST_CASE("params validation") {
    EnergyParams params;
    params.p = 0.9;
    CHECK_THROWS_AS(params.validate(), validation_error);
    params.p = 2.0;
    params.m = 1.5;
    CHECK_NOTHROW(params.validate());
    CHECK_FALSE(params.slow_decay_regime());
    CHECK_THROWS_AS(params.require_slow_decay("test"), validation_error);
    params.m = 4.0;
    CHECK(params.q() == doctest::Approx(4.0));
    CHECK(params.gamma() == doctest::Approx(3.0));
}
