#include "glpm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "glpm/errors.hpp"

namespace glpm {

namespace {

// Kronrod-15 abscissae and weights on [-1,1]; gauss_w holds the embedded
// 7-point weights at the odd Kronrod nodes.
constexpr double kr_x[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769, -0.741531185599394,
    -0.586087235467691, -0.405845151377397, -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
constexpr double kr_w[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
constexpr double gs_w[7] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                            0.417959183673469, 0.381830050505119, 0.279705391489277,
                            0.129484966168870};

} // namespace

double gauss_kronrod_15(const std::function<double(double)>& f, double a, double b,
                        double* abs_err) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    double k15 = 0.0, g7 = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double y = f(c + hw * kr_x[i]);
        k15 += kr_w[i] * y;
        if (i % 2 == 1) g7 += gs_w[i / 2] * y;
    }
    k15 *= hw;
    g7 *= hw;
    if (abs_err) {
        const double d = std::abs(k15 - g7);
        *abs_err = d * std::sqrt(std::max(d, 1e-300)) * 200.0;
    }
    return k15;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double abs_tol, int max_intervals) {
    if (a == b) return 0.0;
    struct Seg {
        double a, b, val, err;
    };
    std::vector<Seg> stack;
    double err0;
    double val0 = gauss_kronrod_15(f, a, b, &err0);
    stack.push_back({a, b, val0, err0});
    double total = val0, total_err = err0;
    int used = 1;
    while (!stack.empty()) {
        if (total_err <= rel_tol * std::abs(total) + abs_tol) break;
        // refine the segment with the largest error
        auto worst = std::max_element(stack.begin(), stack.end(),
                                      [](const Seg& s, const Seg& t) { return s.err < t.err; });
        if (used >= max_intervals) break;
        Seg s = *worst;
        stack.erase(worst);
        const double mid = 0.5 * (s.a + s.b);
        double e1, e2;
        const double v1 = gauss_kronrod_15(f, s.a, mid, &e1);
        const double v2 = gauss_kronrod_15(f, mid, s.b, &e2);
        total += v1 + v2 - s.val;
        total_err += e1 + e2 - s.err;
        stack.push_back({s.a, mid, v1, e1});
        stack.push_back({mid, s.b, v2, e2});
        ++used;
    }
    return total;
}

double integrate_endpoint_singular(const std::function<double(double)>& f, double a, double b,
                                   double alpha_lo, double alpha_hi, double rel_tol,
                                   double min_offset) {
    if (alpha_lo < 0.0 || alpha_lo >= 1.0 || alpha_hi < 0.0 || alpha_hi >= 1.0)
        throw validation_error("integrate_endpoint_singular: exponents must lie in [0, 1)");
    if (min_offset < 0.0) min_offset = 1e-13 * (b - a);
    const double mid = 0.5 * (a + b);
    double left, right;
    if (alpha_lo > 0.0) {
        // x = a + xi^k with k = 1/(1 - alpha): the transformed integrand is bounded.
        const double k = 1.0 / (1.0 - alpha_lo);
        const double xi_max = std::pow(mid - a, 1.0 / k);
        const double xi_cut = std::pow(min_offset, 1.0 / k);
        auto g = [&](double xi) {
            const double x = std::max(xi, xi_cut);
            return f(a + std::pow(x, k)) * k * std::pow(x, k - 1.0);
        };
        left = integrate_adaptive(g, 0.0, xi_max, rel_tol);
    } else {
        left = integrate_adaptive(f, a, mid, rel_tol);
    }
    if (alpha_hi > 0.0) {
        const double k = 1.0 / (1.0 - alpha_hi);
        const double xi_max = std::pow(b - mid, 1.0 / k);
        const double xi_cut = std::pow(min_offset, 1.0 / k);
        auto g = [&](double xi) {
            const double x = std::max(xi, xi_cut);
            return f(b - std::pow(x, k)) * k * std::pow(x, k - 1.0);
        };
        right = integrate_adaptive(g, 0.0, xi_max, rel_tol);
    } else {
        right = integrate_adaptive(f, mid, b, rel_tol);
    }
    return left + right;
}

QuadNodes gauss_legendre(int n, double a, double b) {
    QuadNodes q;
    q.x.resize(n);
    q.w.resize(n);
    // Newton iteration from the Chebyshev-like initial guess.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double wi = 2.0 / ((1.0 - x * x) * pp * pp);
        q.x[i] = 0.5 * (a + b) - 0.5 * (b - a) * x;
        q.x[n - 1 - i] = 0.5 * (a + b) + 0.5 * (b - a) * x;
        q.w[i] = q.w[n - 1 - i] = 0.5 * (b - a) * wi;
    }
    return q;
}

} // namespace glpm
