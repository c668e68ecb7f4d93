#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace glpm {

// x^k by binary exponentiation, k >= 0.
inline double powi(double x, int k) {
    double r = 1.0;
    while (k > 0) {
        if (k & 1) r *= x;
        x *= x;
        k >>= 1;
    }
    return r;
}

// x^a with fast paths for small integer and half-integer exponents, x >= 0.
inline double pow_fast(double x, double a) {
    const int k = static_cast<int>(a);
    if (a == static_cast<double>(k) && k >= 0 && k <= 64) return powi(x, k);
    const int k2 = static_cast<int>(2.0 * a);
    if (2.0 * a == static_cast<double>(k2) && k2 >= 0 && k2 <= 64) return powi(std::sqrt(x), k2);
    return std::pow(x, a);
}

// Deterministic RNG wrapper. Uniform doubles are derived from the raw 64-bit
// stream directly so that sequences are reproducible bit-for-bit.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    std::uint64_t bits() { return eng_(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }

private:
    std::mt19937_64 eng_;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
};

// Ordinary least squares fit y ~ slope*x + intercept.
inline LineFit least_squares_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::abs(y[i] - (f.intercept + f.slope * x[i]));
        if (r > f.max_residual) f.max_residual = r;
    }
    return f;
}

// Sum of (1+j)^{-q} over j >= 0 for q > 1, with an integral-remainder closure.
inline double weight_series_sum(double q) {
    double s = 0.0;
    const int J = 200000;
    for (int j = 0; j < J; ++j) s += std::pow(1.0 + j, -q);
    // Euler-Maclaurin remainder for the tail starting at J+1.
    const double a = static_cast<double>(J + 1);
    s += std::pow(a, 1.0 - q) / (q - 1.0) + 0.5 * std::pow(a, -q);
    return s;
}

} // namespace glpm
