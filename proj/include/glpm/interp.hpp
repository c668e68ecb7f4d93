#pragma once

#include <span>
#include <vector>

namespace glpm {

// Piecewise cubic Hermite interpolant on a strictly increasing abscissa.
// Slopes are either supplied (tabulated data carrying derivatives) or built
// with the Fritsch-Carlson limiter, which keeps the interpolant monotone on
// monotone data.
class CubicHermite {
public:
    CubicHermite() = default;

    static CubicHermite with_slopes(std::vector<double> x, std::vector<double> y,
                                    std::vector<double> d);
    static CubicHermite monotone(std::vector<double> x, std::vector<double> y);

    // Evaluation clamps to the endpoint values outside [x.front(), x.back()].
    double eval(double xq) const;
    double deriv(double xq) const;

    bool empty() const { return x_.empty(); }
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

private:
    std::size_t segment(double xq) const;

    std::vector<double> x_, y_, d_;
};

} // namespace glpm
