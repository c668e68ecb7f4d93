#include "glpm/interp.hpp"

#include <algorithm>
#include <cmath>

#include "glpm/errors.hpp"

namespace glpm {

CubicHermite CubicHermite::with_slopes(std::vector<double> x, std::vector<double> y,
                                       std::vector<double> d) {
    if (x.size() < 2 || x.size() != y.size() || x.size() != d.size())
        throw validation_error("CubicHermite: need >= 2 nodes with matching sizes");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw validation_error("CubicHermite: abscissa must be strictly increasing");
    CubicHermite c;
    c.x_ = std::move(x);
    c.y_ = std::move(y);
    c.d_ = std::move(d);
    return c;
}

CubicHermite CubicHermite::monotone(std::vector<double> x, std::vector<double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n)
        throw validation_error("CubicHermite: need >= 2 nodes with matching sizes");
    std::vector<double> d(n, 0.0), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);

    d[0] = delta[0];
    d[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d[i] = 0.0;
        } else {
            // Fritsch-Carlson weighted harmonic mean.
            const double w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
            const double w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // Endpoint slopes limited to preserve monotonicity of the first/last panel.
    auto limit_end = [](double& de, double del) {
        if (de * del <= 0.0)
            de = 0.0;
        else if (std::abs(de) > 3.0 * std::abs(del))
            de = 3.0 * del;
    };
    limit_end(d[0], delta[0]);
    limit_end(d[n - 1], delta[n - 2]);
    return with_slopes(std::move(x), std::move(y), std::move(d));
}

std::size_t CubicHermite::segment(double xq) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), xq);
    if (it == x_.begin()) return 0;
    std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(i, x_.size() - 2);
}

double CubicHermite::eval(double xq) const {
    if (xq <= x_.front()) return y_.front();
    if (xq >= x_.back()) return y_.back();
    const std::size_t i = segment(xq);
    const double hseg = x_[i + 1] - x_[i];
    const double t = (xq - x_[i]) / hseg;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[i] + h10 * hseg * d_[i] + h01 * y_[i + 1] + h11 * hseg * d_[i + 1];
}

double CubicHermite::deriv(double xq) const {
    if (xq <= x_.front()) return d_.front();
    if (xq >= x_.back()) return d_.back();
    const std::size_t i = segment(xq);
    const double hseg = x_[i + 1] - x_[i];
    const double t = (xq - x_[i]) / hseg;
    const double t2 = t * t;
    const double g00 = (6 * t2 - 6 * t) / hseg;
    const double g10 = 3 * t2 - 4 * t + 1;
    const double g01 = (-6 * t2 + 6 * t) / hseg;
    const double g11 = 3 * t2 - 2 * t;
    return g00 * y_[i] + g10 * d_[i] + g01 * y_[i + 1] + g11 * d_[i + 1];
}

} // namespace glpm
