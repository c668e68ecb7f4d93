#include "glpm/grid.hpp"

#include <algorithm>
#include <cmath>

#include "glpm/numerics.hpp"

namespace glpm {

Grid Grid::box(int n, std::array<double, 3> lengths, double h, std::array<double, 3> center) {
    if (n < 1 || n > 3) throw validation_error("Grid::box: dimension must be 1..3");
    if (!(h > 0.0)) throw validation_error("Grid::box: spacing must be positive");
    Grid g;
    g.n = n;
    g.h = h;
    for (int a = 0; a < 3; ++a) {
        if (a >= n) {
            g.shape[a] = 1;
            g.origin[a] = 0.0;
            continue;
        }
        const int cells = static_cast<int>(std::lround(lengths[a] / h));
        if (cells < 4) throw validation_error("Grid::box: fewer than 4 cells along an axis");
        g.shape[a] = cells;
        g.origin[a] = center[a] - 0.5 * cells * h + 0.5 * h;
    }
    return g;
}

double Grid::cell_volume() const {
    return powi(h, n);
}

std::array<int, 3> Grid::unravel(std::size_t idx) const {
    std::array<int, 3> c;
    c[0] = static_cast<int>(idx % shape[0]);
    idx /= shape[0];
    c[1] = static_cast<int>(idx % shape[1]);
    c[2] = static_cast<int>(idx / shape[1]);
    return c;
}

std::array<double, 3> Grid::coord(std::size_t idx) const {
    const auto c = unravel(idx);
    return {origin[0] + c[0] * h, origin[1] + c[1] * h, origin[2] + c[2] * h};
}

bool Grid::same_as(const Grid& g) const {
    return n == g.n && shape == g.shape && h == g.h && origin == g.origin;
}

Field Field::constant(const Grid& g, double v) {
    Field f;
    f.grid = g;
    f.values.assign(g.size(), std::clamp(v, -1.0, 1.0));
    return f;
}

Field Field::from_function(const Grid& g,
                           const std::function<double(std::array<double, 3>)>& fn) {
    Field f;
    f.grid = g;
    f.values.resize(g.size());
    for (std::size_t i = 0; i < f.values.size(); ++i)
        f.values[i] = std::clamp(fn(g.coord(i)), -1.0, 1.0);
    return f;
}

void Field::clamp_range() {
    for (double& v : values) v = std::clamp(v, -1.0, 1.0);
}

Region Region::full(const Grid& g) {
    Region r;
    r.grid = g;
    r.mask.assign(g.size(), 1);
    r.count = g.size();
    return r;
}

Region Region::from_mask(const Grid& g, std::vector<std::uint8_t> mask) {
    if (mask.size() != g.size()) throw validation_error("Region: mask size mismatch");
    Region r;
    r.grid = g;
    r.mask = std::move(mask);
    r.count = static_cast<std::size_t>(std::count(r.mask.begin(), r.mask.end(), 1));
    return r;
}

namespace {

double dist_to(const Grid& g, std::size_t idx, const std::array<double, 3>& center) {
    const auto x = g.coord(idx);
    double d2 = 0.0;
    for (int a = 0; a < g.n; ++a) d2 += (x[a] - center[a]) * (x[a] - center[a]);
    return std::sqrt(d2);
}

} // namespace

Region ball_mask_unchecked(const Grid& g, std::array<double, 3> center, double R) {
    Region r;
    r.grid = g;
    r.mask.assign(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (dist_to(g, i, center) <= R) {
            r.mask[i] = 1;
            ++r.count;
        }
    }
    return r;
}

Region ball_mask(const Grid& g, std::array<double, 3> center, double R) {
    if (!(R >= 0.0)) throw validation_error("ball_mask: radius must be nonnegative");
    for (int a = 0; a < g.n; ++a) {
        if (center[a] - R < g.axis_lo(a) - 1e-12 || center[a] + R > g.axis_hi(a) + 1e-12)
            throw geometry_error("ball_mask: ball of radius " + std::to_string(R) +
                                 " does not fit inside the grid box");
    }
    return ball_mask_unchecked(g, center, R);
}

namespace {

// Forward difference pair along axis a for cell c: the two cells whose
// values form D_a u. At the upper face the backward pair is used.
struct DiffPair {
    std::size_t lo, hi;
};

inline DiffPair diff_pair(const Grid& g, const std::array<int, 3>& c, std::size_t idx, int a) {
    const std::size_t stride = a == 0 ? 1
                             : a == 1 ? static_cast<std::size_t>(g.shape[0])
                                      : static_cast<std::size_t>(g.shape[0]) * g.shape[1];
    if (c[a] < g.shape[a] - 1) return {idx, idx + stride};
    return {idx - stride, idx};
}

// Dispatch the well evaluation once per loop, not per cell.
struct WellEval {
    const Potential* P;
    bool is_model;
    double m;
    double value(double u) const {
        if (is_model) {
            const double s = 1.0 - u * u;
            return pow_fast(s, m);
        }
        return (*P)(u);
    }
    double slope(double u) const {
        if (is_model) {
            if (std::abs(u) >= 1.0) return m > 1.0 ? 0.0 : -2.0 * m * u;
            return -2.0 * m * u * pow_fast(1.0 - u * u, m - 1.0);
        }
        return P->deriv_extended(u);
    }
};

WellEval make_well(const Potential& P) {
    return {&P, P.kind() == PotentialKind::model, P.m()};
}

} // namespace

GradientField gradient(const Field& u, double eps_reg) {
    const Grid& g = u.grid;
    GradientField out;
    for (int a = 0; a < g.n; ++a) out.comp[a].assign(g.size(), 0.0);
    out.gmag_eps.assign(g.size(), 0.0);
    const double inv_h = 1.0 / g.h;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto c = g.unravel(i);
        double g2 = eps_reg * eps_reg;
        for (int a = 0; a < g.n; ++a) {
            const auto pr = diff_pair(g, c, i, a);
            const double d = (u.values[pr.hi] - u.values[pr.lo]) * inv_h;
            out.comp[a][i] = d;
            g2 += d * d;
        }
        out.gmag_eps[i] = std::sqrt(g2);
    }
    return out;
}

namespace {

// The gradient part of the energy sums each forward face once; the last
// cell along an axis carries no face of its own. This makes the exact
// energy gradient coincide with the flux-form divergence at interior cells.
double energy_impl(const Field& u, const std::uint8_t* mask, const EnergyParams& params,
                   const Potential& P) {
    const Grid& g = u.grid;
    const double eps2 = params.grad_eps() * params.grad_eps();
    const double inv_h = 1.0 / g.h;
    const double half_p = 0.5 * params.p;
    const WellEval well = make_well(P);
    long double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (mask && !mask[i]) continue;
        const auto c = g.unravel(i);
        double g2 = eps2;
        for (int a = 0; a < g.n; ++a) {
            if (c[a] >= g.shape[a] - 1) continue;
            const std::size_t stride = a == 0 ? 1
                                     : a == 1 ? static_cast<std::size_t>(g.shape[0])
                                              : static_cast<std::size_t>(g.shape[0]) * g.shape[1];
            const double d = (u.values[i + stride] - u.values[i]) * inv_h;
            g2 += d * d;
        }
        acc += pow_fast(g2, half_p) + well.value(u.values[i]);
    }
    return static_cast<double>(acc) * g.cell_volume();
}

} // namespace

double energy(const Field& u, const Region& region, const EnergyParams& params,
              const Potential& P) {
    if (!region.grid.same_as(u.grid)) throw validation_error("energy: region grid mismatch");
    return energy_impl(u, region.mask.data(), params, P);
}

double energy(const Field& u, const EnergyParams& params, const Potential& P) {
    return energy_impl(u, nullptr, params, P);
}

double energy_and_gradient(const Field& u, const EnergyParams& params, const Potential& P,
                           std::span<double> grad) {
    const Grid& g = u.grid;
    if (grad.size() != g.size()) throw validation_error("energy_and_gradient: size mismatch");
    const double eps2 = params.grad_eps() * params.grad_eps();
    const double inv_h = 1.0 / g.h;
    const double vol = g.cell_volume();
    const double half_p = 0.5 * params.p;
    const WellEval well = make_well(P);
    std::fill(grad.begin(), grad.end(), 0.0);
    long double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto c = g.unravel(i);
        double g2 = eps2;
        std::size_t strides[3];
        double d[3];
        int nfaces = 0;
        for (int a = 0; a < g.n; ++a) {
            if (c[a] >= g.shape[a] - 1) continue;
            const std::size_t stride = a == 0 ? 1
                                     : a == 1 ? static_cast<std::size_t>(g.shape[0])
                                              : static_cast<std::size_t>(g.shape[0]) * g.shape[1];
            strides[nfaces] = stride;
            d[nfaces] = (u.values[i + stride] - u.values[i]) * inv_h;
            g2 += d[nfaces] * d[nfaces];
            ++nfaces;
        }
        acc += pow_fast(g2, half_p) + well.value(u.values[i]);
        // d/dD_a of g^p is p g^{p-2} D_a
        const double gp2 = params.p * pow_fast(g2, half_p - 1.0);
        for (int k = 0; k < nfaces; ++k) {
            const double flux = vol * gp2 * d[k] * inv_h;
            grad[i + strides[k]] += flux;
            grad[i] -= flux;
        }
        grad[i] += vol * well.slope(u.values[i]);
    }
    return static_cast<double>(acc) * vol;
}

ResidualField p_laplacian_residual(const Field& u, const EnergyParams& params,
                                   const Potential& P) {
    if (params.p < 2.0 && params.grad_eps() <= 0.0)
        throw validation_error("p_laplacian_residual: eps_reg must be positive for p < 2");
    const Grid& g = u.grid;
    ResidualField out;
    out.values.assign(g.size(), 0.0);
    out.interior.assign(g.size(), 1);
    energy_and_gradient(u, params, P, out.values);
    const double inv_vol = 1.0 / g.cell_volume();
    for (std::size_t i = 0; i < g.size(); ++i) {
        out.values[i] *= -inv_vol;
        const auto c = g.unravel(i);
        for (int a = 0; a < g.n; ++a)
            if (c[a] == 0 || c[a] == g.shape[a] - 1) out.interior[i] = 0;
    }
    return out;
}

} // namespace glpm
