#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "glpm/params.hpp"
#include "glpm/potential.hpp"

namespace glpm {

// Uniform lattice of cell centers in 1, 2 or 3 dimensions. Axis 0 is the
// fastest-running index. Axes beyond n have extent 1.
struct Grid {
    int n = 1;
    std::array<int, 3> shape{1, 1, 1};
    double h = 1.0;
    std::array<double, 3> origin{0.0, 0.0, 0.0}; // center of cell (0,0,0)

    // Box of the given side lengths centered at `center`, with cells of
    // spacing h. Side lengths are rounded to whole cells.
    static Grid box(int n, std::array<double, 3> lengths, double h,
                    std::array<double, 3> center = {0.0, 0.0, 0.0});

    std::size_t size() const {
        return static_cast<std::size_t>(shape[0]) * shape[1] * shape[2];
    }
    double cell_volume() const;
    std::array<int, 3> unravel(std::size_t idx) const;
    std::size_t ravel(const std::array<int, 3>& c) const {
        return (static_cast<std::size_t>(c[2]) * shape[1] + c[1]) * shape[0] + c[0];
    }
    std::array<double, 3> coord(std::size_t idx) const;
    double axis_lo(int a) const { return origin[a] - 0.5 * h; }
    double axis_hi(int a) const { return origin[a] + (shape[a] - 1) * h + 0.5 * h; }
    bool same_as(const Grid& g) const;
};

// Scalar grid function with values kept in [-1, 1].
struct Field {
    Grid grid;
    std::vector<double> values;

    static Field constant(const Grid& g, double v);
    static Field from_function(const Grid& g,
                               const std::function<double(std::array<double, 3>)>& f);
    void clamp_range();
};

struct Region {
    Grid grid;
    std::vector<std::uint8_t> mask;
    std::size_t count = 0;

    double volume() const { return static_cast<double>(count) * grid.cell_volume(); }
    static Region full(const Grid& g);
    static Region from_mask(const Grid& g, std::vector<std::uint8_t> mask);
};

// Cells whose centers lie within distance R of `center`. Throws
// geometry_error when the ball does not fit inside the grid box.
Region ball_mask(const Grid& g, std::array<double, 3> center, double R);
// Same predicate without the fit requirement (internal measurements).
Region ball_mask_unchecked(const Grid& g, std::array<double, 3> center, double R);

// Forward differences per axis with one-sided closure at the upper face,
// plus the regularized magnitude (|grad u|^2 + eps^2)^{1/2}.
struct GradientField {
    std::array<std::vector<double>, 3> comp;
    std::vector<double> gmag_eps;
};
GradientField gradient(const Field& u, double eps_reg);

// Energy of the field over a region (or the whole grid):
// sum over cells of (gmag_eps^p + W(u)) * h^n.
double energy(const Field& u, const Region& region, const EnergyParams& params,
              const Potential& P);
double energy(const Field& u, const EnergyParams& params, const Potential& P);

// Exact partial derivatives dE/du_i of the whole-grid energy. `grad` must
// have one entry per cell.
double energy_and_gradient(const Field& u, const EnergyParams& params, const Potential& P,
                           std::span<double> grad);

// Flux-form p-Laplacian residual p div(g^{p-2} grad u) - W'(u); equals the
// negated energy gradient scaled by h^{-n}. Boundary rows are computed with
// the one-sided closure and flagged non-interior.
struct ResidualField {
    std::vector<double> values;
    std::vector<std::uint8_t> interior;
};
ResidualField p_laplacian_residual(const Field& u, const EnergyParams& params,
                                   const Potential& P);

} // namespace glpm
