#pragma once

#include <cstddef>

#include "driftev/error.hpp"

namespace driftev {

/// Uniform grid on (-l, l) with n interior nodes; node i sits at -l + (i+1)h.
/// Endpoints are index -1 and n in node numbering.
struct Grid1D {
    double l = 1.0;
    std::size_t n = 0;
    double h = 0.0;

    Grid1D() = default;
    Grid1D(double half_length, std::size_t interior)
        : l(half_length), n(interior), h(2.0 * half_length / static_cast<double>(interior + 1)) {
        if (!(half_length > 0.0)) throw InvalidArgument("Grid1D: half-length must be positive");
        if (interior < 3) throw InvalidArgument("Grid1D: need at least 3 interior nodes");
    }

    double x(std::size_t i) const { return -l + static_cast<double>(i + 1) * h; }
    /// Coordinate of extended index k = 0..n+1 (k = 0 is -l, k = n+1 is +l).
    double x_ext(std::size_t k) const { return -l + static_cast<double>(k) * h; }

    friend bool operator==(const Grid1D&, const Grid1D&) = default;
};

/// Tensor grid on (-lx, lx) x (-ly, ly). Full-lattice arrays (including the
/// boundary ring) are (nx+2) x (ny+2), x-fastest.
struct Grid2D {
    double lx = 1.0, ly = 1.0;
    std::size_t nx = 0, ny = 0;
    double hx = 0.0, hy = 0.0;

    Grid2D() = default;
    Grid2D(double half_x, double half_y, std::size_t interior_x, std::size_t interior_y)
        : lx(half_x), ly(half_y), nx(interior_x), ny(interior_y),
          hx(2.0 * half_x / static_cast<double>(interior_x + 1)),
          hy(2.0 * half_y / static_cast<double>(interior_y + 1)) {
        if (!(half_x > 0.0) || !(half_y > 0.0))
            throw InvalidArgument("Grid2D: half-lengths must be positive");
        if (interior_x < 3 || interior_y < 3)
            throw InvalidArgument("Grid2D: need at least 3 interior nodes per axis");
    }

    std::size_t full_x() const { return nx + 2; }
    std::size_t full_y() const { return ny + 2; }
    std::size_t full_size() const { return full_x() * full_y(); }
    std::size_t interior_size() const { return nx * ny; }

    /// Full-lattice index; i in [0, nx+1], j in [0, ny+1].
    std::size_t at(std::size_t i, std::size_t j) const { return j * full_x() + i; }
    double x(std::size_t i) const { return -lx + static_cast<double>(i) * hx; }
    double y(std::size_t j) const { return -ly + static_cast<double>(j) * hy; }
    bool on_boundary(std::size_t i, std::size_t j) const {
        return i == 0 || j == 0 || i == nx + 1 || j == ny + 1;
    }

    friend bool operator==(const Grid2D&, const Grid2D&) = default;
};

}  // namespace driftev
