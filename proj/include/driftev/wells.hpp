#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "driftev/potential.hpp"

namespace driftev {

/// Geometry of a full lattice (boundary ring included). 1D lattices have
/// fy == 1 and only the two end nodes are boundary.
struct Lattice {
    std::size_t fx = 0, fy = 1;
    double hx = 0.0, hy = 0.0;
    double x0 = 0.0, y0 = 0.0;  ///< coordinates of full index (0, 0)

    static Lattice of(const Grid1D& g);
    static Lattice of(const Grid2D& g);

    int dim() const { return fy == 1 ? 1 : 2; }
    std::size_t size() const { return fx * fy; }
    bool on_boundary(std::size_t k) const;
    double cell_volume() const { return dim() == 1 ? hx : hx * hy; }
    double x(std::size_t k) const { return x0 + static_cast<double>(k % fx) * hx; }
    double y(std::size_t k) const { return dim() == 1 ? 0.0 : y0 + static_cast<double>(k / fx) * hy; }

    /// Calls f(neighbor, spacing) for each 2- or 4-neighbour of k.
    template <class F>
    void for_each_neighbor(std::size_t k, F&& f) const {
        const std::size_t i = k % fx, j = k / fx;
        if (i > 0) f(k - 1, hx);
        if (i + 1 < fx) f(k + 1, hx);
        if (fy > 1) {
            if (j > 0) f(k - fx, hy);
            if (j + 1 < fy) f(k + fx, hy);
        }
    }
};

/// One potential well from sublevel persistence of b.
///
/// region_mask is the component of {b < barrier_value} holding the minimum;
/// regions of two wells are either disjoint or nested. basin_mask is the
/// component of {b < basin_level} where basin_level is the first level at
/// which the well's component touched any other component; basins of
/// distinct wells are pairwise disjoint.
struct Well {
    std::size_t min_node = 0;  ///< full-lattice index of the minimum
    double x = 0.0, y = 0.0;
    double min_value = 0.0;
    double barrier_value = 0.0;
    double depth = 0.0;
    bool dies_into_boundary = false;
    std::vector<std::uint8_t> region_mask;
    double basin_level = 0.0;
    std::vector<std::uint8_t> basin_mask;

    /// Well restricted to its basin: barrier = basin_level, region = basin.
    Well basin_well() const;
};

struct WellReport {
    Lattice lattice;
    std::vector<Well> wells;  ///< sorted by decreasing depth
    std::optional<std::size_t> deepest;
    double b0 = 0.0;  ///< maximal depth, 0 when there is no well
};

/// Sublevel persistence on a full lattice. The boundary ring acts as a single
/// component that appears at the minimum boundary value and never dies.
WellReport detect_wells(const Lattice& lattice, std::span<const double> b, double tol);
WellReport detect_wells(const Potential1D& pot, std::optional<double> tol = std::nullopt);
WellReport detect_wells(const Field2D& field, std::optional<double> tol = std::nullopt);

/// Component of {b < level} containing seed (interior nodes only).
std::vector<std::uint8_t> sublevel_component(const Lattice& lattice, std::span<const double> b,
                                             std::size_t seed, double level);

}  // namespace driftev
