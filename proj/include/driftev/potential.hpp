#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "driftev/grid.hpp"

namespace driftev {

/// Catalog of 1D velocity potentials b with drift a = b'.
enum class PotentialKind {
    PowerLaw,  ///< b = |x|^alpha / alpha, a = |x|^alpha / x (alpha >= 1)
    Constant,  ///< b = c x, a = c
    Sine,      ///< b = -cos x, a = sin x
    Quartic,   ///< b = (x^2 - 1)^2 / 4, a = x^3 - x
};

struct PotentialSpec {
    PotentialKind kind = PotentialKind::PowerLaw;
    double alpha = 2.0;  // power law exponent
    double c = 0.0;      // constant drift

    /// Parses "power", "const", "sine" or "quartic".
    static PotentialSpec from_id(std::string_view id, double alpha = 2.0, double c = 0.0);
    std::string id() const;
};

/// Sampled velocity potential on a Grid1D.
///
/// b holds n+2 samples (both endpoints included), a and the optional b''
/// hold n interior samples. Potentials built from the catalog also keep the
/// closed-form b so that off-grid values (cell midpoints) are exact.
class Potential1D {
public:
    Potential1D(Grid1D grid, std::vector<double> b_ext, std::vector<double> a,
                std::optional<std::vector<double>> bpp = std::nullopt,
                std::function<double(double)> closure = {}, std::string name = "sampled");

    /// Potential from samples of b alone; a by centered differences, no b''.
    static Potential1D from_samples(const Grid1D& grid, std::vector<double> b_ext);

    const Grid1D& grid() const { return grid_; }
    std::span<const double> b() const { return b_; }
    std::span<const double> a() const { return a_; }
    bool has_bpp() const { return bpp_.has_value(); }
    std::span<const double> bpp() const;
    bool has_closure() const { return static_cast<bool>(closure_); }
    const std::string& name() const { return name_; }
    /// Catalog entry this potential was built from, if any.
    const std::optional<PotentialSpec>& spec() const { return spec_; }

    /// b at an arbitrary point of [-l, l]: closed form when available, else
    /// the quadratic interpolant through the three nearest samples.
    double b_at(double x) const;

    /// div a at interior nodes: b'' when present, otherwise centered
    /// differences of a with one-sided second-order stencils at the ends.
    std::vector<double> div_a() const;

    double b_min() const;
    double b_max() const;
    double max_abs_a() const;

private:
    Grid1D grid_;
    std::vector<double> b_;
    std::vector<double> a_;
    std::optional<std::vector<double>> bpp_;
    std::function<double(double)> closure_;
    std::string name_;
    std::optional<PotentialSpec> spec_;

    friend Potential1D build_potential_1d(const PotentialSpec& spec, const Grid1D& grid);
};

Potential1D build_potential_1d(const PotentialSpec& spec, const Grid1D& grid);

/// One compactly supported radial bump coeff * alpha(x - center; R) with
/// alpha(x; R) = (x/|x|) sin(pi |x| / R) for |x| <= R.
struct Bump {
    double cx = 0.0, cy = 0.0;
    double radius = 0.5;
    double coeff = 1.0;
};

enum class FieldKind {
    Constant,   ///< a = (c1, c2)
    Bumps,      ///< sum of radial bumps, disjoint supports
    Separable,  ///< a = (a1(x1), a2(x2)) from two 1D catalog entries
};

struct FieldSpec {
    FieldKind kind = FieldKind::Constant;
    double c1 = 0.0, c2 = 0.0;
    std::vector<Bump> bumps;
    PotentialSpec axis_x, axis_y;
    bool require_disjoint = false;

    /// Single bump of radius R at the origin.
    static FieldSpec vortex(double radius = 0.5);
    /// alpha(x - (1/2, 2/5); 2/5) + 2 alpha(x - (-2/3, -3/10); 1/4).
    static FieldSpec two_bump();
    static FieldSpec constant(double c1, double c2);
    static FieldSpec separable(PotentialSpec x_axis, PotentialSpec y_axis);
    /// Parses "vortex", "twobump", "const", "linear" (a = (x1, x2)).
    static FieldSpec from_id(std::string_view id, double radius = 0.5, double c1 = 0.0,
                             double c2 = 0.0);
};

/// Drift field on a Grid2D, all arrays on the full lattice (boundary included).
class Field2D {
public:
    Field2D(Grid2D grid, std::vector<double> b, std::vector<double> a1, std::vector<double> a2,
            std::optional<std::vector<double>> diva, std::string name);

    const Grid2D& grid() const { return grid_; }
    std::span<const double> b() const { return b_; }
    std::span<const double> a1() const { return a1_; }
    std::span<const double> a2() const { return a2_; }
    bool has_diva() const { return diva_.has_value(); }
    const std::string& name() const { return name_; }

    /// div a on the full lattice (analytic, or centered differences; the
    /// boundary ring uses one-sided second-order stencils).
    std::vector<double> div_a() const;
    double max_abs_a() const;

private:
    Grid2D grid_;
    std::vector<double> b_, a1_, a2_;
    std::optional<std::vector<double>> diva_;
    std::string name_;
};

Field2D build_field_2d(const FieldSpec& spec, const Grid2D& grid);

/// q(x, p) = -(p/2) div a + (p^2/4) |a|^2 at the interior nodes.
std::vector<double> liouville_q(const Potential1D& pot, double p);
/// Same on the interior of a 2D field; result is nx*ny, x-fastest.
std::vector<double> liouville_q(const Field2D& field, double p);

/// Result of the sampled Assumption-AB test on [0, l].
struct AssumptionAB {
    bool holds = false;
    bool odd = false;
    double b1 = 0.0, b2 = 0.0;
    double max_b1_x = 0.0;  ///< largest x in B1
    double min_b2_x = 0.0;  ///< smallest x in B2
    std::string diagnostic;
};

/// Default membership tolerance: one grid cell of slack in b, h max|a|.
double default_tolerance(const Potential1D& pot);
double default_tolerance(const Field2D& field);

AssumptionAB check_assumption_ab(const Potential1D& pot, std::optional<double> tol = std::nullopt);

}  // namespace driftev
