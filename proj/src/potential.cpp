#include "driftev/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace driftev {

namespace {

constexpr double kPi = std::numbers::pi;

void require_finite(std::span<const double> v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw InvalidArgument(std::string(what) + ": non-finite sample");
}

struct Analytic1D {
    std::function<double(double)> b, a, bpp;  // bpp empty when b is not W^{2,inf}
};

Analytic1D analytic_of(const PotentialSpec& spec) {
    switch (spec.kind) {
        case PotentialKind::PowerLaw: {
            const double al = spec.alpha;
            if (!(al >= 1.0)) throw InvalidArgument("power law requires alpha >= 1");
            Analytic1D f;
            f.b = [al](double x) { return std::pow(std::abs(x), al) / al; };
            f.a = [al](double x) {
                if (x == 0.0) return 0.0;
                return std::copysign(std::pow(std::abs(x), al - 1.0), x);
            };
            if (al == 2.0)
                f.bpp = [](double) { return 1.0; };
            else if (al > 2.0)
                f.bpp = [al](double x) { return (al - 1.0) * std::pow(std::abs(x), al - 2.0); };
            return f;
        }
        case PotentialKind::Constant: {
            const double c = spec.c;
            return {[c](double x) { return c * x; }, [c](double) { return c; },
                    [](double) { return 0.0; }};
        }
        case PotentialKind::Sine:
            return {[](double x) { return -std::cos(x); }, [](double x) { return std::sin(x); },
                    [](double x) { return std::cos(x); }};
        case PotentialKind::Quartic:
            return {[](double x) {
                        const double s = x * x - 1.0;
                        return 0.25 * s * s;
                    },
                    [](double x) { return x * x * x - x; },
                    [](double x) { return 3.0 * x * x - 1.0; }};
    }
    throw InvalidArgument("unknown potential kind");
}

}  // namespace

PotentialSpec PotentialSpec::from_id(std::string_view id, double alpha, double c) {
    PotentialSpec s;
    s.alpha = alpha;
    s.c = c;
    if (id == "power")
        s.kind = PotentialKind::PowerLaw;
    else if (id == "const")
        s.kind = PotentialKind::Constant;
    else if (id == "sine")
        s.kind = PotentialKind::Sine;
    else if (id == "quartic")
        s.kind = PotentialKind::Quartic;
    else
        throw InvalidArgument("unknown potential catalog id '" + std::string(id) + "'");
    if (s.kind == PotentialKind::PowerLaw && !(alpha >= 1.0))
        throw InvalidArgument("power law requires alpha >= 1");
    return s;
}

std::string PotentialSpec::id() const {
    switch (kind) {
        case PotentialKind::PowerLaw: return "power";
        case PotentialKind::Constant: return "const";
        case PotentialKind::Sine: return "sine";
        case PotentialKind::Quartic: return "quartic";
    }
    return "?";
}

Potential1D::Potential1D(Grid1D grid, std::vector<double> b_ext, std::vector<double> a,
                         std::optional<std::vector<double>> bpp,
                         std::function<double(double)> closure, std::string name)
    : grid_(grid), b_(std::move(b_ext)), a_(std::move(a)), bpp_(std::move(bpp)),
      closure_(std::move(closure)), name_(std::move(name)) {
    if (grid_.n == 0) throw InvalidArgument("Potential1D: empty grid");
    if (b_.size() != grid_.n + 2) throw InvalidArgument("Potential1D: b needs n+2 samples");
    if (a_.size() != grid_.n) throw InvalidArgument("Potential1D: a needs n samples");
    require_finite(b_, "Potential1D b");
    require_finite(a_, "Potential1D a");
    if (bpp_) {
        if (bpp_->size() != grid_.n) throw InvalidArgument("Potential1D: b'' needs n samples");
        require_finite(*bpp_, "Potential1D b''");
    }
}

Potential1D Potential1D::from_samples(const Grid1D& grid, std::vector<double> b_ext) {
    if (b_ext.size() != grid.n + 2) throw InvalidArgument("from_samples: b needs n+2 samples");
    std::vector<double> a(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) a[i] = (b_ext[i + 2] - b_ext[i]) / (2.0 * grid.h);
    return Potential1D(grid, std::move(b_ext), std::move(a));
}

std::span<const double> Potential1D::bpp() const {
    if (!bpp_) throw InvalidArgument("Potential1D: no analytic b'' channel");
    return *bpp_;
}

double Potential1D::b_at(double x) const {
    if (closure_) return closure_(x);
    const double h = grid_.h;
    const std::size_t last = grid_.n + 1;
    const double s = (x + grid_.l) / h;
    // nearest sample, then a centred three-point stencil clamped to the lattice
    auto k = static_cast<std::ptrdiff_t>(std::lround(s));
    k = std::clamp<std::ptrdiff_t>(k, 1, static_cast<std::ptrdiff_t>(last) - 1);
    const double t = s - static_cast<double>(k);
    const double fm = b_[k - 1], f0 = b_[k], fp = b_[k + 1];
    return f0 + 0.5 * t * (fp - fm) + 0.5 * t * t * (fp - 2.0 * f0 + fm);
}

std::vector<double> Potential1D::div_a() const {
    if (bpp_) return *bpp_;
    const std::size_t n = grid_.n;
    const double h = grid_.h;
    std::vector<double> d(n);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (a_[i + 1] - a_[i - 1]) / (2.0 * h);
    d[0] = (-3.0 * a_[0] + 4.0 * a_[1] - a_[2]) / (2.0 * h);
    d[n - 1] = (3.0 * a_[n - 1] - 4.0 * a_[n - 2] + a_[n - 3]) / (2.0 * h);
    return d;
}

double Potential1D::b_min() const { return *std::min_element(b_.begin(), b_.end()); }
double Potential1D::b_max() const { return *std::max_element(b_.begin(), b_.end()); }
double Potential1D::max_abs_a() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

Potential1D build_potential_1d(const PotentialSpec& spec, const Grid1D& grid) {
    const Analytic1D f = analytic_of(spec);
    std::vector<double> b(grid.n + 2), a(grid.n);
    for (std::size_t k = 0; k < grid.n + 2; ++k) b[k] = f.b(grid.x_ext(k));
    for (std::size_t i = 0; i < grid.n; ++i) a[i] = f.a(grid.x(i));
    std::optional<std::vector<double>> bpp;
    if (f.bpp) {
        bpp.emplace(grid.n);
        for (std::size_t i = 0; i < grid.n; ++i) (*bpp)[i] = f.bpp(grid.x(i));
    }
    std::ostringstream name;
    name << spec.id();
    if (spec.kind == PotentialKind::PowerLaw) name << "(alpha=" << spec.alpha << ")";
    if (spec.kind == PotentialKind::Constant) name << "(c=" << spec.c << ")";
    Potential1D pot(grid, std::move(b), std::move(a), std::move(bpp), f.b, name.str());
    pot.spec_ = spec;
    return pot;
}

// ---------------------------------------------------------------------------
// 2D fields

FieldSpec FieldSpec::vortex(double radius) {
    FieldSpec s;
    s.kind = FieldKind::Bumps;
    s.bumps = {Bump{0.0, 0.0, radius, 1.0}};
    return s;
}

FieldSpec FieldSpec::two_bump() {
    FieldSpec s;
    s.kind = FieldKind::Bumps;
    s.bumps = {Bump{0.5, 0.4, 0.4, 1.0}, Bump{-2.0 / 3.0, -0.3, 0.25, 2.0}};
    s.require_disjoint = true;
    return s;
}

FieldSpec FieldSpec::constant(double c1, double c2) {
    FieldSpec s;
    s.kind = FieldKind::Constant;
    s.c1 = c1;
    s.c2 = c2;
    return s;
}

FieldSpec FieldSpec::separable(PotentialSpec x_axis, PotentialSpec y_axis) {
    FieldSpec s;
    s.kind = FieldKind::Separable;
    s.axis_x = x_axis;
    s.axis_y = y_axis;
    return s;
}

FieldSpec FieldSpec::from_id(std::string_view id, double radius, double c1, double c2) {
    if (id == "vortex") return vortex(radius);
    if (id == "twobump") return two_bump();
    if (id == "const") return constant(c1, c2);
    if (id == "linear") {
        PotentialSpec lin;
        lin.kind = PotentialKind::PowerLaw;
        lin.alpha = 2.0;
        return separable(lin, lin);
    }
    throw InvalidArgument("unknown field catalog id '" + std::string(id) + "'");
}

Field2D::Field2D(Grid2D grid, std::vector<double> b, std::vector<double> a1,
                 std::vector<double> a2, std::optional<std::vector<double>> diva, std::string name)
    : grid_(grid), b_(std::move(b)), a1_(std::move(a1)), a2_(std::move(a2)),
      diva_(std::move(diva)), name_(std::move(name)) {
    const std::size_t N = grid_.full_size();
    if (b_.size() != N || a1_.size() != N || a2_.size() != N)
        throw InvalidArgument("Field2D: arrays must cover the full lattice");
    if (diva_ && diva_->size() != N) throw InvalidArgument("Field2D: div a size mismatch");
    require_finite(b_, "Field2D b");
    require_finite(a1_, "Field2D a1");
    require_finite(a2_, "Field2D a2");
}

std::vector<double> Field2D::div_a() const {
    if (diva_) return *diva_;
    const std::size_t fx = grid_.full_x(), fy = grid_.full_y();
    std::vector<double> d(grid_.full_size());
    auto ddx = [&](std::span<const double> f, std::size_t i, std::size_t j) {
        const double h = grid_.hx;
        if (i == 0) return (-3.0 * f[grid_.at(0, j)] + 4.0 * f[grid_.at(1, j)] - f[grid_.at(2, j)]) / (2 * h);
        if (i == fx - 1)
            return (3.0 * f[grid_.at(i, j)] - 4.0 * f[grid_.at(i - 1, j)] + f[grid_.at(i - 2, j)]) / (2 * h);
        return (f[grid_.at(i + 1, j)] - f[grid_.at(i - 1, j)]) / (2 * h);
    };
    auto ddy = [&](std::span<const double> f, std::size_t i, std::size_t j) {
        const double h = grid_.hy;
        if (j == 0) return (-3.0 * f[grid_.at(i, 0)] + 4.0 * f[grid_.at(i, 1)] - f[grid_.at(i, 2)]) / (2 * h);
        if (j == fy - 1)
            return (3.0 * f[grid_.at(i, j)] - 4.0 * f[grid_.at(i, j - 1)] + f[grid_.at(i, j - 2)]) / (2 * h);
        return (f[grid_.at(i, j + 1)] - f[grid_.at(i, j - 1)]) / (2 * h);
    };
    for (std::size_t j = 0; j < fy; ++j)
        for (std::size_t i = 0; i < fx; ++i) d[grid_.at(i, j)] = ddx(a1_, i, j) + ddy(a2_, i, j);
    return d;
}

double Field2D::max_abs_a() const {
    double m = 0.0;
    for (std::size_t k = 0; k < a1_.size(); ++k) m = std::max(m, std::hypot(a1_[k], a2_[k]));
    return m;
}

Field2D build_field_2d(const FieldSpec& spec, const Grid2D& grid) {
    const std::size_t N = grid.full_size();
    std::vector<double> b(N, 0.0), a1(N, 0.0), a2(N, 0.0);
    std::optional<std::vector<double>> diva;
    std::string name;

    switch (spec.kind) {
        case FieldKind::Constant: {
            diva.emplace(N, 0.0);
            for (std::size_t j = 0; j < grid.full_y(); ++j)
                for (std::size_t i = 0; i < grid.full_x(); ++i) {
                    const std::size_t k = grid.at(i, j);
                    b[k] = spec.c1 * grid.x(i) + spec.c2 * grid.y(j);
                    a1[k] = spec.c1;
                    a2[k] = spec.c2;
                }
            name = "const2d";
            break;
        }
        case FieldKind::Bumps: {
            if (spec.bumps.empty()) throw InvalidArgument("bump field needs at least one bump");
            for (const Bump& bp : spec.bumps)
                if (!(bp.radius > 0.0)) throw InvalidArgument("bump radius must be positive");
            if (spec.require_disjoint) {
                for (std::size_t i = 0; i < spec.bumps.size(); ++i)
                    for (std::size_t j = i + 1; j < spec.bumps.size(); ++j) {
                        const Bump &u = spec.bumps[i], &v = spec.bumps[j];
                        if (std::hypot(u.cx - v.cx, u.cy - v.cy) <= u.radius + v.radius)
                            throw InvalidArgument("bump supports overlap");
                    }
            }
            diva.emplace(N, 0.0);
            for (std::size_t j = 0; j < grid.full_y(); ++j)
                for (std::size_t i = 0; i < grid.full_x(); ++i) {
                    const std::size_t k = grid.at(i, j);
                    for (const Bump& bp : spec.bumps) {
                        const double dx = grid.x(i) - bp.cx, dy = grid.y(j) - bp.cy;
                        const double r = std::hypot(dx, dy), R = bp.radius;
                        const double rr = std::min(r, R);
                        b[k] += bp.coeff * (R / kPi) * (1.0 - std::cos(kPi * rr / R));
                        if (r > 0.0 && r <= R) {
                            const double s = std::sin(kPi * r / R);
                            a1[k] += bp.coeff * dx / r * s;
                            a2[k] += bp.coeff * dy / r * s;
                            (*diva)[k] += bp.coeff * (s / r + (kPi / R) * std::cos(kPi * r / R));
                        } else if (r == 0.0) {
                            (*diva)[k] += bp.coeff * 2.0 * kPi / R;
                        }
                    }
                }
            name = spec.bumps.size() == 1 ? "vortex" : "bumps";
            break;
        }
        case FieldKind::Separable: {
            const Analytic1D fx = analytic_of(spec.axis_x), fy = analytic_of(spec.axis_y);
            if (fx.bpp && fy.bpp) diva.emplace(N, 0.0);
            for (std::size_t j = 0; j < grid.full_y(); ++j)
                for (std::size_t i = 0; i < grid.full_x(); ++i) {
                    const std::size_t k = grid.at(i, j);
                    const double x = grid.x(i), y = grid.y(j);
                    b[k] = fx.b(x) + fy.b(y);
                    a1[k] = fx.a(x);
                    a2[k] = fy.a(y);
                    if (diva) (*diva)[k] = fx.bpp(x) + fy.bpp(y);
                }
            name = "separable(" + spec.axis_x.id() + "," + spec.axis_y.id() + ")";
            break;
        }
    }
    return Field2D(grid, std::move(b), std::move(a1), std::move(a2), std::move(diva), name);
}

// ---------------------------------------------------------------------------

std::vector<double> liouville_q(const Potential1D& pot, double p) {
    if (!std::isfinite(p)) throw InvalidArgument("liouville_q: p must be finite");
    const std::vector<double> div = pot.div_a();
    const auto a = pot.a();
    std::vector<double> q(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) q[i] = -0.5 * p * div[i] + 0.25 * p * p * a[i] * a[i];
    return q;
}

std::vector<double> liouville_q(const Field2D& field, double p) {
    if (!std::isfinite(p)) throw InvalidArgument("liouville_q: p must be finite");
    const Grid2D& g = field.grid();
    const std::vector<double> div = field.div_a();
    const auto a1 = field.a1();
    const auto a2 = field.a2();
    std::vector<double> q(g.interior_size());
    for (std::size_t j = 1; j <= g.ny; ++j)
        for (std::size_t i = 1; i <= g.nx; ++i) {
            const std::size_t k = g.at(i, j);
            q[(j - 1) * g.nx + (i - 1)] =
                -0.5 * p * div[k] + 0.25 * p * p * (a1[k] * a1[k] + a2[k] * a2[k]);
        }
    return q;
}

double default_tolerance(const Potential1D& pot) { return pot.grid().h * pot.max_abs_a(); }

double default_tolerance(const Field2D& field) {
    return std::max(field.grid().hx, field.grid().hy) * field.max_abs_a();
}

AssumptionAB check_assumption_ab(const Potential1D& pot, std::optional<double> tol_opt) {
    const Grid1D& g = pot.grid();
    const double tol = tol_opt.value_or(default_tolerance(pot));
    if (tol < 0.0) throw InvalidArgument("check_assumption_ab: tol must be >= 0");

    // samples on [0, l]; x = 0 is interpolated when it is not a node
    std::vector<std::pair<double, double>> half;
    if (g.n % 2 == 0) half.emplace_back(0.0, pot.b_at(0.0));
    for (std::size_t k = 0; k < g.n + 2; ++k) {
        const double x = g.x_ext(k);
        if (x >= -1e-12 * g.l) half.emplace_back(std::max(x, 0.0), pot.b()[k]);
    }

    AssumptionAB r;
    r.b1 = half.front().second;
    r.b2 = half.front().second;
    for (const auto& [x, b] : half) {
        r.b1 = std::min(r.b1, b);
        r.b2 = std::max(r.b2, b);
    }
    r.max_b1_x = -1.0;
    r.min_b2_x = 2.0 * g.l;
    for (const auto& [x, b] : half) {
        if (b <= r.b1 + tol) r.max_b1_x = std::max(r.max_b1_x, x);
        if (b >= r.b2 - tol) r.min_b2_x = std::min(r.min_b2_x, x);
    }

    const auto a = pot.a();
    r.odd = true;
    for (std::size_t i = 0; i < g.n; ++i)
        if (std::abs(a[i] + a[g.n - 1 - i]) > tol) r.odd = false;

    r.holds = r.odd && r.max_b1_x < r.min_b2_x;
    std::ostringstream d;
    d << "b1=" << r.b1 << " b2=" << r.b2 << " max(B1)=" << r.max_b1_x
      << " min(B2)=" << r.min_b2_x << (r.odd ? "" : " a is not odd") << " tol=" << tol;
    r.diagnostic = d.str();
    return r;
}

}  // namespace driftev
