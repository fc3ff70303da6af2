#include "driftev/pde2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "driftev/error.hpp"

namespace driftev {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::int32_t interior_index(const Grid2D& g, std::size_t i, std::size_t j) {
    if (g.on_boundary(i, j)) return -1;
    return static_cast<std::int32_t>((j - 1) * g.nx + (i - 1));
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// State2D

State2D State2D::filled(const Grid2D& grid, double tau, double value) {
    if (!(tau > 0.0)) throw InvalidArgument("State2D: tau must be > 0");
    State2D s;
    s.grid = grid;
    s.tau = tau;
    s.u.assign(grid.interior_size(), value);
    return s;
}

State2D State2D::from_function(const Grid2D& grid, double tau,
                               const std::function<double(double, double)>& u0) {
    State2D s = filled(grid, tau, 0.0);
    for (std::size_t j = 1; j <= grid.ny; ++j)
        for (std::size_t i = 1; i <= grid.nx; ++i)
            s.u[(j - 1) * grid.nx + (i - 1)] = u0(grid.x(i), grid.y(j));
    for (double v : s.u)
        if (!std::isfinite(v)) throw InvalidArgument("State2D: initial data must be finite");
    return s;
}

double State2D::max_value() const {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
}

double State2D::log_l2() const {
    const double m = max_value();
    if (m == 0.0) return kNegInf;
    double s = 0.0;
    for (double v : u) s += (v / m) * (v / m);
    return log_scale + std::log(m) + 0.5 * std::log(s * grid.hx * grid.hy);
}

double State2D::log_max() const {
    const double m = max_value();
    return m == 0.0 ? kNegInf : log_scale + std::log(m);
}

// ---------------------------------------------------------------------------
// SemiLagrangian

SemiLagrangian::SemiLagrangian(const Field2D& field, double p, double tau, double cg_tol,
                               std::size_t cg_max_iter)
    : grid_(field.grid()), tau_(tau), cg_tol_(cg_tol), cg_max_iter_(cg_max_iter) {
    if (!(tau > 0.0)) throw InvalidArgument("SemiLagrangian: tau must be > 0");
    if (!std::isfinite(p)) throw InvalidArgument("SemiLagrangian: p must be finite");
    if (!(cg_tol > 0.0)) throw InvalidArgument("SemiLagrangian: cg_tol must be > 0");
    const Grid2D& g = grid_;
    cx_ = tau / (g.hx * g.hx);
    cy_ = tau / (g.hy * g.hy);
    diag_ = 1.0 + 2.0 * cx_ + 2.0 * cy_;

    const auto a1 = field.a1();
    const auto a2 = field.a2();
    stencil_.resize(g.interior_size());
    for (std::size_t j = 1; j <= g.ny; ++j)
        for (std::size_t i = 1; i <= g.nx; ++i) {
            const std::size_t k = g.at(i, j);
            Stencil& st = stencil_[(j - 1) * g.nx + (i - 1)];
            st.idx.fill(-1);
            st.w.fill(0.0);
            const double xd = g.x(i) - p * a1[k] * tau;
            const double yd = g.y(j) - p * a2[k] * tau;
            if (xd < -g.lx || xd > g.lx || yd < -g.ly || yd > g.ly) continue;
            const double fx = (xd + g.lx) / g.hx, fy = (yd + g.ly) / g.hy;
            const auto i0 = std::min(static_cast<std::size_t>(fx), g.nx);
            const auto j0 = std::min(static_cast<std::size_t>(fy), g.ny);
            const double tx = fx - static_cast<double>(i0), ty = fy - static_cast<double>(j0);
            st.idx = {interior_index(g, i0, j0), interior_index(g, i0 + 1, j0),
                      interior_index(g, i0, j0 + 1), interior_index(g, i0 + 1, j0 + 1)};
            st.w = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
        }
}

void SemiLagrangian::advect(const std::vector<double>& u, std::vector<double>& out) const {
    out.resize(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
        const Stencil& st = stencil_[k];
        double v = 0.0;
        for (int c = 0; c < 4; ++c)
            if (st.idx[c] >= 0) v += st.w[c] * u[static_cast<std::size_t>(st.idx[c])];
        out[k] = v;
    }
}

void SemiLagrangian::apply(const std::vector<double>& x, std::vector<double>& y) const {
    const std::size_t nx = grid_.nx, ny = grid_.ny;
    y.resize(x.size());
    for (std::size_t j = 0; j < ny; ++j) {
        const double* row = x.data() + j * nx;
        const double* below = j > 0 ? row - nx : nullptr;
        const double* above = j + 1 < ny ? row + nx : nullptr;
        double* out = y.data() + j * nx;
        for (std::size_t i = 0; i < nx; ++i) {
            double v = diag_ * row[i];
            if (i > 0) v -= cx_ * row[i - 1];
            if (i + 1 < nx) v -= cx_ * row[i + 1];
            if (below) v -= cy_ * below[i];
            if (above) v -= cy_ * above[i];
            out[i] = v;
        }
    }
}

// Jacobi-preconditioned CG. The diagonal of I - tau Lap_h is the constant
// diag_, so z = r / diag_ is folded into the scalar recurrences.
void SemiLagrangian::solve(const std::vector<double>& rhs, std::vector<double>& x) const {
    const std::size_t n = rhs.size();
    const double bnorm = std::sqrt(dot(rhs, rhs));
    if (bnorm == 0.0) {
        x.assign(n, 0.0);
        last_iters_ = 0;
        return;
    }
    const double inv_diag = 1.0 / diag_;
    std::vector<double> r(n), q(n), Ap(n);
    apply(x, Ap);
    double rr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = rhs[i] - Ap[i];
        q[i] = r[i] * inv_diag;
        rr += r[i] * r[i];
    }
    const double stop = cg_tol_ * bnorm;
    std::size_t it = 0;
    while (std::sqrt(rr) > stop) {
        if (it == cg_max_iter_) {
            std::ostringstream os;
            os << "conjugate gradients did not converge in " << cg_max_iter_
               << " iterations (relative residual " << std::sqrt(rr) / bnorm << ")";
            throw NumericalError(os.str());
        }
        apply(q, Ap);
        const double alpha = rr * inv_diag / dot(q, Ap);
        double rr_new = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * q[i];
            r[i] -= alpha * Ap[i];
            rr_new += r[i] * r[i];
        }
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i) q[i] = r[i] * inv_diag + beta * q[i];
        ++it;
    }
    last_iters_ = it;
}

void SemiLagrangian::step(State2D& s) const {
    if (!(s.grid == grid_)) throw InvalidArgument("SemiLagrangian::step: state and field grids differ");
    if (s.u.size() != grid_.interior_size()) throw InvalidArgument("SemiLagrangian::step: bad state size");
    std::vector<double> tilde;
    advect(s.u, tilde);
    s.u = tilde;
    solve(tilde, s.u);
    s.t += tau_;
}

State2D step(const State2D& state, const Field2D& field, double p) {
    SemiLagrangian op(field, p, state.tau);
    State2D next = state;
    op.step(next);
    return next;
}

// ---------------------------------------------------------------------------
// decay estimation

namespace {

// slope of least squares y = c0 + c1 t
double ls_slope(const std::vector<double>& t, const std::vector<double>& y) {
    const double n = static_cast<double>(t.size());
    double mt = 0.0, my = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        mt += t[i];
        my += y[i];
    }
    mt /= n;
    my /= n;
    double sty = 0.0, stt = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        sty += (t[i] - mt) * (y[i] - my);
        stt += (t[i] - mt) * (t[i] - mt);
    }
    return sty / stt;
}

}  // namespace

DecayFit fit_decay(std::vector<DecaySample> samples, double t0, double t1, double plateau_tol) {
    DecayFit fit;
    fit.window_start = t0;
    fit.window_end = t1;
    std::vector<double> t, l2, mx;
    const double slack = 1e-9 * std::max(1.0, std::abs(t1));
    for (const DecaySample& s : samples) {
        if (s.t < t0 - slack || s.t > t1 + slack) continue;
        if (!std::isfinite(s.log_l2) || !std::isfinite(s.log_max))
            throw NumericalError("decay fit: solution norm hit exact zero inside the window");
        t.push_back(s.t);
        l2.push_back(s.log_l2);
        mx.push_back(s.log_max);
    }
    if (t.size() < 10) throw InvalidArgument("decay fit: window holds fewer than 10 samples");
    fit.rate_l2 = -ls_slope(t, l2);
    fit.rate_max = -ls_slope(t, mx);

    const std::size_t half = t.size() / 2;
    const std::vector<double> t_a(t.begin(), t.begin() + half), y_a(l2.begin(), l2.begin() + half);
    const std::vector<double> t_b(t.begin() + half, t.end()), y_b(l2.begin() + half, l2.end());
    const double r_a = -ls_slope(t_a, y_a), r_b = -ls_slope(t_b, y_b);
    fit.plateau_drift = std::abs(r_a - r_b) / std::max(std::abs(fit.rate_l2), 1e-300);
    fit.plateau_flag = fit.plateau_drift < plateau_tol;
    fit.samples = std::move(samples);
    return fit;
}

DecayRun estimate_decay(const Field2D& field, double p, const DecayOptions& opt,
                        const std::function<double(double, double)>& u0) {
    if (!(opt.t_end > 0.0)) throw InvalidArgument("estimate_decay: t_end must be > 0");
    if (!(opt.window_fraction > 0.0 && opt.window_fraction <= 1.0))
        throw InvalidArgument("estimate_decay: window fraction must be in (0, 1]");
    const double t0 = opt.window_start.value_or(opt.t_end * (1.0 - opt.window_fraction));
    if (!(t0 >= 0.0 && t0 < opt.t_end)) throw InvalidArgument("estimate_decay: window must lie inside (0, t_end]");

    const Grid2D& g = field.grid();
    State2D state = u0 ? State2D::from_function(g, opt.tau, u0) : State2D::filled(g, opt.tau);
    for (double v : state.u)
        if (!(v > 0.0)) throw InvalidArgument("estimate_decay: initial data must be positive in the interior");

    const SemiLagrangian op(field, p, opt.tau, opt.cg_tol, opt.cg_max_iter);
    const auto steps = static_cast<std::size_t>(std::llround(opt.t_end / opt.tau));
    std::vector<DecaySample> samples;
    samples.reserve(steps + 1);
    samples.push_back({state.t, state.log_l2(), state.log_max()});
    for (std::size_t k = 1; k <= steps; ++k) {
        op.step(state);
        state.t = static_cast<double>(k) * opt.tau;
        if (opt.renorm_every > 0 && k % opt.renorm_every == 0) {
            const double m = state.max_value();
            if (m > 0.0) {
                const int e = std::ilogb(m);
                for (double& v : state.u) v = std::ldexp(v, -e);
                state.log_scale += e * std::numbers::ln2;
            }
        }
        samples.push_back({state.t, state.log_l2(), state.log_max()});
        if (opt.observer) opt.observer(state);
    }
    DecayRun run;
    run.fit = fit_decay(std::move(samples), t0, opt.t_end, opt.plateau_tol);
    run.state = std::move(state);
    return run;
}

RichardsonDecay decay_richardson(const FieldSpec& spec, const Grid2D& grid, double p,
                                 const DecayOptions& opt) {
    RichardsonDecay r;
    const Field2D coarse = build_field_2d(spec, grid);
    r.coarse_run = estimate_decay(coarse, p, opt);
    const Grid2D fine_grid(grid.lx, grid.ly, 2 * grid.nx + 1, 2 * grid.ny + 1);
    const Field2D fine = build_field_2d(spec, fine_grid);
    DecayOptions fine_opt = opt;
    fine_opt.tau = 0.5 * opt.tau;
    fine_opt.renorm_every = opt.renorm_every * 2;
    r.fine_run = estimate_decay(fine, p, fine_opt);
    r.coarse = r.coarse_run.fit.rate_l2;
    r.fine = r.fine_run.fit.rate_l2;
    r.extrapolated = 2.0 * r.fine - r.coarse;
    r.error_estimate = std::abs(r.fine - r.coarse);
    return r;
}

// ---------------------------------------------------------------------------
// profiles

double Profile::at(double x, double y) const {
    const Grid2D& g = grid;
    if (x < -g.lx || x > g.lx || y < -g.ly || y > g.ly) return 0.0;
    const double fx = (x + g.lx) / g.hx, fy = (y + g.ly) / g.hy;
    const auto i0 = std::min(static_cast<std::size_t>(fx), g.nx);
    const auto j0 = std::min(static_cast<std::size_t>(fy), g.ny);
    const double tx = fx - static_cast<double>(i0), ty = fy - static_cast<double>(j0);
    return (1 - tx) * (1 - ty) * values[g.at(i0, j0)] + tx * (1 - ty) * values[g.at(i0 + 1, j0)] +
           (1 - tx) * ty * values[g.at(i0, j0 + 1)] + tx * ty * values[g.at(i0 + 1, j0 + 1)];
}

Profile extract_profile(const State2D& state) {
    const Grid2D& g = state.grid;
    double m = 0.0;
    for (double v : state.u) m = std::max(m, v);
    if (!(m > 0.0)) throw InvalidArgument("extract_profile: state has no positive values");
    Profile prof;
    prof.grid = g;
    prof.values.assign(g.full_size(), 0.0);
    for (std::size_t j = 1; j <= g.ny; ++j)
        for (std::size_t i = 1; i <= g.nx; ++i)
            prof.values[g.at(i, j)] = state.u[(j - 1) * g.nx + (i - 1)] / m;
    return prof;
}

Section sample_segment(const Profile& prof, double x0, double y0, double x1, double y1,
                       std::size_t m) {
    if (m < 2) throw InvalidArgument("sample_segment: need at least two samples");
    Section sec;
    const double len = std::hypot(x1 - x0, y1 - y0);
    for (std::size_t k = 0; k < m; ++k) {
        const double s = static_cast<double>(k) / static_cast<double>(m - 1);
        const double x = x0 + s * (x1 - x0), y = y0 + s * (y1 - y0);
        sec.s.push_back(s * len);
        sec.x.push_back(x);
        sec.y.push_back(y);
        sec.u.push_back(prof.at(x, y));
    }
    return sec;
}

Section sample_line(const Profile& prof, double a, double b, double c, std::size_t m) {
    const double nn = a * a + b * b;
    if (!(nn > 0.0)) throw InvalidArgument("sample_line: a and b must not both vanish");
    // point on the line and unit direction, then clip the parameter to the box
    const double px = -c * a / nn, py = -c * b / nn;
    const double len = std::sqrt(nn);
    const double dx = -b / len, dy = a / len;
    double lo = -std::numeric_limits<double>::infinity(), hi = -lo;
    auto clip = [&](double p0, double d, double lim) {
        if (d == 0.0) {
            if (p0 < -lim || p0 > lim) hi = lo - 1.0;
            return;
        }
        double s0 = (-lim - p0) / d, s1 = (lim - p0) / d;
        if (s0 > s1) std::swap(s0, s1);
        lo = std::max(lo, s0);
        hi = std::min(hi, s1);
    };
    clip(px, dx, prof.grid.lx);
    clip(py, dy, prof.grid.ly);
    if (!(hi > lo)) throw InvalidArgument("sample_line: the line misses the domain");
    return sample_segment(prof, px + lo * dx, py + lo * dy, px + hi * dx, py + hi * dy, m);
}

Profile adjoint_profile(const State2D& state, const Field2D& field, double p) {
    const Grid2D& g = state.grid;
    if (!(field.grid() == g)) throw InvalidArgument("adjoint_profile: state and field grids differ");
    const auto b = field.b();
    std::vector<double> logv(g.full_size(), kNegInf);
    double top = kNegInf;
    for (std::size_t j = 1; j <= g.ny; ++j)
        for (std::size_t i = 1; i <= g.nx; ++i) {
            const double u = state.u[(j - 1) * g.nx + (i - 1)];
            if (!(u > 0.0)) continue;
            const std::size_t k = g.at(i, j);
            logv[k] = -p * b[k] + std::log(u);
            top = std::max(top, logv[k]);
        }
    if (!std::isfinite(top)) throw InvalidArgument("adjoint_profile: state has no positive values");
    Profile prof;
    prof.grid = g;
    prof.values.resize(g.full_size());
    for (std::size_t k = 0; k < logv.size(); ++k) prof.values[k] = std::exp(logv[k] - top);
    return prof;
}

double mask_peak(const Profile& prof, const std::vector<std::uint8_t>& mask) {
    if (mask.size() != prof.values.size()) throw InvalidArgument("mask_peak: mask size mismatch");
    double m = 0.0;
    for (std::size_t k = 0; k < mask.size(); ++k)
        if (mask[k]) m = std::max(m, prof.values[k]);
    return m;
}

double mask_mass_fraction(const Profile& prof, const std::vector<std::uint8_t>& mask) {
    if (mask.size() != prof.values.size()) throw InvalidArgument("mask_mass_fraction: mask size mismatch");
    double in = 0.0, all = 0.0;
    for (std::size_t k = 0; k < mask.size(); ++k) {
        all += prof.values[k];
        if (mask[k]) in += prof.values[k];
    }
    return all > 0.0 ? in / all : 0.0;
}

}  // namespace driftev
