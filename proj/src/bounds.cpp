#include "driftev/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "driftev/error.hpp"
#include "driftev/logmath.hpp"

namespace driftev {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using EdgeB = std::function<double(std::size_t, std::size_t)>;

EdgeB edge_b_1d(const Potential1D& pot) {
    return [&pot](std::size_t k, std::size_t m) {
        const auto b = pot.b();
        if (!pot.has_closure()) return 0.5 * (b[k] + b[m]);
        const Grid1D& g = pot.grid();
        return pot.b_at(0.5 * (g.x_ext(k) + g.x_ext(m)));
    };
}

EdgeB edge_b_2d(const Field2D& field) {
    return [&field](std::size_t k, std::size_t m) { return 0.5 * (field.b()[k] + field.b()[m]); };
}

struct Extremes {
    double min = kInf, max = -kInf;
    std::size_t argmin = 0;
    void add(double v, std::size_t i) {
        if (v < min) {
            min = v;
            argmin = i;
        }
        max = std::max(max, v);
    }
};

BoundReport envelope_from(double lam_omega, double p, const Extremes& div, const Extremes& a2,
                          const Extremes& q) {
    BoundReport r;
    r.p = p;
    const double env_lo = lam_omega - 0.5 * p * div.max + 0.25 * p * p * a2.min;
    const double env_hi = lam_omega - 0.5 * p * div.min + 0.25 * p * p * a2.max;
    r.lower = std::max(env_lo, lam_omega + q.min);
    r.upper = std::min(env_hi, lam_omega + q.max);
    r.log_upper = r.upper > 0.0 ? std::log(r.upper) : -kInf;
    r.lower_from = "p^2 envelope (lower) / comparison with q = 0";
    r.upper_from = "p^2 envelope (upper) / comparison with q = 0";
    r.certified = false;
    r.caveat = "suprema and infima of div a, |a|^2 and q sampled at interior nodes";
    return r;
}

// ---------------------------------------------------------------------------
// test-function bounds

struct Region {
    std::vector<std::size_t> nodes;
    std::vector<double> dist;  // aligned with nodes
    double max_dist = 0.0;
};

Region build_region(const Lattice& L, std::span<const std::uint8_t> mask) {
    if (mask.size() != L.size()) throw InvalidArgument("well region mask does not match the lattice");
    Region r;
    std::vector<std::size_t> frontier;
    std::vector<std::uint8_t> in_frontier(L.size(), 0);
    for (std::size_t k = 0; k < L.size(); ++k) {
        if (!mask[k]) continue;
        r.nodes.push_back(k);
        L.for_each_neighbor(k, [&](std::size_t m, double) {
            if (!mask[m] && !in_frontier[m]) {
                in_frontier[m] = 1;
                frontier.push_back(m);
            }
        });
    }
    if (r.nodes.empty()) throw InvalidArgument("well region is empty");
    if (frontier.empty()) throw InvalidArgument("well region has no exterior neighbours");
    r.dist.resize(r.nodes.size());
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        const double x = L.x(r.nodes[i]), y = L.y(r.nodes[i]);
        double best = kInf;
        for (std::size_t f : frontier) best = std::min(best, std::hypot(L.x(f) - x, L.y(f) - y));
        r.dist[i] = best;
        r.max_dist = std::max(r.max_dist, best);
    }
    return r;
}

struct Evaluation {
    bool collar_ok = true;
    std::string violation;
    std::size_t varying_edges = 0;
    std::size_t sublevel_nodes = 0;
    double log_num = -kInf, log_den = -kInf;
};

Evaluation evaluate(const Lattice& L, std::span<const double> b, const EdgeB& bmid,
                    std::span<const std::uint8_t> mask, const Region& R, double bmin,
                    double beta, double omega, double eps, double p) {
    Evaluation ev;
    std::vector<double> uhat(L.size(), 0.0);
    for (std::size_t i = 0; i < R.nodes.size(); ++i) uhat[R.nodes[i]] = std::min(1.0, R.dist[i] / eps);
    const double thr = bmin + beta + omega;
    const double logvol = std::log(L.cell_volume());
    std::vector<double> num, den;
    num.reserve(R.nodes.size());
    den.reserve(R.nodes.size());

    auto violate = [&](std::size_t k, double v) {
        if (!ev.collar_ok) return;
        ev.collar_ok = false;
        std::ostringstream os;
        os << "collar condition violated: b = " << v << " < min b + beta + omega = " << thr
           << " near (" << L.x(k) << ", " << L.y(k) << ") for epsilon = " << eps;
        ev.violation = os.str();
    };

    for (std::size_t k : R.nodes) {
        const double u = uhat[k];
        if (u < 1.0 && b[k] < thr) violate(k, b[k]);
        if (b[k] <= bmin + beta) ++ev.sublevel_nodes;
        den.push_back(-p * (b[k] - bmin) + 2.0 * std::log(u) + logvol);
        L.for_each_neighbor(k, [&](std::size_t m, double spacing) {
            if (mask[m] && m < k) return;  // each interior edge once
            const double du = std::abs(u - uhat[m]);
            if (du == 0.0) return;
            ++ev.varying_edges;
            const double be = bmid(k, m);
            if (b[m] < thr) violate(m, b[m]);
            if (be < thr) violate(k, be);
            num.push_back(-p * (be - bmin) + 2.0 * std::log(du / spacing) + logvol);
        });
    }
    ev.log_num = log_sum_exp(num);
    ev.log_den = log_sum_exp(den);
    return ev;
}

// Largest epsilon for which the collar condition can hold: u-hat < 1 exactly
// where d < epsilon, so a node (or edge) that violates b >= thr is harmless
// while epsilon <= its distance. The sublevel set must keep a node with
// u-hat = 1, which caps epsilon at the largest distance found there.
double critical_epsilon(const Lattice& L, std::span<const double> b, const EdgeB& bmid,
                        std::span<const std::uint8_t> mask, const Region& R, double thr,
                        double sub_level) {
    std::vector<double> dist(L.size(), 0.0);
    for (std::size_t i = 0; i < R.nodes.size(); ++i) dist[R.nodes[i]] = R.dist[i];
    double crit = kInf, sub = 0.0;
    for (std::size_t k : R.nodes) {
        if (b[k] < thr) crit = std::min(crit, dist[k]);
        if (b[k] <= sub_level) sub = std::max(sub, dist[k]);
        L.for_each_neighbor(k, [&](std::size_t m, double) {
            if (mask[m] && m < k) return;
            if (b[m] < thr || bmid(k, m) < thr) crit = std::min(crit, std::min(dist[k], dist[m]));
        });
    }
    return std::min(crit, sub);
}

struct Levels {
    double beta, omega;
};

Levels resolve_levels(const Well& w, const WellBoundOptions& opt) {
    const double d = w.depth;
    const double omega = opt.omega.value_or(0.5 * d);
    const double beta = opt.beta.value_or(std::min(0.25 * d, 0.5 * (d - omega)));
    if (!(beta > 0.0) || !(omega > 0.0) || !(beta + omega < d)) {
        std::ostringstream os;
        os << "beta/omega infeasible for well depth " << d << ": need 0 < beta, 0 < omega, beta + omega < depth (beta = "
           << beta << ", omega = " << omega << ")";
        throw InvalidArgument(os.str());
    }
    return {beta, omega};
}

WellBoundDetail single_well(const Lattice& L, std::span<const double> b, const EdgeB& bmid,
                            const Well& w, double p, const WellBoundOptions& opt) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("well bound: p must be >= 0");
    const Levels lv = resolve_levels(w, opt);
    const Region R = build_region(L, w.region_mask);
    const double bmin = w.min_value;

    auto valid = [&](const Evaluation& ev) { return ev.collar_ok && ev.sublevel_nodes > 0; };

    double eps = 0.0;
    Evaluation ev;
    if (opt.epsilon) {
        eps = *opt.epsilon;
        if (!(eps > 0.0)) throw InvalidArgument("well bound: epsilon must be > 0");
        ev = evaluate(L, b, bmid, w.region_mask, R, bmin, lv.beta, lv.omega, eps, p);
        if (!ev.collar_ok) throw InvalidArgument(ev.violation);
        if (ev.sublevel_nodes == 0)
            throw InvalidArgument("well bound: no node with b <= min b + beta inside the region");
    } else {
        const double hmin = L.dim() == 1 ? L.hx : std::min(L.hx, L.hy);
        const double crit = critical_epsilon(L, b, bmid, w.region_mask, R, bmin + lv.beta + lv.omega,
                                             bmin + lv.beta);
        const double k = std::floor(crit / hmin * (1.0 + 1e-12));
        if (k >= 1.0) {
            eps = std::min(k * hmin, crit);
            ev = evaluate(L, b, bmid, w.region_mask, R, bmin, lv.beta, lv.omega, eps, p);
        }
        if (eps == 0.0 || !valid(ev)) {
            const Evaluation probe =
                evaluate(L, b, bmid, w.region_mask, R, bmin, lv.beta, lv.omega, hmin, p);
            throw InvalidArgument("well bound: no grid collar width works; " +
                                  (probe.violation.empty() ? std::string("no sublevel node keeps u-hat = 1")
                                                           : probe.violation));
        }
    }

    WellBoundDetail d;
    d.beta = lv.beta;
    d.omega = lv.omega;
    d.epsilon = eps;
    d.measure_collar = static_cast<double>(ev.varying_edges) * L.cell_volume();
    d.measure_sublevel = static_cast<double>(ev.sublevel_nodes) * L.cell_volume();
    d.log_C = -2.0 * std::log(eps) + std::log(d.measure_collar) - std::log(d.measure_sublevel);
    d.log_upper_explicit = d.log_C - lv.omega * p;
    d.log_upper_quotient = ev.log_num - ev.log_den;
    return d;
}

BoundReport report_from(const WellBoundDetail& d, double p, const char* what) {
    BoundReport r;
    r.p = p;
    r.log_upper = std::min(d.log_upper_explicit, d.log_upper_quotient);
    r.upper = std::exp(r.log_upper);
    r.lower = 0.0;
    r.lower_from = "positivity of lambda_1";
    r.upper_from = what;
    r.certified = true;
    r.caveat = "inequalities exact for the lattice quotient; measures are node and edge counts "
               "times cell volume (O(h) against the continuum)";
    r.well = d;
    return r;
}

void require_separated(const Lattice& L, const std::vector<Well>& wells) {
    std::vector<int> owner(L.size(), -1);
    for (std::size_t j = 0; j < wells.size(); ++j) {
        const auto& mask = wells[j].region_mask;
        if (mask.size() != L.size()) throw InvalidArgument("well region mask does not match the lattice");
        for (std::size_t k = 0; k < L.size(); ++k) {
            if (!mask[k]) continue;
            if (owner[k] >= 0) throw InvalidArgument("well regions overlap; use basin regions for several wells");
            owner[k] = static_cast<int>(j);
        }
    }
    for (std::size_t k = 0; k < L.size(); ++k) {
        if (owner[k] < 0) continue;
        L.for_each_neighbor(k, [&](std::size_t m, double) {
            if (owner[m] >= 0 && owner[m] != owner[k])
                throw InvalidArgument("well regions touch across a lattice edge");
        });
    }
}

BoundReport multiwell(const Lattice& L, std::span<const double> b, const EdgeB& bmid,
                      const std::vector<Well>& wells, double p, const WellBoundOptions& opt) {
    if (wells.empty()) throw InvalidArgument("multiwell bound: need at least one well");
    require_separated(L, wells);
    WellBoundDetail agg;
    agg.wells = wells.size();
    agg.log_upper_explicit = -kInf;
    agg.log_upper_quotient = -kInf;
    agg.omega = kInf;
    for (const Well& w : wells) {
        const WellBoundDetail d = single_well(L, b, bmid, w, p, opt);
        if (d.log_upper_quotient > agg.log_upper_quotient) {
            agg.log_upper_quotient = d.log_upper_quotient;
        }
        if (d.log_upper_explicit > agg.log_upper_explicit) {
            agg.log_upper_explicit = d.log_upper_explicit;
            agg.log_C = d.log_C;
            agg.beta = d.beta;
            agg.epsilon = d.epsilon;
            agg.measure_collar = d.measure_collar;
            agg.measure_sublevel = d.measure_sublevel;
        }
        agg.omega = std::min(agg.omega, d.omega);
    }
    return report_from(agg, p, "max over wells of disjoint test-function quotients (lambda_m)");
}

}  // namespace

double lambda_omega(const Grid1D& g) { return std::numbers::pi * std::numbers::pi / (4.0 * g.l * g.l); }

double lambda_omega(const Grid2D& g) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    return pi2 / (4.0 * g.lx * g.lx) + pi2 / (4.0 * g.ly * g.ly);
}

Interval comparison_bounds(std::span<const double> q1, std::span<const double> q2, double lam2) {
    if (q1.size() != q2.size() || q1.empty())
        throw InvalidArgument("comparison_bounds: q1 and q2 must live on the same grid");
    Extremes d;
    for (std::size_t i = 0; i < q1.size(); ++i) d.add(q1[i] - q2[i], i);
    return {lam2 + d.min, lam2 + d.max};
}

Interval difference_bounds(const Potential1D& pot, double p1, double p2) {
    if (!(p1 > p2) || !(p2 >= 0.0)) throw InvalidArgument("difference_bounds: need p1 > p2 >= 0");
    const std::vector<double> q = liouville_q(pot, p1 + p2);
    const double s = (p1 - p2) / (p1 + p2);
    const auto [lo, hi] = std::minmax_element(q.begin(), q.end());
    return {s * *lo, s * *hi};
}

BoundReport p2_envelope(const Potential1D& pot, double p, std::optional<double> lam_omega) {
    if (!std::isfinite(p)) throw InvalidArgument("p2_envelope: p must be finite");
    const std::vector<double> div = pot.div_a();
    const std::vector<double> q = liouville_q(pot, p);
    const auto a = pot.a();
    Extremes ed, ea, eq;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ed.add(div[i], i);
        ea.add(a[i] * a[i], i);
        eq.add(q[i], i);
    }
    return envelope_from(lam_omega.value_or(lambda_omega(pot.grid())), p, ed, ea, eq);
}

BoundReport p2_envelope(const Field2D& field, double p, std::optional<double> lam_omega) {
    if (!std::isfinite(p)) throw InvalidArgument("p2_envelope: p must be finite");
    const Grid2D& g = field.grid();
    const std::vector<double> div = field.div_a();
    const std::vector<double> q = liouville_q(field, p);
    const auto a1 = field.a1();
    const auto a2 = field.a2();
    Extremes ed, ea, eq;
    for (std::size_t j = 1; j <= g.ny; ++j)
        for (std::size_t i = 1; i <= g.nx; ++i) {
            const std::size_t k = g.at(i, j);
            ed.add(div[k], k);
            ea.add(a1[k] * a1[k] + a2[k] * a2[k], k);
            eq.add(q[(j - 1) * g.nx + (i - 1)], k);
        }
    return envelope_from(lam_omega.value_or(lambda_omega(g)), p, ed, ea, eq);
}

namespace {

void certificate_statement(NoDecayCertificate& c, double p0) {
    std::ostringstream os;
    if (c.certified)
        os << "min q(., " << p0 << ") = " << c.min_q << " >= 0: lambda_1(p) is nondecreasing for p >= "
           << 0.5 * p0 << " and there is no potential well";
    else
        os << "q(., " << p0 << ") = " << c.min_q << " < 0 at (" << c.x << ", " << c.y
           << "); no monotonicity certificate";
    if (c.sampled_divergence) os << " [div a from finite differences]";
    c.statement = os.str();
}

}  // namespace

NoDecayCertificate no_decay_certificate(const Potential1D& pot, double p0) {
    if (!(p0 > 0.0)) throw InvalidArgument("no_decay_certificate: p0 must be > 0");
    const std::vector<double> q = liouville_q(pot, p0);
    NoDecayCertificate c;
    const auto it = std::min_element(q.begin(), q.end());
    c.node = static_cast<std::size_t>(it - q.begin());
    c.min_q = *it;
    c.x = pot.grid().x(c.node);
    c.certified = c.min_q >= 0.0;
    c.sampled_divergence = !pot.has_bpp();
    certificate_statement(c, p0);
    return c;
}

NoDecayCertificate no_decay_certificate(const Field2D& field, double p0) {
    if (!(p0 > 0.0)) throw InvalidArgument("no_decay_certificate: p0 must be > 0");
    const Grid2D& g = field.grid();
    const std::vector<double> q = liouville_q(field, p0);
    NoDecayCertificate c;
    const auto it = std::min_element(q.begin(), q.end());
    c.node = static_cast<std::size_t>(it - q.begin());
    c.min_q = *it;
    c.x = g.x(c.node % g.nx + 1);
    c.y = -g.ly + static_cast<double>(c.node / g.nx + 1) * g.hy;
    c.certified = c.min_q >= 0.0;
    c.sampled_divergence = !field.has_diva();
    certificate_statement(c, p0);
    return c;
}

BoundReport well_upper_bound(const Potential1D& pot, const Well& well, double p,
                             const WellBoundOptions& opt) {
    const Lattice L = Lattice::of(pot.grid());
    return report_from(single_well(L, pot.b(), edge_b_1d(pot), well, p, opt), p,
                       "test-function bound C e^{-omega p} and its direct quotient");
}

BoundReport well_upper_bound(const Field2D& field, const Well& well, double p,
                             const WellBoundOptions& opt) {
    const Lattice L = Lattice::of(field.grid());
    return report_from(single_well(L, field.b(), edge_b_2d(field), well, p, opt), p,
                       "test-function bound C e^{-omega p} and its direct quotient");
}

BoundReport multiwell_upper_bound(const Potential1D& pot, const std::vector<Well>& wells, double p,
                                  const WellBoundOptions& opt) {
    return multiwell(Lattice::of(pot.grid()), pot.b(), edge_b_1d(pot), wells, p, opt);
}

BoundReport multiwell_upper_bound(const Field2D& field, const std::vector<Well>& wells, double p,
                                  const WellBoundOptions& opt) {
    return multiwell(Lattice::of(field.grid()), field.b(), edge_b_2d(field), wells, p, opt);
}

}  // namespace driftev
