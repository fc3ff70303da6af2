#include "driftev/asymptotics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "driftev/error.hpp"
#include "driftev/logmath.hpp"

namespace driftev {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kRefineRange = 0.02;
constexpr double kRefineWindow = 60.0;
constexpr int kMaxDepth = 40;

struct PanelSum {
    std::vector<double> logs;
    std::vector<double> err_logs;
};

// log of (h/6)(e^fa + 4 e^fm + e^fb), and log |Simpson - trapezoid| as error
void simpson_panel(double width, double fa, double fm, double fb, PanelSum& out) {
    const double m = std::max({fa, fm, fb});
    const double ea = std::exp(fa - m), em = std::exp(fm - m), eb = std::exp(fb - m);
    const double s = width / 6.0 * (ea + 4.0 * em + eb);
    const double t = width / 2.0 * (ea + eb);
    out.logs.push_back(m + std::log(s));
    const double diff = std::abs(s - t);
    out.err_logs.push_back(diff > 0.0 ? m + std::log(diff) : kNegInf);
}

void refine_panel(const std::function<double(double)>& f, double a, double b, double fa,
                  double fb, double ceiling, int depth, PanelSum& out) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    const double hi = std::max({fa, fm, fb});
    const double lo = std::min({fa, fm, fb});
    if (depth < kMaxDepth && hi - lo > kRefineRange && hi > ceiling - kRefineWindow) {
        refine_panel(f, a, mid, fa, fm, ceiling, depth + 1, out);
        refine_panel(f, mid, b, fm, fb, ceiling, depth + 1, out);
        return;
    }
    simpson_panel(b - a, fa, fm, fb, out);
}

bool is_zero(double x, double scale) { return std::abs(x) <= 1e-12 * scale; }

}  // namespace

LogQuad log_half_integral(const Potential1D& pot, double p, int sign) {
    if (sign != 1 && sign != -1) throw InvalidArgument("log_half_integral: sign must be +1 or -1");
    if (!std::isfinite(p)) throw InvalidArgument("log_half_integral: p must be finite");
    const Grid1D& g = pot.grid();
    const auto b = pot.b();
    const double sp = sign * p;

    std::vector<double> xs, fs;
    xs.push_back(0.0);
    fs.push_back(sp * pot.b_at(0.0));
    for (std::size_t k = 0; k < g.n + 2; ++k) {
        const double x = g.x_ext(k);
        if (x <= 0.0 || is_zero(x, g.l)) continue;
        xs.push_back(x);
        fs.push_back(sp * b[k]);
    }
    xs.back() = g.l;
    double ceiling = kNegInf;
    for (double v : fs) ceiling = std::max(ceiling, v);

    const std::function<double(double)> f = [&](double x) { return sp * pot.b_at(x); };
    PanelSum sum;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        refine_panel(f, xs[i], xs[i + 1], fs[i], fs[i + 1], ceiling, 0, sum);
    LogQuad q;
    q.log_value = log_sum_exp(sum.logs);
    q.abs_error_log = log_sum_exp(sum.err_logs);
    return q;
}

AsymptoticValue product_formula(const Potential1D& pot, double p) {
    AsymptoticValue v;
    v.p = p;
    v.form = "product-formula";
    const LogQuad minus = log_half_integral(pot, p, -1);
    const LogQuad plus = log_half_integral(pot, p, +1);
    v.log_lambda = -minus.log_value - plus.log_value;
    const AssumptionAB ab = check_assumption_ab(pot);
    if (!ab.holds) {
        v.unreliable = true;
        v.note = ab.diagnostic;
    }
    return v;
}

AsymptoticValue discrete_product_formula(const Potential1D& pot, double p) {
    if (!std::isfinite(p)) throw InvalidArgument("discrete_product_formula: p must be finite");
    const Grid1D& g = pot.grid();
    const auto b = pot.b();
    const double log_h = std::log(g.h);

    std::vector<double> mass_terms, resist_terms;
    for (std::size_t i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        if (is_zero(x, g.l))
            mass_terms.push_back(-p * b[i + 1] + log_h - std::numbers::ln2);
        else if (x > 0.0)
            mass_terms.push_back(-p * b[i + 1] + log_h);
    }
    for (std::size_t j = 0; j <= g.n; ++j) {
        const double xl = g.x_ext(j), xr = g.x_ext(j + 1);
        if (xr <= 0.0 || is_zero(xr, g.l)) continue;
        const double mid = 0.5 * (xl + xr);
        const double bmid = pot.has_closure() ? pot.b_at(mid) : 0.5 * (b[j] + b[j + 1]);
        const bool straddles = xl < 0.0 && !is_zero(xl, g.l);
        resist_terms.push_back(p * bmid + log_h - (straddles ? std::numbers::ln2 : 0.0));
    }
    AsymptoticValue v;
    v.p = p;
    v.form = "discrete-product";
    v.log_lambda = -log_sum_exp(mass_terms) - log_sum_exp(resist_terms);
    return v;
}

LogQuad laplace_integral(const std::function<double(double)>& gfun, double L, double mu, double p) {
    if (!(mu > 0.0)) throw InvalidArgument("laplace_integral: exponent mu must be > 0");
    if (!(L > 0.0)) throw InvalidArgument("laplace_integral: L must be > 0");
    if (!(p > 0.0) || !std::isfinite(p)) throw InvalidArgument("laplace_integral: p must be > 0");
    LogQuad q;
    std::ostringstream warn;
    if (std::abs(gfun(0.0)) > 1e-12) warn << "g(0) = " << gfun(0.0) << " is not 0; ";
    const double x0 = 1e-4 * std::min(L, 1.0);
    const double ratio = gfun(x0) / std::pow(x0, mu);
    if (!(std::abs(ratio - 1.0) <= 0.05))
        warn << "g(x)/x^mu = " << ratio << " at x = " << x0 << ", expected ~1";
    q.warning = warn.str();

    using boost::math::quadrature::gauss_kronrod;
    const double width = std::pow(p, -1.0 / mu);
    auto integrand = [&](double x) { return std::exp(-p * gfun(x)); };
    std::vector<double> logs, errs;
    double a = 0.0, b = std::min(width, L);
    while (a < L) {
        double err = 0.0;
        const double piece = gauss_kronrod<double, 31>::integrate(integrand, a, b, 12, 1e-11, &err);
        if (piece < 0.0) throw NumericalError("laplace_integral: negative quadrature piece");
        if (piece > 0.0) logs.push_back(std::log(piece));
        if (err > 0.0) errs.push_back(std::log(err));
        a = b;
        b = std::min(2.0 * b, L);
    }
    if (logs.empty()) throw NumericalError("laplace_integral: integrand underflowed everywhere");
    q.log_value = log_sum_exp(logs);
    q.abs_error_log = errs.empty() ? kNegInf : log_sum_exp(errs);
    return q;
}

LogQuad laplace_integral(std::span<const double> gs, double L, double mu, double p) {
    if (!(mu > 0.0)) throw InvalidArgument("laplace_integral: exponent mu must be > 0");
    if (!(L > 0.0)) throw InvalidArgument("laplace_integral: L must be > 0");
    if (gs.size() < 2) throw InvalidArgument("laplace_integral: need at least two samples");
    if (!std::isfinite(p)) throw InvalidArgument("laplace_integral: p must be finite");
    const std::size_t m = gs.size() - 1;
    const double h = L / static_cast<double>(m);
    std::vector<double> logs;
    auto f = [&](std::size_t i) { return -p * gs[i]; };
    auto push = [&](std::initializer_list<std::pair<std::size_t, double>> terms, double scale) {
        double top = kNegInf;
        for (auto [i, w] : terms) top = std::max(top, f(i));
        double s = 0.0;
        for (auto [i, w] : terms) s += w * std::exp(f(i) - top);
        logs.push_back(top + std::log(scale * s));
    };
    if (m == 1) {
        push({{0, 1.0}, {1, 1.0}}, h / 2.0);
    } else {
        const std::size_t simpson_end = (m % 2 == 0) ? m : m - 3;
        for (std::size_t i = 0; i + 2 <= simpson_end; i += 2)
            push({{i, 1.0}, {i + 1, 4.0}, {i + 2, 1.0}}, h / 3.0);
        if (m % 2 == 1)
            push({{m - 3, 1.0}, {m - 2, 3.0}, {m - 1, 3.0}, {m, 1.0}}, 3.0 * h / 8.0);
    }
    LogQuad q;
    q.log_value = log_sum_exp(logs);
    return q;
}

double laplace_predict(double mu, double p) {
    if (!(mu > 0.0)) throw InvalidArgument("laplace_predict: exponent mu must be > 0");
    if (!(p > 0.0)) throw InvalidArgument("laplace_predict: p must be > 0");
    return std::lgamma(1.0 / mu + 1.0) - std::log(p) / mu;
}

AsymptoticValue closed_form(const PotentialSpec& spec, double l, double p) {
    using std::numbers::pi;
    if (!(l > 0.0)) throw InvalidArgument("closed_form: l must be > 0");
    if (!(p > 0.0) || !std::isfinite(p)) throw InvalidArgument("closed_form: p must be > 0");
    AsymptoticValue v;
    v.p = p;
    v.form = spec.id();
    const double lp = std::log(p);
    switch (spec.kind) {
        case PotentialKind::PowerLaw: {
            const double a = spec.alpha;
            if (!(a >= 1.0)) throw InvalidArgument("closed_form: power law requires alpha >= 1");
            const double log_coeff = (1.0 / a) * std::log(1.0 / a) + (a - 1.0) * std::log(l) -
                                     std::lgamma(1.0 / a + 1.0);
            v.log_lambda = log_coeff + (1.0 / a + 1.0) * lp - std::pow(l, a) / a * p;
            break;
        }
        case PotentialKind::Sine: {
            if (!(l < 2.0 * pi)) throw InvalidArgument("closed_form: sine case requires 0 < l < 2 pi");
            if (std::abs(l - pi) <= 1e-9 * pi) {
                v.log_lambda = std::log(2.0 / pi) + lp - 2.0 * p;
                v.form += "(l=pi)";
            } else if (l < pi) {
                v.log_lambda = std::log(std::sqrt(2.0 / pi) * std::sin(l)) + 1.5 * lp -
                               (1.0 - std::cos(l)) * p;
                v.form += "(l<pi)";
            } else {
                v.log_lambda = -std::log(pi) + lp - 2.0 * p;
                v.form += "(pi<l<2pi)";
            }
            break;
        }
        case PotentialKind::Quartic: {
            if (!(l > std::sqrt(2.0))) throw InvalidArgument("closed_form: quartic case requires l > sqrt(2)");
            const double al = l * l * l - l;
            const double bl = 0.25 * (l * l - 1.0) * (l * l - 1.0);
            v.log_lambda = std::log(al / std::sqrt(pi)) + 1.5 * lp - bl * p;
            break;
        }
        case PotentialKind::Constant:
            throw InvalidArgument("closed_form: constant drift has no decaying asymptotic law");
    }
    return v;
}

SeparableCaveat separable_product_caveat(const std::vector<Potential1D>& pots, double p) {
    if (pots.empty()) throw InvalidArgument("separable_product_caveat: need at least one axis");
    SeparableCaveat c;
    double prod = 0.0;
    for (const Potential1D& pot : pots) {
        const double lv = product_formula(pot, p).log_lambda;
        c.log_per_axis.push_back(lv);
        prod += lv;
    }
    c.log_sum = log_sum_exp(c.log_per_axis);
    c.log_naive = prod - static_cast<double>(pots.size()) * std::log(4.0);
    return c;
}

}  // namespace driftev
