#include <CLI11.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "driftev/asymptotics.hpp"
#include "driftev/bounds.hpp"
#include "driftev/eigensolve1d.hpp"
#include "driftev/io.hpp"
#include "driftev/pde2d.hpp"
#include "driftev/sweep.hpp"
#include "driftev/wells.hpp"

using namespace driftev;
using std::numbers::pi;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 6) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

Potential1D make(const char* id, double l, std::size_t n = 4001, double alpha = 2.0, double c = 0.0) {
    return build_potential_1d(PotentialSpec::from_id(id, alpha, c), Grid1D(l, n));
}

double lambda1(const Potential1D& pot, double p) { return principal_eig(assemble_pencil(pot, p)).lambda; }

Verdict dirichlet_baseline() {
    auto t0 = Clock::now();
    const double lam = lambda1(make("const", 1.0), 0.0);
    const double rel1 = std::abs(lam / (pi * pi / 4.0) - 1.0);
    const double t1 = seconds_since(t0);
    t0 = Clock::now();
    const DecayRun run = estimate_decay(build_field_2d(FieldSpec::constant(0.0, 0.0), Grid2D(1.0, 1.0, 99, 99)), 0.0);
    const double rel2 = std::abs(run.fit.rate_l2 / (pi * pi / 2.0) - 1.0);
    const double t2 = seconds_since(t0);
    return {rel1 <= 1e-5 && rel2 <= 0.05 && t2 < 120.0,
            "eig1d rel err " + fmt(rel1, 3) + " (" + fmt(t1, 2) + " s); evolve2d rate " + fmt(run.fit.rate_l2) +
                " rel err " + fmt(rel2, 3) + " (" + fmt(t2, 3) + " s)"};
}

Verdict constant_shift() {
    double worst = 0.0;
    for (double c : {0.5, 1.0, 2.0}) {
        const Potential1D pot = make("const", 1.0, 4001, 2.0, c);
        const double l0 = lambda1(pot, 0.0);
        for (double p : {5.0, 10.0})
            worst = std::max(worst, std::abs((lambda1(pot, p) - l0) / (p * p * c * c / 4.0) - 1.0));
    }
    return {worst <= 1e-4, "max rel err of lambda(p) - lambda(0) vs p^2 c^2/4: " + fmt(worst, 3)};
}

Verdict product_convergence() {
    const Potential1D pot = make("power", 1.0);
    std::vector<double> disc, simpson;
    double ratio20 = 0.0;
    for (double p : {20.0, 30.0, 40.0, 60.0}) {
        const double ll = std::log(lambda1(pot, p));
        const double r = std::exp(ll - discrete_product_formula(pot, p).log_lambda);
        if (p == 20.0) ratio20 = r;
        disc.push_back(std::abs(r - 1.0));
        simpson.push_back(std::abs(std::expm1(ll - product_formula(pot, p).log_lambda)));
    }
    bool mono = true;
    for (std::size_t i = 1; i < disc.size(); ++i) mono = mono && disc[i] < disc[i - 1];
    std::string d = "ratio(20) = " + fmt(ratio20, 8) + "; |ratio-1| at p=20,30,40,60:";
    for (double v : disc) d += " " + fmt(v, 3);
    d += " (exact integrals:";
    for (double v : simpson) d += " " + fmt(v, 3);
    d += ")";
    return {ratio20 >= 0.8 && ratio20 <= 1.25 && mono, d};
}

Verdict closed_catalog() {
    struct Entry {
        const char* id;
        double alpha, l;
    };
    const std::vector<Entry> cat = {{"power", 1.0, 1.0}, {"power", 2.0, 1.0},      {"power", 3.0, 1.0},
                                    {"sine", 2.0, pi / 2}, {"sine", 2.0, pi},        {"sine", 2.0, 1.5 * pi},
                                    {"quartic", 2.0, 2.0}};
    double worst = 0.0;
    bool finite = true;
    for (const Entry& e : cat) {
        const Potential1D pot = make(e.id, e.l, 4001, e.alpha);
        const PotentialSpec spec = PotentialSpec::from_id(e.id, e.alpha);
        const double prod = product_formula(pot, 100.0).log_lambda;
        worst = std::max(worst, std::abs(prod - closed_form(spec, e.l, 100.0).log_lambda) / std::abs(prod));
        for (double p : {1e3, 1e4, 1e5, 1e6})
            finite = finite && std::isfinite(product_formula(pot, p).log_lambda) &&
                     std::isfinite(closed_form(spec, e.l, p).log_lambda);
    }
    return {worst <= 0.03 && finite,
            "max |log prod - log closed| / |log lambda| at p=100: " + fmt(worst, 3) +
                "; finite to p=1e6: " + (finite ? "yes" : "no")};
}

Verdict decay_exponents() {
    struct Case {
        const char* id;
        double l, b0;
    };
    auto t0 = Clock::now();
    bool ok = true;
    std::string d;
    for (const Case& c : {Case{"power", 1.0, 0.5}, Case{"sine", 1.5 * pi, 2.0}, Case{"quartic", 2.0, 2.25}}) {
        const SweepResult r = run_sweep(PotentialSpec::from_id(c.id), c.l, {10, 20, 30, 40, 50, 60});
        const double rel = r.fit.applicable ? std::abs(r.fit.b0 - r.b0_detected) / r.b0_detected : INFINITY;
        ok = ok && r.fit.applicable && rel <= 0.05 && std::abs(r.b0_detected - c.b0) < 1e-6;
        d += std::string(c.id) + " fit " + fmt(r.fit.b0) + " vs " + fmt(r.b0_detected) + "; ";
    }
    const double t = seconds_since(t0);
    return {ok && t < 300.0, d + fmt(t, 3) + " s"};
}

Verdict sandwich() {
    struct Case {
        const char* id;
        double l;
    };
    std::size_t checked = 0, bad = 0;
    for (const Case& c : {Case{"power", 1.0}, Case{"sine", 1.5 * pi}, Case{"quartic", 2.0}}) {
        const Potential1D pot = make(c.id, c.l);
        const WellReport w = detect_wells(pot);
        for (double p : {10.0, 20.0, 30.0, 40.0, 50.0, 60.0}) {
            double lam;
            try {
                lam = lambda1(pot, p);
            } catch (const OverflowGuard&) {
                continue;
            }
            const BoundReport env = p2_envelope(pot, p);
            const BoundReport up = well_upper_bound(pot, w.wells[*w.deepest], p);
            const double lq = up.well->log_upper_quotient, le = up.well->log_upper_explicit;
            ++checked;
            if (!(env.lower <= lam && std::log(lam) <= std::min(lq, le) && lq <= le)) ++bad;
        }
    }
    return {bad == 0 && checked > 0, std::to_string(checked) + " (potential, p) pairs, " + std::to_string(bad) + " violations"};
}

Verdict comparison_suite() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(-40.0, 40.0);
    const std::size_t n = 400;
    const double h = 2.0 / static_cast<double>(n + 1);
    auto lam = [&](const std::vector<double>& q) {
        Eigen::VectorXd d(n), s(n - 1);
        for (std::size_t i = 0; i < n; ++i) d[static_cast<Eigen::Index>(i)] = 2.0 / (h * h) + q[i];
        s.setConstant(-1.0 / (h * h));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(d, s, Eigen::EigenvaluesOnly);
        return es.eigenvalues()[0];
    };
    std::size_t bad = 0;
    double worst_margin = INFINITY;
    for (int t = 0; t < 200; ++t) {
        std::vector<double> q1(n), q2(n);
        const double amp = 0.05 + 0.95 * std::abs(U(rng)) / 40.0;
        for (auto& v : q1) v = amp * U(rng);
        for (auto& v : q2) v = amp * U(rng);
        const double l1 = lam(q1), l2 = lam(q2);
        const Interval iv = comparison_bounds(q1, q2, l2);
        // rounding slack of a tridiagonal eigensolve: eps |A|
        const double slack = 8.0 * std::numeric_limits<double>::epsilon() * (4.0 / (h * h) + 40.0);
        if (!iv.contains(l1, slack)) ++bad;
        worst_margin = std::min(worst_margin, std::min(l1 - iv.lo, iv.hi - l1));
    }
    return {bad == 0, "200 random pairs, " + std::to_string(bad) + " outside; smallest margin " + fmt(worst_margin, 3)};
}

Verdict laplace_lemma() {
    double worst = 0.0;
    bool tends = true;
    std::string d;
    for (int mu : {1, 2}) {
        double prev = INFINITY;
        for (double p : {1e2, 1e3, 1e4}) {
            const auto g = [mu](double x) { return mu == 1 ? x : x * x; };
            const double num = laplace_integral(g, 1.0, mu, p).log_value;
            const double exact = mu == 1 ? std::log(-std::expm1(-p) / p)
                                         : std::log(std::sqrt(pi) * std::erf(std::sqrt(p)) / (2.0 * std::sqrt(p)));
            worst = std::max(worst, std::abs(std::expm1(num - exact)));
            const double dev = std::abs(std::expm1(num - laplace_predict(mu, p)));
            tends = tends && dev <= std::max(prev, 1e-13);
            prev = dev;
        }
    }
    return {worst <= 1e-8 && tends, "max rel err vs closed forms " + fmt(worst, 3) + "; ratio to prediction -> 1: " + (tends ? "yes" : "no")};
}

Verdict separability() {
    auto t0 = Clock::now();
    const double l1d = lambda1(make("power", 1.0), 10.0);
    DecayOptions opt;
    opt.t_end = 1.5;
    const RichardsonDecay rd = decay_richardson(FieldSpec::from_id("linear"), Grid2D(1.0, 1.0, 99, 99), 10.0, opt);
    const double rel = std::abs(rd.extrapolated / (2.0 * l1d) - 1.0);
    return {rel <= 0.05, "2D rate (h, h/2, extrapolated) " + fmt(rd.coarse) + ", " + fmt(rd.fine) + ", " + fmt(rd.extrapolated) +
                             " vs 2 lambda_1D = " + fmt(2.0 * l1d) + ", rel err " + fmt(rel, 3) + " (" + fmt(seconds_since(t0), 3) + " s)"};
}

double flatness(const Profile& prof, double radius) {
    const Grid2D& g = prof.grid;
    double hi = -INFINITY, lo = INFINITY;
    for (std::size_t j = 0; j < g.full_y(); ++j)
        for (std::size_t i = 0; i < g.full_x(); ++i)
            if (std::hypot(g.x(i), g.y(j)) <= radius + 1e-12) {
                hi = std::max(hi, prof.values[g.at(i, j)]);
                lo = std::min(lo, prof.values[g.at(i, j)]);
            }
    return hi - lo;
}

Verdict colonies() {
    auto t0 = Clock::now();
    const Grid2D g(1.0, 1.0, 99, 99);
    const Field2D two = build_field_2d(FieldSpec::two_bump(), g);
    const WellReport w = detect_wells(two);
    const DecayRun r = estimate_decay(two, 100.0);
    const Profile v = adjoint_profile(r.state, two, 100.0);
    const double a = mask_peak(v, w.wells[0].basin_mask), b = mask_peak(v, w.wells[1].basin_mask);
    const double ratio = std::min(a, b) / std::max(a, b);
    const bool ratio_ok = ratio >= 1.0 / 1500.0 && ratio <= 3.0 / 500.0;

    const Field2D vortex = build_field_2d(FieldSpec::vortex(0.5), g);
    const DecayRun rv = estimate_decay(vortex, 40.0);
    const Profile u = extract_profile(rv.state);
    const double flat = flatness(u, 0.5);
    const double t = seconds_since(t0);
    return {ratio_ok && flat < 0.05 && t < 900.0,
            "colony peak ratio 1/" + fmt(1.0 / ratio, 4) + (ratio_ok ? " (ok)" : " (out of range)") +
                "; vortex max-min on |x|<=1/2: " + fmt(flat, 4) + " (needs < 0.05; |x|<=0.4: " + fmt(flatness(u, 0.4), 3) +
                ", |x|<=0.3: " + fmt(flatness(u, 0.3), 3) + ") (" + fmt(t, 3) + " s)"};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only, known_red;
    app.add_option("--only", only, "run only these criteria");
    app.add_option("--known-red", known_red,
                   "criteria documented as failing; exit 0 iff exactly these fail");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"Dirichlet baseline", dirichlet_baseline},
        {"constant-drift exact shift", constant_shift},
        {"product formula convergence", product_convergence},
        {"closed-form catalog", closed_catalog},
        {"decay-exponent recovery", decay_exponents},
        {"bounds sandwich", sandwich},
        {"comparison property suite", comparison_suite},
        {"Laplace integral oracle", laplace_lemma},
        {"separability", separability},
        {"colony reproduction", colonies},
    };
    std::set<int> failed, ran;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        Verdict v;
        try {
            v = criteria[k].second();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        ran.insert(id);
        if (!v.pass) failed.insert(id);
        std::cout << (v.pass ? "PASS" : "FAIL") << "  " << id << ". " << criteria[k].first << ": " << v.detail << std::endl;
    }
    std::set<int> expected;
    for (int k : known_red)
        if (ran.count(k)) expected.insert(k);
    std::cout << "criteria evaluated: " << ran.size() << ", passed: " << ran.size() - failed.size() << std::endl;
    if (!known_red.empty()) return failed == expected ? 0 : 1;
    return failed.empty() ? 0 : 1;
}
