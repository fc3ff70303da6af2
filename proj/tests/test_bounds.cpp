#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>

#include "driftev/bounds.hpp"
#include "driftev/eigensolve1d.hpp"
#include "driftev/error.hpp"
#include "driftev/wells.hpp"
#include "oracles.hpp"

using namespace driftev;
using std::numbers::pi;

namespace {

Potential1D make(const char* id, double l, std::size_t n = 2001, double alpha = 2.0, double c = 0.0) {
    return build_potential_1d(PotentialSpec::from_id(id, alpha, c), Grid1D(l, n));
}

double lambda1(const Potential1D& pot, double p) { return principal_eig(assemble_pencil(pot, p)).lambda; }

/// Relative change of lambda_1 between n and 2n+1 nodes.
double grid_error(const char* id, double l, double p, std::size_t n, double alpha = 2.0) {
    const double a = lambda1(make(id, l, n, alpha), p);
    const double b = lambda1(make(id, l, 2 * n + 1, alpha), p);
    return std::abs(a - b);
}

}  // namespace

TEST_SUITE("bounds") {
    TEST_CASE("comparison interval collapses for a constant shift") {
        const std::vector<double> q2 = {1.0, -2.0, 3.5, 0.0};
        std::vector<double> q1 = q2;
        for (double& v : q1) v += 2.25;
        const Interval iv = comparison_bounds(q1, q2, 4.0);
        CHECK(iv.lo == doctest::Approx(6.25));
        CHECK(iv.hi == doctest::Approx(6.25));
        CHECK_THROWS_AS(comparison_bounds(q1, std::vector<double>{1.0}, 0.0), InvalidArgument);
    }

    TEST_CASE("comparison interval for a=x, p=10 against the free Laplacian") {
        const Potential1D pot = make("power", 1.0, 2001);
        const auto q = liouville_q(pot, 10.0);
        const std::vector<double> zero(q.size(), 0.0);
        const Interval iv = comparison_bounds(q, zero, pi * pi / 4.0);
        const double h = pot.grid().h;
        CHECK(iv.lo == doctest::Approx(pi * pi / 4.0 - 5.0));
        CHECK(iv.hi == doctest::Approx(pi * pi / 4.0 - 5.0 + 25.0 * (1.0 - h) * (1.0 - h)));
        CHECK(iv.contains(lambda1(pot, 10.0)));
    }

    TEST_CASE("comparison property on random bounded potentials") {
        std::mt19937_64 rng(12345);
        std::uniform_real_distribution<double> U(-30.0, 30.0);
        const std::size_t n = 150;
        const double h = 2.0 / static_cast<double>(n + 1);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> q1(n), q2(n);
            for (auto& v : q1) v = U(rng);
            for (auto& v : q2) v = U(rng);
            const double l1 = oracle::lq_eigenvalues(q1, h)[0];
            const double l2 = oracle::lq_eigenvalues(q2, h)[0];
            CHECK(comparison_bounds(q1, q2, l2).contains(l1, 1e-9 * (1.0 + std::abs(l2))));
        }
    }

    TEST_CASE("difference bounds hold between solver values") {
        for (const char* id : {"power", "quartic"}) {
            const Potential1D pot = make(id, std::string(id) == "quartic" ? 2.0 : 1.0, 2001);
            const std::vector<double> ps = {0.0, 2.0, 5.0, 10.0, 20.0};
            for (std::size_t i = 0; i < ps.size(); ++i)
                for (std::size_t j = 0; j < i; ++j) {
                    const Interval iv = difference_bounds(pot, ps[i], ps[j]);
                    const double d = lambda1(pot, ps[i]) - lambda1(pot, ps[j]);
                    CHECK(iv.contains(d, 1e-6 * (1.0 + std::abs(d))));
                }
        }
        CHECK_THROWS_AS(difference_bounds(make("power", 1.0, 11), 1.0, 2.0), InvalidArgument);
    }

    TEST_CASE("envelope is exact for constant drift") {
        const double c = 1.5, p = 4.0;
        const BoundReport r = p2_envelope(make("const", 1.0, 401, 2.0, c), p);
        CHECK(r.lower == doctest::Approx(pi * pi / 4.0 + p * p * c * c / 4.0));
        CHECK(r.upper == doctest::Approx(pi * pi / 4.0 + p * p * c * c / 4.0));
    }

    TEST_CASE("envelope for a=x") {
        const Potential1D pot = make("power", 1.0, 2001);
        const double p = 3.0, h = pot.grid().h;
        const BoundReport r = p2_envelope(pot, p);
        CHECK(r.lower == doctest::Approx(pi * pi / 4.0 - p / 2.0));
        CHECK(r.upper == doctest::Approx(pi * pi / 4.0 - p / 2.0 + p * p * (1.0 - h) * (1.0 - h) / 4.0));
    }

    TEST_CASE("vortex envelope has no quadratic growth below") {
        const Field2D f = build_field_2d(FieldSpec::vortex(0.5), Grid2D(1.0, 1.0, 59, 59));
        const BoundReport r10 = p2_envelope(f, 10.0), r100 = p2_envelope(f, 100.0);
        CHECK(r100.lower < r10.lower);
        CHECK(r100.upper > r10.upper);
        CHECK(lambda_omega(Grid2D(1.0, 2.0, 9, 9)) == doctest::Approx(pi * pi / 4.0 * 1.25));
    }

    TEST_CASE("no-decay certificate") {
        for (double p0 : {0.1, 1.0, 50.0}) {
            const Potential1D cst = make("const", 1.0, 401, 2.0, -0.7);
            const NoDecayCertificate c = no_decay_certificate(cst, p0);
            CHECK(c.certified);
            CHECK(c.min_q == doctest::Approx(p0 * p0 * 0.49 / 4.0));
            CHECK(detect_wells(cst).wells.empty());
            const NoDecayCertificate x = no_decay_certificate(make("power", 1.0, 401), p0);
            CHECK_FALSE(x.certified);
            CHECK(std::abs(x.x) < 1e-12);
            CHECK(x.min_q == doctest::Approx(-p0 / 2.0));
        }
        const NoDecayCertificate sgn = no_decay_certificate(make("power", 1.0, 400, 1.0), 5.0);
        CHECK_FALSE(sgn.certified);
        CHECK(sgn.min_q < -100.0);
        CHECK_THROWS_AS(no_decay_certificate(make("power", 1.0, 11), 0.0), InvalidArgument);
    }

    TEST_CASE("well bound for a=x with omega=0.4") {
        const Potential1D pot = make("power", 1.0, 2001);
        const WellReport w = detect_wells(pot);
        WellBoundOptions opt;
        opt.omega = 0.4;
        std::optional<double> log_C;
        for (double p : {10.0, 20.0, 40.0, 60.0}) {
            const BoundReport r = well_upper_bound(pot, w.wells[0], p, opt);
            REQUIRE(r.well);
            CHECK(r.well->log_upper_quotient <= r.well->log_upper_explicit + 1e-12);
            CHECK(r.well->log_upper_explicit == doctest::Approx(r.well->log_C - 0.4 * p));
            // C depends on the geometry only, so the explicit bound decays exactly like e^{-0.4 p}
            if (log_C) CHECK(r.well->log_C == *log_C);
            log_C = r.well->log_C;
            CHECK(std::log(lambda1(pot, p)) <= r.well->log_upper_quotient);
        }
    }

    TEST_CASE("p=0 quotient is a Rayleigh bound above the Dirichlet eigenvalue") {
        const Potential1D pot = make("power", 1.0, 2001);
        const BoundReport r = well_upper_bound(pot, detect_wells(pot).wells[0], 0.0);
        CHECK(std::exp(r.well->log_upper_quotient) >= pi * pi / 4.0);
    }

    TEST_CASE("infeasible bound parameters") {
        const Potential1D pot = make("power", 1.0, 401);
        const Well w = detect_wells(pot).wells[0];
        WellBoundOptions bad;
        bad.omega = 0.6;
        CHECK_THROWS_AS(well_upper_bound(pot, w, 10.0, bad), InvalidArgument);
        WellBoundOptions wide;
        wide.epsilon = 0.9;
        CHECK_THROWS_AS(well_upper_bound(pot, w, 10.0, wide), InvalidArgument);
    }

    TEST_CASE("two-bump deepest well admits exponents just below its depth") {
        const Field2D f = build_field_2d(FieldSpec::two_bump(), Grid2D(1.0, 1.0, 99, 99));
        const WellReport w = detect_wells(f);
        WellBoundOptions opt;
        opt.omega = 0.95 * w.wells[0].depth;
        const BoundReport r = well_upper_bound(f, w.wells[0], 100.0, opt);
        CHECK(r.well->omega == doctest::Approx(0.95 * w.wells[0].depth));
        CHECK(r.well->log_upper_quotient <= r.well->log_upper_explicit + 1e-12);
        CHECK(w.wells[0].depth == doctest::Approx(1.0 / pi).epsilon(1e-2));
    }

    TEST_CASE("multi-well bounds") {
        const Potential1D quad = make("power", 1.0, 2001);
        const Well w = detect_wells(quad).wells[0];
        const BoundReport one = multiwell_upper_bound(quad, {w.basin_well()}, 20.0);
        const BoundReport single = well_upper_bound(quad, w.basin_well(), 20.0);
        CHECK(one.well->log_upper_quotient == doctest::Approx(single.well->log_upper_quotient).epsilon(1e-12));

        const Potential1D dw = make("quartic", 1.6, 2001);
        const WellReport rep = detect_wells(dw);
        std::vector<Well> basins;
        for (const Well& x : rep.wells) basins.push_back(x.basin_well());
        REQUIRE(basins.size() == 2);
        const BoundReport two = multiwell_upper_bound(dw, basins, 40.0);
        const double lam2 = eigs_bisection(assemble_pencil(dw, 40.0), 2)[1].lambda;
        CHECK(std::log(lam2) <= two.well->log_upper_quotient);
        CHECK(two.well->log_upper_quotient <= two.well->log_upper_explicit + 1e-12);
        CHECK_THROWS_AS(multiwell_upper_bound(dw, {rep.wells[0], rep.wells[0]}, 40.0), InvalidArgument);

        const Field2D f = build_field_2d(FieldSpec::two_bump(), Grid2D(1.0, 1.0, 99, 99));
        const WellReport fw = detect_wells(f);
        const BoundReport fb = multiwell_upper_bound(f, {fw.wells[0].basin_well(), fw.wells[1].basin_well()}, 100.0);
        CHECK(fb.well->omega < fw.wells[1].depth);
        CHECK(fb.well->omega > 0.4 * fw.wells[1].depth);
    }

    TEST_CASE("sandwich over the catalog") {
        struct Case {
            const char* id;
            double l;
            double alpha;
        };
        for (const Case& c : {Case{"power", 1.0, 2.0}, Case{"power", 1.0, 3.0}, Case{"sine", 1.5 * pi, 2.0},
                              Case{"quartic", 2.0, 2.0}}) {
            CAPTURE(c.id);
            const Potential1D pot = make(c.id, c.l, 2001, c.alpha);
            const WellReport w = detect_wells(pot);
            for (double p : {5.0, 10.0, 20.0, 40.0}) {
                CAPTURE(p);
                const double lam = lambda1(pot, p);
                const double slack = 3.0 * grid_error(c.id, c.l, p, 1000, c.alpha);
                const BoundReport env = p2_envelope(pot, p);
                const BoundReport up = well_upper_bound(pot, w.wells[*w.deepest], p);
                CHECK(env.lower <= lam + slack);
                CHECK(lam <= env.upper + slack);
                CHECK(lam <= std::exp(up.log_upper) + slack);
                CHECK(up.well->log_upper_quotient <= up.well->log_upper_explicit + 1e-12);
            }
        }
    }
}
