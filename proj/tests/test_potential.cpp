#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "driftev/error.hpp"
#include "driftev/potential.hpp"
#include "driftev/wells.hpp"

using namespace driftev;
using std::numbers::pi;

namespace {

double max_fd_error(const PotentialSpec& spec, double l, std::size_t n) {
    const Potential1D pot = build_potential_1d(spec, Grid1D(l, n));
    const auto b = pot.b();
    const auto a = pot.a();
    const double h = pot.grid().h;
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs((b[i + 2] - b[i]) / (2.0 * h) - a[i]));
    return err;
}

}  // namespace

TEST_SUITE("potential") {
    TEST_CASE("grid spacing and node placement") {
        const Grid1D g(1.0, 9);
        CHECK(g.h == 2.0 / 10.0);
        CHECK(g.x(0) == doctest::Approx(-0.8));
        CHECK(g.x(8) == doctest::Approx(0.8));
        CHECK_THROWS_AS(Grid1D(1.0, 2), InvalidArgument);
        CHECK_THROWS_AS(Grid1D(0.0, 9), InvalidArgument);
        CHECK_THROWS_AS(Grid2D(1.0, -1.0, 9, 9), InvalidArgument);
    }

    TEST_CASE("power law alpha=2 samples") {
        const Potential1D pot = build_potential_1d(PotentialSpec::from_id("power", 2.0), Grid1D(1.0, 9));
        const auto b = pot.b();
        CHECK(b.size() == 11);
        CHECK(b[5] == doctest::Approx(0.0));
        CHECK(b.front() == doctest::Approx(0.5));
        CHECK(b.back() == doctest::Approx(0.5));
        for (std::size_t i = 0; i < 9; ++i) CHECK(pot.a()[i] == doctest::Approx(pot.grid().x(i)));
    }

    TEST_CASE("zero constant drift is identically zero") {
        const Potential1D pot = build_potential_1d(PotentialSpec::from_id("const", 2.0, 0.0), Grid1D(2.0, 31));
        for (double v : pot.b()) CHECK(v == 0.0);
        for (double v : pot.a()) CHECK(v == 0.0);
    }

    TEST_CASE("sine on (-3pi/2, 3pi/2) has b2 - b1 = 2 on [0, l]") {
        const Potential1D pot = build_potential_1d(PotentialSpec::from_id("sine"), Grid1D(1.5 * pi, 3001));
        const auto ab = check_assumption_ab(pot);
        CHECK(ab.b2 - ab.b1 == doctest::Approx(2.0).epsilon(1e-6));
    }

    TEST_CASE("catalog errors") {
        CHECK_THROWS_AS(PotentialSpec::from_id("nope"), InvalidArgument);
        CHECK_THROWS_AS(build_potential_1d(PotentialSpec::from_id("power", 0.5), Grid1D(1.0, 9)), InvalidArgument);
        CHECK_THROWS_AS(FieldSpec::from_id("nope"), InvalidArgument);
    }

    TEST_CASE("sampled a matches centered differences of b at second order") {
        for (const PotentialSpec& spec :
             {PotentialSpec::from_id("power", 3.0), PotentialSpec::from_id("sine"), PotentialSpec::from_id("quartic")}) {
            const double e1 = max_fd_error(spec, 2.0, 200);
            const double e2 = max_fd_error(spec, 2.0, 401);
            CHECK(std::log2(e1 / e2) >= 1.9);
        }
    }

    TEST_CASE("single vortex bump") {
        const Grid2D g(1.0, 1.0, 79, 79);
        const Field2D f = build_field_2d(FieldSpec::vortex(0.5), g);
        double amax = 0.0;
        for (std::size_t j = 0; j < g.full_y(); ++j)
            for (std::size_t i = 0; i < g.full_x(); ++i) {
                const std::size_t k = g.at(i, j);
                const double r = std::hypot(g.x(i), g.y(j));
                const double mag = std::hypot(f.a1()[k], f.a2()[k]);
                amax = std::max(amax, mag);
                if (r >= 0.5) CHECK(mag == doctest::Approx(0.0).scale(1.0));
            }
        CHECK(amax <= 1.0 + 1e-12);
        CHECK(amax > 0.99);
    }

    TEST_CASE("constant zero field has zero potential") {
        const Field2D f = build_field_2d(FieldSpec::constant(0.0, 0.0), Grid2D(1.0, 1.0, 9, 9));
        for (double v : f.b()) CHECK(v == 0.0);
    }

    TEST_CASE("two-bump field and its wells") {
        const Field2D f = build_field_2d(FieldSpec::two_bump(), Grid2D(1.0, 1.0, 199, 199));
        const WellReport rep = detect_wells(f);
        REQUIRE(rep.wells.size() == 2);
        // depth of coeff * alpha(.; R) is coeff * 2R / pi
        CHECK(rep.wells[0].depth == doctest::Approx(2.0 * 2.0 * 0.25 / pi).epsilon(2e-3));
        CHECK(rep.wells[1].depth == doctest::Approx(2.0 * 0.4 / pi).epsilon(2e-3));
        CHECK(rep.b0 == rep.wells[0].depth);
        FieldSpec overlap = FieldSpec::two_bump();
        overlap.bumps[1].cx = overlap.bumps[0].cx;
        overlap.bumps[1].cy = overlap.bumps[0].cy;
        CHECK_THROWS_AS(build_field_2d(overlap, Grid2D(1.0, 1.0, 19, 19)), InvalidArgument);
    }

    TEST_CASE("liouville q") {
        const Potential1D lin = build_potential_1d(PotentialSpec::from_id("power", 2.0), Grid1D(1.0, 51));
        const double p = 7.0;
        const auto q = liouville_q(lin, p);
        for (std::size_t i = 0; i < q.size(); ++i) {
            const double x = lin.grid().x(i);
            CHECK(q[i] == doctest::Approx(-p / 2.0 + p * p * x * x / 4.0));
        }
        const Potential1D cst = build_potential_1d(PotentialSpec::from_id("const", 2.0, 1.5), Grid1D(1.0, 51));
        for (double v : liouville_q(cst, p)) CHECK(v == doctest::Approx(p * p * 1.5 * 1.5 / 4.0));
        for (double v : liouville_q(lin, 0.0)) CHECK(v == 0.0);
        const Field2D f = build_field_2d(FieldSpec::constant(0.3, -0.4), Grid2D(1.0, 1.0, 9, 9));
        for (double v : liouville_q(f, 4.0)) CHECK(v == doctest::Approx(4.0 * 0.25));
    }

    TEST_CASE("q difference identity for p1 > p2") {
        const Potential1D pot = build_potential_1d(PotentialSpec::from_id("quartic"), Grid1D(2.0, 101));
        for (auto [p1, p2] : {std::pair{3.0, 1.0}, std::pair{10.0, 0.0}, std::pair{7.5, 2.5}}) {
            const auto q1 = liouville_q(pot, p1), q2 = liouville_q(pot, p2), qs = liouville_q(pot, p1 + p2);
            for (std::size_t i = 0; i < q1.size(); ++i)
                CHECK(q1[i] - q2[i] == doctest::Approx((p1 - p2) / (p1 + p2) * qs[i]).scale(1.0));
        }
    }

    TEST_CASE("wells of simple potentials") {
        const Potential1D quad = build_potential_1d(PotentialSpec::from_id("power", 2.0), Grid1D(1.0, 401));
        const WellReport r = detect_wells(quad);
        REQUIRE(r.wells.size() == 1);
        CHECK(r.b0 == doctest::Approx(0.5));
        const Potential1D sine = build_potential_1d(PotentialSpec::from_id("sine"), Grid1D(1.5 * pi, 2001));
        CHECK(detect_wells(sine).b0 == doctest::Approx(2.0).epsilon(1e-6));
        CHECK_THROWS_AS(detect_wells(quad, -1.0), InvalidArgument);
    }

    TEST_CASE("well detection is invariant under shifts and mirroring") {
        const Grid1D g(2.0, 301);
        std::vector<double> b(g.n + 2);
        for (std::size_t k = 0; k < b.size(); ++k) {
            const double x = g.x_ext(k);
            b[k] = std::cos(3.0 * x) + 0.3 * x;
        }
        const WellReport r0 = detect_wells(Potential1D::from_samples(g, b));
        std::vector<double> shifted = b, mirrored(b.rbegin(), b.rend());
        for (double& v : shifted) v += 17.0;
        const WellReport rs = detect_wells(Potential1D::from_samples(g, shifted));
        const WellReport rm = detect_wells(Potential1D::from_samples(g, mirrored));
        REQUIRE(r0.wells.size() >= 2);
        REQUIRE(rs.wells.size() == r0.wells.size());
        REQUIRE(rm.wells.size() == r0.wells.size());
        for (std::size_t w = 0; w < r0.wells.size(); ++w) {
            CHECK(rs.wells[w].depth == doctest::Approx(r0.wells[w].depth).epsilon(1e-12));
            CHECK(rs.wells[w].region_mask == r0.wells[w].region_mask);
            CHECK(rm.wells[w].depth == doctest::Approx(r0.wells[w].depth).epsilon(1e-12));
            std::vector<std::uint8_t> flipped(r0.wells[w].region_mask.rbegin(), r0.wells[w].region_mask.rend());
            CHECK(rm.wells[w].region_mask == flipped);
        }
    }

    TEST_CASE("region boundaries sit at or above the barrier") {
        const Field2D f = build_field_2d(FieldSpec::two_bump(), Grid2D(1.0, 1.0, 59, 59));
        const WellReport rep = detect_wells(f);
        const double tol = default_tolerance(f);
        for (const Well& w : rep.wells) {
            bool has_min = false;
            for (std::size_t k = 0; k < rep.lattice.size(); ++k) {
                if (!w.region_mask[k]) continue;
                if (f.b()[k] == w.min_value) has_min = true;
                rep.lattice.for_each_neighbor(k, [&](std::size_t nb, double) {
                    if (!w.region_mask[nb]) CHECK(f.b()[nb] >= w.barrier_value - tol);
                });
            }
            CHECK(has_min);
            CHECK(w.depth > 0.0);
        }
        for (std::size_t k = 0; k < rep.lattice.size(); ++k)
            CHECK(rep.wells[0].basin_mask[k] + rep.wells[1].basin_mask[k] <= 1);
    }

    TEST_CASE("assumption AB") {
        CHECK(check_assumption_ab(build_potential_1d(PotentialSpec::from_id("power", 2.0), Grid1D(1.0, 201))).holds);
        CHECK_FALSE(check_assumption_ab(build_potential_1d(PotentialSpec::from_id("sine"), Grid1D(3.0 * pi, 2001))).holds);
        CHECK(check_assumption_ab(build_potential_1d(PotentialSpec::from_id("quartic"), Grid1D(2.0, 401))).holds);
    }
}
