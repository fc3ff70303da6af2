#include <doctest.h>

#include <cmath>
#include <numbers>

#include "driftev/asymptotics.hpp"
#include "driftev/eigensolve1d.hpp"
#include "driftev/error.hpp"
#include "driftev/wells.hpp"
#include "oracles.hpp"

using namespace driftev;
using std::numbers::pi;

namespace {

Potential1D make(const char* id, double l, std::size_t n = 4001, double alpha = 2.0, double c = 0.0) {
    return build_potential_1d(PotentialSpec::from_id(id, alpha, c), Grid1D(l, n));
}

struct Entry {
    const char* id;
    double alpha;
    double l;
};

const std::vector<Entry> kCatalog = {
    {"power", 1.0, 1.0}, {"power", 2.0, 1.0},      {"power", 3.0, 1.0},          {"sine", 2.0, pi / 2.0},
    {"sine", 2.0, pi},   {"sine", 2.0, 1.5 * pi}, {"quartic", 2.0, 2.0},
};

}  // namespace

TEST_SUITE("asymptotics") {
    TEST_CASE("flat potential gives 1 / l^2") {
        for (double l : {0.5, 1.0, 3.0})
            for (double p : {0.0, 10.0, 1e4}) {
                const AsymptoticValue v = product_formula(make("const", l, 201), p);
                CHECK(v.log_lambda == doctest::Approx(-2.0 * std::log(l)).epsilon(1e-12));
            }
    }

    TEST_CASE("a=x at p=40 against the closed law") {
        const AsymptoticValue v = product_formula(make("power", 1.0), 40.0);
        const double ratio = std::exp(v.log_lambda - oracle::log_linear_drift_law(1.0, 40.0));
        CHECK(ratio >= 0.9);
        CHECK(ratio <= 1.1);
        // both half integrals are error functions here
        const double exact = -std::log(std::sqrt(pi / 80.0) * std::erf(std::sqrt(20.0)));
        CHECK(log_half_integral(make("power", 1.0), 40.0, -1).log_value ==
              doctest::Approx(-exact).epsilon(1e-9));
    }

    TEST_CASE("a=x at p=4000 stays finite and follows the law") {
        const AsymptoticValue v = product_formula(make("power", 1.0), 4000.0);
        REQUIRE(std::isfinite(v.log_lambda));
        const double law = oracle::log_linear_drift_law(1.0, 4000.0);
        CHECK(std::abs(v.log_lambda - law) <= 0.02 * std::abs(law));
    }

    TEST_CASE("closed form values") {
        const AsymptoticValue a1 = closed_form(PotentialSpec::from_id("power", 1.0), 1.0, 30.0);
        CHECK(a1.log_lambda == doctest::Approx(2.0 * std::log(30.0) - 30.0).epsilon(1e-12));
        const AsymptoticValue a2 = closed_form(PotentialSpec::from_id("power", 2.0), 1.0, 40.0);
        CHECK(std::exp(a2.log_lambda) == doctest::Approx(4.16e-7).epsilon(1e-2));
        CHECK(a2.log_lambda == doctest::Approx(oracle::log_linear_drift_law(1.0, 40.0)).epsilon(1e-12));
        const AsymptoticValue s = closed_form(PotentialSpec::from_id("sine"), pi, 50.0);
        CHECK(s.log_lambda == doctest::Approx(std::log(2.0 / pi) + std::log(50.0) - 100.0).epsilon(1e-12));
    }

    TEST_CASE("closed form validity ranges") {
        CHECK_THROWS_AS(closed_form(PotentialSpec::from_id("sine"), 7.0, 10.0), InvalidArgument);
        CHECK_THROWS_AS(closed_form(PotentialSpec::from_id("quartic"), 1.2, 10.0), InvalidArgument);
        CHECK_THROWS_AS(closed_form(PotentialSpec::from_id("const", 2.0, 1.0), 1.0, 10.0), InvalidArgument);
        CHECK_THROWS_AS(closed_form(PotentialSpec::from_id("power", 2.0), 1.0, -1.0), InvalidArgument);
    }

    TEST_CASE("catalog agreement at p=100 and finiteness to p=1e6") {
        for (const Entry& e : kCatalog) {
            CAPTURE(e.id);
            CAPTURE(e.l);
            const Potential1D pot = make(e.id, e.l, 4001, e.alpha);
            const double prod = product_formula(pot, 100.0).log_lambda;
            const double closed = closed_form(PotentialSpec::from_id(e.id, e.alpha), e.l, 100.0).log_lambda;
            CHECK(std::abs(prod - closed) <= 0.03 * std::abs(prod));
            for (double p : {1e3, 1e4, 1e5, 1e6}) {
                CHECK(std::isfinite(product_formula(pot, p).log_lambda));
                CHECK(std::isfinite(closed_form(PotentialSpec::from_id(e.id, e.alpha), e.l, p).log_lambda));
            }
        }
    }

    TEST_CASE("product and closed forms converge as p grows") {
        for (const Entry& e : kCatalog) {
            CAPTURE(e.id);
            CAPTURE(e.l);
            const Potential1D pot = make(e.id, e.l, 4001, e.alpha);
            double prev = INFINITY;
            for (double p : {20.0, 40.0, 80.0, 160.0}) {
                const double dev = std::abs(std::expm1(product_formula(pot, p).log_lambda -
                                                       closed_form(PotentialSpec::from_id(e.id, e.alpha), e.l, p).log_lambda));
                // once both sit at the quadrature noise floor the sequence is flat
                CHECK(dev <= std::max(prev, 1e-9));
                prev = dev;
            }
        }
    }

    TEST_CASE("product formula is invariant under b + const") {
        const Grid1D g(1.3, 801);
        std::vector<double> b(g.n + 2), b2(g.n + 2);
        for (std::size_t k = 0; k < b.size(); ++k) {
            const double x = g.x_ext(k);
            b[k] = x * x * (1.0 + 0.2 * x * x);
            b2[k] = b[k] + 123.0;
        }
        for (double p : {1.0, 30.0, 500.0}) {
            const double a = product_formula(Potential1D::from_samples(g, b), p).log_lambda;
            const double c = product_formula(Potential1D::from_samples(g, b2), p).log_lambda;
            CHECK(a == doctest::Approx(c).epsilon(1e-12));
        }
    }

    TEST_CASE("failing assumption is flagged, not refused") {
        const AsymptoticValue v = product_formula(make("sine", 3.0 * pi, 2001), 10.0);
        CHECK(v.unreliable);
        CHECK(std::isfinite(v.log_lambda));
        CHECK_FALSE(product_formula(make("power", 1.0, 401), 10.0).unreliable);
    }

    TEST_CASE("minus log lambda over p tends to the well depth") {
        for (const Entry& e : {kCatalog[1], kCatalog[5], kCatalog[6]}) {
            const Potential1D pot = make(e.id, e.l, 4001, e.alpha);
            const double b0 = detect_wells(pot).b0;
            // slope between two large p removes the polynomial prefactor to O(log p / p)
            const double p1 = 200.0, p2 = 400.0;
            const double slope = (product_formula(pot, p1).log_lambda - product_formula(pot, p2).log_lambda) / (p2 - p1);
            CHECK(slope == doctest::Approx(b0).epsilon(0.02));
        }
    }

    TEST_CASE("Laplace integral with g = x is exact") {
        const auto g = [](double x) { return x; };
        for (double p : {1.0, 10.0, 1e3, 1e5})
            for (double L : {0.5, 2.0}) {
                const LogQuad q = laplace_integral(g, L, 1.0, p);
                const double exact = std::log(-std::expm1(-p * L) / p);
                CHECK(q.log_value == doctest::Approx(exact).epsilon(1e-12));
                CHECK(q.log_value - laplace_predict(1.0, p) == doctest::Approx(std::log1p(-std::exp(-p * L))).scale(1.0));
            }
    }

    TEST_CASE("Laplace integral with g = x^2 matches the erf form") {
        const auto g = [](double x) { return x * x; };
        for (double p : {1.0, 100.0, 1e4, 1e6}) {
            const LogQuad q = laplace_integral(g, 1.0, 2.0, p);
            CHECK(std::abs(std::expm1(q.log_value - oracle::log_gauss_integral(p, 1.0))) <= 1e-8);
        }
        const double r = std::exp(laplace_integral(g, 1.0, 2.0, 100.0).log_value - laplace_predict(2.0, 100.0));
        CHECK(std::abs(r - 1.0) <= 1e-6);
        CHECK(laplace_predict(2.0, 100.0) == doctest::Approx(std::log(std::sqrt(pi) / 2.0 / 10.0)).epsilon(1e-13));
    }

    TEST_CASE("Laplace integral with g = x^3 approaches the prediction monotonically") {
        const auto g = [](double x) { return x * x * x; };
        double prev = INFINITY;
        for (double p : {10.0, 100.0, 1e3, 1e4, 1e5}) {
            const double dev = std::abs(std::expm1(laplace_integral(g, 1.0, 3.0, p).log_value - laplace_predict(3.0, p)));
            CHECK(dev <= std::max(prev, 1e-14));
            prev = dev;
        }
        CHECK(prev < 1e-10);
        // Gamma(4/3)
        CHECK(laplace_predict(3.0, 1.0) == doctest::Approx(std::log(0.8929795115692492)).epsilon(1e-13));
    }

    TEST_CASE("sampled Laplace integral") {
        const std::size_t m = 4000;
        std::vector<double> gs(m + 1);
        for (std::size_t i = 0; i <= m; ++i) {
            const double x = static_cast<double>(i) / m;
            gs[i] = x * x;
        }
        const LogQuad q = laplace_integral(gs, 1.0, 2.0, 100.0);
        CHECK(std::abs(std::expm1(q.log_value - oracle::log_gauss_integral(100.0, 1.0))) <= 1e-8);
        CHECK_THROWS_AS(laplace_integral(gs, 1.0, 0.0, 100.0), InvalidArgument);
        CHECK_THROWS_AS(laplace_integral([](double x) { return x; }, 1.0, -1.0, 1.0), InvalidArgument);
    }

    TEST_CASE("discrete product formula and the solver") {
        const Potential1D pot = make("power", 1.0);
        double prev = INFINITY;
        for (double p : {20.0, 30.0, 40.0, 60.0}) {
            const double lam = principal_eig(assemble_pencil(pot, p)).lambda;
            const double dev = std::abs(std::expm1(std::log(lam) - discrete_product_formula(pot, p).log_lambda));
            CHECK(dev < prev);
            prev = dev;
        }
    }

    TEST_CASE("separable caveat") {
        const Potential1D a = make("power", 1.0, 2001);
        const SeparableCaveat one = separable_product_caveat({a}, 40.0);
        CHECK(one.log_sum == doctest::Approx(product_formula(a, 40.0).log_lambda).epsilon(1e-12));
        const SeparableCaveat two = separable_product_caveat({a, a}, 40.0);
        CHECK(two.log_sum == doctest::Approx(std::log(2.0) + one.log_sum).epsilon(1e-12));
        CHECK(two.log_naive == doctest::Approx(-std::log(16.0) + 2.0 * one.log_sum).epsilon(1e-12));
        CHECK(two.log_sum - two.log_naive > 10.0);
        const Potential1D wide = make("power", 1.5, 2001);
        const SeparableCaveat mixed = separable_product_caveat({a, wide}, 40.0);
        CHECK(mixed.log_sum == doctest::Approx(two.log_per_axis[0]).epsilon(1e-6));
    }
}
