#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "driftev/potential.hpp"

namespace driftev {

/// Natural log of a positive integral together with the log of an error bound.
struct LogQuad {
    double log_value = 0.0;
    double abs_error_log = -1e308;
    std::string warning;  ///< empty unless a precondition looked doubtful
};

struct AsymptoticValue {
    double log_lambda = 0.0;
    std::string form;  ///< "product-formula", "discrete-product" or a catalog id
    double p = 0.0;
    bool unreliable = false;  ///< Assumption (B1 < B2) failed for the potential
    std::string note;
};

/// log of the integral of exp(sign * p * (b - b_ref)) over [0, l], plus p * b_ref,
/// where b_ref is chosen internally. sign is +1 or -1.
///
/// Composite Simpson over the sampled grid accumulated with log-sum-exp.
/// Panels whose exponent varies by more than 0.02 and whose values lie within
/// 60 of the largest are bisected with b evaluated off-grid by Potential1D::b_at.
LogQuad log_half_integral(const Potential1D& pot, double p, int sign);

/// log lambda ~ -log int_0^l e^{-pb} - log int_0^l e^{pb}.
AsymptoticValue product_formula(const Potential1D& pot, double p);

/// The same product with the integrals replaced by the sums that the
/// weighted pencil itself induces: nodal masses for int e^{-pb} and edge
/// resistances h / w_{j+1/2} for int e^{pb}, both over [0, l]. The discrete
/// operator satisfies the asymptotic law with these sums, so the ratio to the
/// solver eigenvalue is free of the O(h^2) discretization error.
AsymptoticValue discrete_product_formula(const Potential1D& pot, double p);

/// log of int_0^L exp(-p g(x)) dx for a closed-form g with g(0) = 0, g > 0 on
/// (0, L] and g(x) ~ x^mu near 0. Adaptive Gauss-Kronrod on dyadic pieces of
/// the natural width p^{-1/mu}.
LogQuad laplace_integral(const std::function<double(double)>& g, double L, double mu, double p);

/// Same integral for samples g_0..g_m on the uniform grid of [0, L]
/// (composite Simpson in the log domain, 3/8 rule on a trailing odd panel).
LogQuad laplace_integral(std::span<const double> g_samples, double L, double mu, double p);

/// log(Gamma(1/mu + 1) p^{-1/mu})
double laplace_predict(double mu, double p);

/// Closed-form asymptotic law for a catalog potential on (-l, l).
///   power law, alpha >= 1:  ((1/a)^{1/a} l^{a-1} / Gamma(1/a+1)) p^{1/a+1} e^{-(l^a/a) p}
///   sine,  0 < l < pi:      (sqrt2 sin l / sqrt pi) p^{3/2} e^{-(1-cos l) p}
///          l = pi:          (2/pi) p e^{-2p}
///          pi < l < 2pi:    (1/pi) p e^{-2p}
///   quartic, l > sqrt2:     (b'(l) / sqrt pi) p^{3/2} e^{-b(l) p}
AsymptoticValue closed_form(const PotentialSpec& spec, double l, double p);

struct SeparableCaveat {
    std::vector<double> log_per_axis;
    double log_sum = 0.0;    ///< log of sum_i lambda_i (the separable eigenvalue)
    double log_naive = 0.0;  ///< log of 4^{-n} prod_i lambda_i (box product law)
};

SeparableCaveat separable_product_caveat(const std::vector<Potential1D>& pots, double p);

}  // namespace driftev
