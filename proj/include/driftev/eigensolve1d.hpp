#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "driftev/potential.hpp"

namespace driftev {

/// Symmetric tridiagonal stiffness A and positive diagonal mass M of the
/// weighted divergence form  -(w u')' = lambda w u,  w = exp(-p (b - min b)).
///
/// The pencil is stored through its n+1 edge conductances c_j (edge j joins
/// node j-1 and node j; edges 0 and n close the Dirichlet ends), so that
/// A_ii = c_i + c_{i+1} and A_{i,i+1} = -c_{i+1}. Factorizations work on the
/// conductances directly and never subtract two large numbers.
class TridiagPencil {
public:
    TridiagPencil(std::vector<double> conductance, std::vector<double> mass, double scale_log);

    std::size_t n() const { return mass_.size(); }
    const std::vector<double>& conductance() const { return cond_; }
    const std::vector<double>& diag_M() const { return mass_; }
    std::vector<double> diag_A() const;
    std::vector<double> offdiag_A() const;
    /// Natural log of the common factor divided out of both A and M.
    double scale_log() const { return scale_log_; }

    /// Same pencil with A and M multiplied by factor > 0.
    TridiagPencil scaled(double factor) const;

    /// y = A x
    std::vector<double> apply_A(const std::vector<double>& x) const;
    double norm_A_inf() const;

private:
    std::vector<double> cond_;
    std::vector<double> mass_;
    double scale_log_;
};

/// Pencil for potential samples at penalty p. Refuses with OverflowGuard when
/// p (max b - min b) > 600.
TridiagPencil assemble_pencil(const Potential1D& pot, double p);

constexpr double kMaxExponentSpan = 600.0;

struct EigenPair {
    double lambda = 0.0;
    std::vector<double> u;  ///< nodal eigenfunction, max |u| = 1
    double residual = 0.0;  ///< |A u - lambda M u|_inf / (|A|_inf |u|_inf)
    std::size_t index = 1;
    std::size_t iterations = 0;
};

/// Number of generalized eigenvalues of (A, M) strictly below sigma, from the
/// inertia of A - sigma M. Throws NumericalError after repeated zero pivots.
std::size_t count_below(const TridiagPencil& pencil, double sigma);

/// Principal pair by inverse iteration from the all-ones vector. The
/// quotient is x^T M u / x^T M x with A x = M u, which is the Rayleigh
/// quotient of x written as a ratio of positive sums.
EigenPair principal_eig(const TridiagPencil& pencil, double rtol = 1e-10,
                        std::size_t max_iter = 10000);

/// Lowest m eigenpairs by Sturm-count bisection plus shifted inverse
/// iteration. Eigenvalues inside a numerical cluster are returned in
/// ascending order with M-orthonormalized vectors of no canonical order.
std::vector<EigenPair> eigs_bisection(const TridiagPencil& pencil, std::size_t m,
                                      double rtol = 1e-10);

/// Rayleigh quotient sum c_j (u_j - u_{j-1})^2 / sum m_i u_i^2 (difference form).
double rayleigh_quotient(const TridiagPencil& pencil, const std::vector<double>& u);

/// v1 = exp(-p b) u1 rescaled to max 1.
std::vector<double> adjoint_eigenfunction(const EigenPair& pair, const Potential1D& pot, double p);

struct SelfAdjointCheck {
    double lambda_pencil = 0.0;
    double lambda_lq = 0.0;
    double rel_discrepancy = 0.0;
    /// Discrepancy of the unextrapolated values on the input grid.
    double raw_discrepancy = 0.0;
    bool extrapolated = false;
    double floor = 0.0;  ///< |q|_inf n eps / lambda
    bool skipped = false;
    std::string diagnostic;
};

/// Cross-checks the pencil route against -w'' + q w = lambda w solved as a
/// plain symmetric tridiagonal eigenproblem.
///
/// The two discretizations agree only to O(h^2). For catalog potentials both
/// routes are also solved on the grid with spacing h/2 and Richardson
/// extrapolated, so the reported discrepancy measures the formulations rather
/// than their differing truncation constants.
SelfAdjointCheck selfadjoint_check(const Potential1D& pot, double p, double rtol = 1e-6);

}  // namespace driftev
