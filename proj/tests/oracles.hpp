#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

/// Eigenvalues of the standard three-point Dirichlet Laplacian with n interior
/// nodes on (-l, l): (4/h^2) sin^2(k pi / (2 (n + 1))).
inline double discrete_dirichlet(double l, std::size_t n, int k) {
    const double h = 2.0 * l / static_cast<double>(n + 1);
    const double s = std::sin(k * std::numbers::pi / (2.0 * static_cast<double>(n + 1)));
    return 4.0 / (h * h) * s * s;
}

/// Principal eigenvalue of -(w u')' = lambda w u, w = exp(-p b), from the
/// explicit Green's matrix of the weighted three-point operator.
///
/// With edge resistances r_j = h^2 / w(x_{j-1/2}) and cumulative sums R, the
/// inverse of the stiffness matrix is G_ij = R_{min(i,j)} (R_tot - R_{max(i,j)}) / R_tot,
/// a matrix of positive products. 1/lambda_1 is the top eigenvalue of
/// M^{1/2} G M^{1/2}, which a dense symmetric solver returns to full relative
/// accuracy regardless of how small lambda_1 is.
inline double green_lambda1(const std::function<double(double)>& b, double l, std::size_t n, double p) {
    const double h = 2.0 * l / static_cast<double>(n + 1);
    double bmin = b(0.0);
    for (std::size_t k = 0; k <= 2 * (n + 1); ++k) bmin = std::min(bmin, b(-l + 0.5 * h * static_cast<double>(k)));
    std::vector<double> R(n + 2, 0.0);  // R[i] = sum of resistances of edges 0..i-1
    for (std::size_t j = 0; j <= n; ++j) {
        const double xm = -l + (static_cast<double>(j) + 0.5) * h;
        R[j + 1] = R[j] + h * h * std::exp(p * (b(xm) - bmin));
    }
    const double Rt = R[n + 1];
    Eigen::VectorXd sm(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        sm[static_cast<Eigen::Index>(i)] = std::exp(-0.5 * p * (b(-l + static_cast<double>(i + 1) * h) - bmin));
    Eigen::MatrixXd K(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const auto I = static_cast<Eigen::Index>(i), J = static_cast<Eigen::Index>(j);
            // node i sits between edges i and i+1, so R up to node i is R[i+1]
            const double g = R[j + 1] * (Rt - R[i + 1]) / Rt;
            K(I, J) = K(J, I) = sm[I] * g * sm[J];
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Eigen::EigenvaluesOnly);
    return 1.0 / es.eigenvalues()[static_cast<Eigen::Index>(n) - 1];
}

/// Lowest eigenvalues of -d^2 + q on n interior nodes of spacing h, dense.
inline Eigen::VectorXd lq_eigenvalues(const std::vector<double>& q, double h) {
    const auto n = static_cast<Eigen::Index>(q.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, i) = 2.0 / (h * h) + q[static_cast<std::size_t>(i)];
        if (i + 1 < n) A(i, i + 1) = A(i + 1, i) = -1.0 / (h * h);
    }
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A, Eigen::EigenvaluesOnly).eigenvalues();
}

/// log of int_0^L exp(-p x^2) dx = sqrt(pi) erf(sqrt(p) L) / (2 sqrt(p)).
inline double log_gauss_integral(double p, double L) {
    return std::log(std::sqrt(std::numbers::pi) * std::erf(std::sqrt(p) * L) / (2.0 * std::sqrt(p)));
}

/// sqrt(2/pi) l p^{3/2} exp(-l^2 p / 2), in log form.
inline double log_linear_drift_law(double l, double p) {
    return 0.5 * std::log(2.0 / std::numbers::pi) + std::log(l) + 1.5 * std::log(p) - 0.5 * l * l * p;
}

}  // namespace oracle
