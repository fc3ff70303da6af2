#include "driftev/eigensolve1d.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace driftev {

TridiagPencil::TridiagPencil(std::vector<double> conductance, std::vector<double> mass,
                             double scale_log)
    : cond_(std::move(conductance)), mass_(std::move(mass)), scale_log_(scale_log) {
    if (mass_.empty() || cond_.size() != mass_.size() + 1)
        throw InvalidArgument("TridiagPencil: need n masses and n+1 conductances");
    for (double m : mass_)
        if (!(m > 0.0) || !std::isfinite(m)) throw InvalidArgument("TridiagPencil: mass must be positive");
    for (double c : cond_)
        if (!(c > 0.0) || !std::isfinite(c))
            throw InvalidArgument("TridiagPencil: conductance must be positive");
}

std::vector<double> TridiagPencil::diag_A() const {
    std::vector<double> d(n());
    for (std::size_t i = 0; i < n(); ++i) d[i] = cond_[i] + cond_[i + 1];
    return d;
}

std::vector<double> TridiagPencil::offdiag_A() const {
    std::vector<double> o(n() - 1);
    for (std::size_t i = 0; i + 1 < n(); ++i) o[i] = -cond_[i + 1];
    return o;
}

TridiagPencil TridiagPencil::scaled(double factor) const {
    if (!(factor > 0.0)) throw InvalidArgument("TridiagPencil::scaled: factor must be positive");
    std::vector<double> c = cond_, m = mass_;
    for (double& v : c) v *= factor;
    for (double& v : m) v *= factor;
    return TridiagPencil(std::move(c), std::move(m), scale_log_ - std::log(factor));
}

std::vector<double> TridiagPencil::apply_A(const std::vector<double>& x) const {
    const std::size_t N = n();
    std::vector<double> y(N);
    for (std::size_t i = 0; i < N; ++i) {
        double v = (cond_[i] + cond_[i + 1]) * x[i];
        if (i > 0) v -= cond_[i] * x[i - 1];
        if (i + 1 < N) v -= cond_[i + 1] * x[i + 1];
        y[i] = v;
    }
    return y;
}

double TridiagPencil::norm_A_inf() const {
    double m = 0.0;
    for (std::size_t i = 0; i < n(); ++i) m = std::max(m, 2.0 * (cond_[i] + cond_[i + 1]));
    return m;
}

TridiagPencil assemble_pencil(const Potential1D& pot, double p) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("assemble_pencil: p must be >= 0");
    const Grid1D& g = pot.grid();
    const double bmin = pot.b_min();
    const double span = p * (pot.b_max() - bmin);
    if (span > kMaxExponentSpan) {
        std::ostringstream os;
        os << "p*(max b - min b) = " << span << " exceeds " << kMaxExponentSpan
           << ": weights would underflow; use the asymptotics module (`driftev asym`) in this regime";
        throw OverflowGuard(os.str(), span);
    }
    const auto b = pot.b();
    const double inv_h2 = 1.0 / (g.h * g.h);
    std::vector<double> mass(g.n), cond(g.n + 1);
    for (std::size_t i = 0; i < g.n; ++i) mass[i] = std::exp(-p * (b[i + 1] - bmin));
    for (std::size_t j = 0; j <= g.n; ++j) {
        double bmid;
        if (pot.has_closure())
            bmid = pot.b_at(0.5 * (g.x_ext(j) + g.x_ext(j + 1)));
        else
            bmid = 0.5 * (b[j] + b[j + 1]);  // geometric mean of the end weights
        cond[j] = std::exp(-p * (bmid - bmin)) * inv_h2;
    }
    return TridiagPencil(std::move(cond), std::move(mass), -p * bmin);
}

namespace {

// LDL^T of A - sigma M in excess form: d_i = c_{i+1} + e_i,
// e_i = c_i e_{i-1} / d_{i-1} - sigma m_i, e_0 = c_0 - sigma m_0.
// For sigma <= 0 every quantity is a positive sum or product.
struct ShiftedLDL {
    std::vector<double> d;
    std::size_t negatives = 0;
};

std::optional<ShiftedLDL> factor_shifted(const TridiagPencil& P, double sigma) {
    const auto& c = P.conductance();
    const auto& m = P.diag_M();
    const std::size_t N = P.n();
    ShiftedLDL f;
    f.d.resize(N);
    double e = c[0] - sigma * m[0];
    for (std::size_t i = 0;; ++i) {
        const double d = c[i + 1] + e;
        if (d == 0.0 || !std::isfinite(d)) return std::nullopt;
        f.d[i] = d;
        if (d < 0.0) ++f.negatives;
        if (i + 1 == N) break;
        e = c[i + 1] * (e / d) - sigma * m[i + 1];
    }
    return f;
}

ShiftedLDL factor_with_nudge(const TridiagPencil& P, double& sigma) {
    constexpr int kRetries = 8;
    for (int attempt = 0; attempt < kRetries; ++attempt) {
        if (auto f = factor_shifted(P, sigma)) return *f;
        const double step = std::max(std::abs(sigma), std::numeric_limits<double>::min()) * 4.0 *
                            std::numeric_limits<double>::epsilon() * (attempt + 1);
        sigma += step;
    }
    throw NumericalError("pivot breakdown in shifted LDL^T factorization persisted after nudging");
}

// Solve (A - sigma M) x = f with a factorization from factor_shifted.
std::vector<double> solve_shifted(const TridiagPencil& P, const ShiftedLDL& F,
                                  const std::vector<double>& f) {
    const auto& c = P.conductance();
    const std::size_t N = P.n();
    std::vector<double> y(N), x(N);
    y[0] = f[0];
    for (std::size_t i = 1; i < N; ++i) y[i] = f[i] + (c[i] / F.d[i - 1]) * y[i - 1];
    x[N - 1] = y[N - 1] / F.d[N - 1];
    for (std::size_t i = N - 1; i-- > 0;) x[i] = (y[i] + c[i + 1] * x[i + 1]) / F.d[i];
    return x;
}

double m_dot(const TridiagPencil& P, const std::vector<double>& x, const std::vector<double>& y) {
    const auto& m = P.diag_M();
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += m[i] * x[i] * y[i];
    return s;
}

double residual_of(const TridiagPencil& P, const std::vector<double>& u, double lambda) {
    const std::vector<double> Au = P.apply_A(u);
    const auto& m = P.diag_M();
    double r = 0.0, un = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        r = std::max(r, std::abs(Au[i] - lambda * m[i] * u[i]));
        un = std::max(un, std::abs(u[i]));
    }
    return r / (P.norm_A_inf() * un);
}

void normalize_max(std::vector<double>& u) {
    double big = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (std::abs(u[i]) > big) {
            big = std::abs(u[i]);
            arg = i;
        }
    const double s = (u[arg] < 0.0 ? -1.0 : 1.0) / big;
    for (double& v : u) v *= s;
}

}  // namespace

std::size_t count_below(const TridiagPencil& pencil, double sigma) {
    return factor_with_nudge(pencil, sigma).negatives;
}

EigenPair principal_eig(const TridiagPencil& P, double rtol, std::size_t max_iter) {
    if (!(rtol > 0.0)) throw InvalidArgument("principal_eig: rtol must be positive");
    const std::size_t N = P.n();
    const ShiftedLDL F = *factor_shifted(P, 0.0);
    const auto& m = P.diag_M();

    std::vector<double> u(N, 1.0), f(N);
    double lambda = 0.0, prev = std::numeric_limits<double>::quiet_NaN();
    double prev_delta = std::numeric_limits<double>::quiet_NaN(), gap = 0.0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        for (std::size_t i = 0; i < N; ++i) f[i] = m[i] * u[i];
        std::vector<double> x = solve_shifted(P, F, f);
        // x grows like 1/lambda, so normalize before forming the quotient
        const double big = *std::max_element(x.begin(), x.end());
        for (std::size_t i = 0; i < N; ++i) u[i] = x[i] / big;
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            num += u[i] * f[i];
            den += m[i] * u[i] * u[i];
        }
        lambda = num / (den * big);

        const double delta = std::abs(lambda - prev);
        if (std::isfinite(prev_delta) && prev_delta > 0.0) gap = delta / prev_delta;
        if (delta <= rtol * lambda) {
            EigenPair pair;
            pair.lambda = lambda;
            pair.u = std::move(u);
            pair.residual = residual_of(P, pair.u, lambda);
            pair.index = 1;
            pair.iterations = it;
            return pair;
        }
        prev_delta = delta;
        prev = lambda;
    }
    std::ostringstream os;
    os << "inverse iteration did not converge in " << max_iter << " iterations (last quotient "
       << lambda << ", contraction estimate " << gap << ")";
    throw ConvergenceError(os.str(), lambda, gap);
}

std::vector<EigenPair> eigs_bisection(const TridiagPencil& P, std::size_t m, double rtol) {
    const std::size_t N = P.n();
    if (m == 0 || m > N) throw InvalidArgument("eigs_bisection: need 1 <= m <= n");
    if (!(rtol > 0.0)) throw InvalidArgument("eigs_bisection: rtol must be positive");

    // Gershgorin bound of M^{-1} A
    const auto& c = P.conductance();
    const auto& mass = P.diag_M();
    double upper = 0.0;
    for (std::size_t i = 0; i < N; ++i) upper = std::max(upper, 2.0 * (c[i] + c[i + 1]) / mass[i]);

    std::vector<double> values(m);
    for (std::size_t k = 1; k <= m; ++k) {
        double hi = upper;
        double lo = upper;
        while (lo > 0.0 && count_below(P, lo) >= k) {
            hi = lo;
            lo *= 1e-4;
            if (lo < 1e-300) lo = 0.0;
        }
        while (hi - lo > rtol * hi) {
            const double mid = (lo > 0.0 && hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (count_below(P, mid) >= k)
                hi = mid;
            else
                lo = mid;
        }
        values[k - 1] = 0.5 * (lo + hi);
    }

    std::vector<EigenPair> pairs;
    pairs.reserve(m);
    for (std::size_t k = 1; k <= m; ++k) {
        double sigma = values[k - 1];
        const ShiftedLDL F = factor_with_nudge(P, sigma);

        // deterministic start with components along every mode
        std::vector<double> u(N);
        std::uint64_t state = 0x9E3779B97F4A7C15ull * k;
        for (double& v : u) {
            state = state * 6364136223846793005ull + 1442695040888963407ull;
            v = 0.5 + static_cast<double>(state >> 11) * 0x1.0p-53;
        }
        std::vector<double> f(N);
        std::size_t it = 0;
        for (; it < 6; ++it) {
            for (const EigenPair& prev : pairs) {
                const double proj = m_dot(P, u, prev.u) / m_dot(P, prev.u, prev.u);
                for (std::size_t i = 0; i < N; ++i) u[i] -= proj * prev.u[i];
            }
            for (std::size_t i = 0; i < N; ++i) f[i] = mass[i] * u[i];
            u = solve_shifted(P, F, f);
            normalize_max(u);
        }
        for (const EigenPair& prev : pairs) {
            const double proj = m_dot(P, u, prev.u) / m_dot(P, prev.u, prev.u);
            for (std::size_t i = 0; i < N; ++i) u[i] -= proj * prev.u[i];
        }
        normalize_max(u);

        EigenPair pair;
        pair.lambda = values[k - 1];
        pair.u = std::move(u);
        pair.residual = residual_of(P, pair.u, pair.lambda);
        pair.index = k;
        pair.iterations = it;
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

double rayleigh_quotient(const TridiagPencil& P, const std::vector<double>& u) {
    const auto& c = P.conductance();
    const auto& m = P.diag_M();
    const std::size_t N = P.n();
    double num = c[0] * u[0] * u[0] + c[N] * u[N - 1] * u[N - 1];
    for (std::size_t j = 1; j < N; ++j) {
        const double du = u[j] - u[j - 1];
        num += c[j] * du * du;
    }
    double den = 0.0;
    for (std::size_t i = 0; i < N; ++i) den += m[i] * u[i] * u[i];
    return num / den;
}

std::vector<double> adjoint_eigenfunction(const EigenPair& pair, const Potential1D& pot, double p) {
    const auto b = pot.b();
    const std::size_t N = pair.u.size();
    if (N != pot.grid().n) throw InvalidArgument("adjoint_eigenfunction: size mismatch");
    std::vector<double> logv(N);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < N; ++i) {
        logv[i] = pair.u[i] > 0.0 ? -p * b[i + 1] + std::log(pair.u[i])
                                  : -std::numeric_limits<double>::infinity();
        top = std::max(top, logv[i]);
    }
    std::vector<double> v(N);
    for (std::size_t i = 0; i < N; ++i) v[i] = std::exp(logv[i] - top);
    return v;
}

namespace {

double lq_lambda(const Potential1D& pot, double p, double& qmax) {
    const Grid1D& g = pot.grid();
    const std::vector<double> q = liouville_q(pot, p);
    const double inv_h2 = 1.0 / (g.h * g.h);
    Eigen::VectorXd diag(g.n), sub(g.n - 1);
    qmax = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        diag[static_cast<Eigen::Index>(i)] = 2.0 * inv_h2 + q[i];
        qmax = std::max(qmax, std::abs(q[i]));
    }
    sub.setConstant(-inv_h2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("selfadjoint_check: tridiagonal QL failed");
    return es.eigenvalues()[0];
}

}  // namespace

SelfAdjointCheck selfadjoint_check(const Potential1D& pot, double p, double rtol) {
    SelfAdjointCheck out;
    const Grid1D& g = pot.grid();
    double qmax = 0.0;
    const double pencil_h = principal_eig(assemble_pencil(pot, p), 1e-13).lambda;
    const double lq_h = lq_lambda(pot, p, qmax);
    out.raw_discrepancy = std::abs(lq_h - pencil_h) / pencil_h;
    out.lambda_pencil = pencil_h;
    out.lambda_lq = lq_h;

    if (pot.spec()) {
        const Potential1D fine = build_potential_1d(*pot.spec(), Grid1D(g.l, 2 * g.n + 1));
        double qfine = 0.0;
        const double pencil_h2 = principal_eig(assemble_pencil(fine, p), 1e-13).lambda;
        const double lq_h2 = lq_lambda(fine, p, qfine);
        out.lambda_pencil = (4.0 * pencil_h2 - pencil_h) / 3.0;
        out.lambda_lq = (4.0 * lq_h2 - lq_h) / 3.0;
        out.extrapolated = true;
        qmax = std::max(qmax, qfine);
    }

    const double n_eff = static_cast<double>(out.extrapolated ? 2 * g.n + 1 : g.n);
    out.floor = qmax * n_eff * std::numeric_limits<double>::epsilon() / out.lambda_pencil;
    out.rel_discrepancy = std::abs(out.lambda_lq - out.lambda_pencil) / out.lambda_pencil;
    std::ostringstream os;
    if (out.floor > rtol) {
        out.skipped = true;
        os << "skipped: rounding floor |q|_inf n eps / lambda = " << out.floor
           << " exceeds rtol " << rtol << "; the weighted pencil value is authoritative";
    } else {
        os << "relative discrepancy " << out.rel_discrepancy << " (unextrapolated "
           << out.raw_discrepancy << ", floor " << out.floor << ")";
    }
    out.diagnostic = os.str();
    return out;
}

}  // namespace driftev
