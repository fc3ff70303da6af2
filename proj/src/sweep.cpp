#include "driftev/sweep.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <thread>

#include "driftev/asymptotics.hpp"
#include "driftev/bounds.hpp"
#include "driftev/eigensolve1d.hpp"
#include "driftev/error.hpp"
#include "driftev/wells.hpp"

namespace driftev {

double SweepRow::log_lambda() const {
    return lambda_solver ? std::log(*lambda_solver) : log_lambda_asym;
}

namespace {

SweepRow sweep_row(const Potential1D& pot, const WellReport& wells, double p, const SweepOptions& opt) {
    SweepRow row;
    row.p = p;
    row.log_lambda_asym = product_formula(pot, p).log_lambda;
    try {
        row.lambda_solver = principal_eig(assemble_pencil(pot, p), opt.rtol).lambda;
    } catch (const OverflowGuard&) {
        row.note = "solver out of range; asymptotic value used";
    }
    row.lower = p2_envelope(pot, p).lower;
    row.log_upper = std::numeric_limits<double>::infinity();
    if (wells.deepest) {
        try {
            WellBoundOptions wopt;
            wopt.omega = opt.omega;
            row.log_upper = well_upper_bound(pot, wells.wells[*wells.deepest], p, wopt).log_upper;
        } catch (const InvalidArgument& e) {
            row.note += (row.note.empty() ? "" : "; ") + std::string(e.what());
        }
    }
    row.rate_running = p > 0.0 ? -row.log_lambda() / p : std::numeric_limits<double>::quiet_NaN();
    return row;
}

}  // namespace

SweepResult run_sweep(const PotentialSpec& spec, double l, std::vector<double> p_list,
                      const SweepOptions& opt) {
    if (p_list.size() < 3) throw InvalidArgument("sweep needs at least 3 values of p");
    for (double p : p_list)
        if (!(p > 0.0) || !std::isfinite(p)) throw InvalidArgument("sweep: every p must be > 0");
    std::sort(p_list.begin(), p_list.end());
    p_list.erase(std::unique(p_list.begin(), p_list.end()), p_list.end());

    const Potential1D pot = build_potential_1d(spec, Grid1D(l, opt.n));
    const WellReport wells = detect_wells(pot);

    SweepResult res;
    res.b0_detected = wells.b0;
    res.rows.resize(p_list.size());
    std::vector<std::string> errors(p_list.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < p_list.size(); i = next++) {
            try {
                res.rows[i] = sweep_row(pot, wells, p_list[i], opt);
            } catch (const std::exception& e) {
                res.rows[i].p = p_list[i];
                errors[i] = e.what();
            }
        }
    };
    std::size_t threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, p_list.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }
    std::vector<SweepRow> ok;
    for (std::size_t i = 0; i < p_list.size(); ++i)
        if (errors[i].empty()) ok.push_back(res.rows[i]);
    if (ok.empty()) throw NumericalError("sweep failed for every p: " + errors.front());
    res.rows = std::move(ok);
    res.fit = fit_decay_exponent(res.rows);
    return res;
}

B0Fit fit_decay_exponent(const std::vector<SweepRow>& rows) {
    B0Fit fit;
    std::vector<const SweepRow*> use;
    for (const SweepRow& r : rows)
        if (r.p > 0.0 && r.rate_running > 0.0) use.push_back(&r);
    fit.rows_used = use.size();
    if (use.size() < 3) {
        fit.reason = "fewer than 3 decaying rows (lambda does not decay)";
        return fit;
    }
    const auto m = static_cast<Eigen::Index>(use.size());
    Eigen::MatrixXd X(m, 3);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double p = use[static_cast<std::size_t>(i)]->p;
        X(i, 0) = p;
        X(i, 1) = -std::log(p);
        X(i, 2) = 1.0;
        y(i) = -use[static_cast<std::size_t>(i)]->log_lambda();
    }
    const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
    fit.b0 = beta(0);
    fit.gamma = beta(1);
    fit.c = beta(2);
    const Eigen::Index dof = m - 3;
    if (dof > 0) {
        const Eigen::VectorXd resid = y - X * beta;
        const double s2 = resid.squaredNorm() / static_cast<double>(dof);
        const Eigen::MatrixXd cov = s2 * (X.transpose() * X).inverse();
        const boost::math::students_t dist(static_cast<double>(dof));
        fit.half_width = boost::math::quantile(dist, 0.975) * std::sqrt(std::max(cov(0, 0), 0.0));
    } else {
        fit.half_width = std::numeric_limits<double>::quiet_NaN();
    }
    if (!(fit.b0 > 0.0)) {
        fit.reason = "fitted exponent is not positive";
        return fit;
    }
    fit.applicable = true;
    return fit;
}

}  // namespace driftev
