#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "driftev/potential.hpp"

namespace driftev {

struct SweepRow {
    double p = 0.0;
    std::optional<double> lambda_solver;  ///< absent beyond the pencil range
    double log_lambda_asym = 0.0;         ///< product formula
    double log_upper = 0.0;               ///< best test-function bound, +inf without a well
    double lower = 0.0;                   ///< envelope lower bound
    double rate_running = 0.0;            ///< (1/p) log(1/lambda)
    std::string note;

    /// log lambda from the solver when available, else the asymptotic value.
    double log_lambda() const;
};

/// Fit of  log(1/lambda) = b0 p - gamma log p + c  over the decaying rows.
struct B0Fit {
    bool applicable = false;
    double b0 = 0.0;
    double half_width = 0.0;  ///< 95% confidence half-width, NaN for an exact fit
    double gamma = 0.0;
    double c = 0.0;
    std::size_t rows_used = 0;
    std::string reason;
};

struct SweepResult {
    std::vector<SweepRow> rows;  ///< sorted by p
    B0Fit fit;
    double b0_detected = 0.0;
};

struct SweepOptions {
    std::size_t n = 4001;
    double rtol = 1e-10;
    std::size_t threads = 0;  ///< 0 picks the hardware concurrency
    std::optional<double> omega;
};

/// Solver, asymptotics and bounds for every p, run concurrently, merged by p.
SweepResult run_sweep(const PotentialSpec& spec, double l, std::vector<double> p_list,
                      const SweepOptions& opt = {});

/// Rows with rate_running > 0 count as decaying; fewer than 3 makes the fit
/// not applicable.
B0Fit fit_decay_exponent(const std::vector<SweepRow>& rows);

}  // namespace driftev
