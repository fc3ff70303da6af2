#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driftev/potential.hpp"
#include "driftev/wells.hpp"

namespace driftev {

struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool contains(double v, double slack = 0.0) const { return v >= lo - slack && v <= hi + slack; }
};

/// Details of a test-function upper bound  lambda <= C e^{-omega p}.
struct WellBoundDetail {
    double beta = 0.0, omega = 0.0, epsilon = 0.0;
    double log_C = 0.0;
    double log_upper_explicit = 0.0;  ///< log C - omega p
    double log_upper_quotient = 0.0;  ///< log of the weighted Rayleigh quotient of u-hat
    double measure_collar = 0.0;      ///< |N^eps|
    double measure_sublevel = 0.0;    ///< |{b <= min b + beta}| inside the region
    std::size_t wells = 1;
};

struct BoundReport {
    double p = 0.0;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    double log_upper = std::numeric_limits<double>::infinity();
    std::string lower_from, upper_from;
    bool certified = false;
    std::string caveat;
    std::optional<WellBoundDetail> well;
};

/// pi^2 / (4 l^2), summed over the axes of a box.
double lambda_omega(const Grid1D& g);
double lambda_omega(const Grid2D& g);

/// [lam2 + min(q1 - q2), lam2 + max(q1 - q2)] for lambda_1 of -d^2 + q1.
Interval comparison_bounds(std::span<const double> q1, std::span<const double> q2, double lam2);

/// Interval for lambda_1(p1) - lambda_1(p2), p1 > p2 >= 0, from the extremes of
/// q(., p1 + p2) scaled by (p1 - p2) / (p1 + p2).
Interval difference_bounds(const Potential1D& pot, double p1, double p2);

/// Envelope  lambda_Omega - (p/2) sup div a + (p^2/4) inf |a|^2  <=  lambda_1
///           <= lambda_Omega - (p/2) inf div a + (p^2/4) sup |a|^2,
/// intersected with lambda_Omega + [min q, max q]. Extremes are taken over
/// the interior nodes.
BoundReport p2_envelope(const Potential1D& pot, double p, std::optional<double> lam_omega = {});
BoundReport p2_envelope(const Field2D& field, double p, std::optional<double> lam_omega = {});

struct NoDecayCertificate {
    bool certified = false;
    double min_q = 0.0;
    std::size_t node = 0;  ///< interior index of the minimum of q
    double x = 0.0, y = 0.0;
    bool sampled_divergence = false;  ///< div a came from finite differences
    std::string statement;
};

/// Checks min q(., p0) >= 0 on the interior nodes.
NoDecayCertificate no_decay_certificate(const Potential1D& pot, double p0);
NoDecayCertificate no_decay_certificate(const Field2D& field, double p0);

/// Optional knobs of the test-function bound. Unset values take the defaults
/// omega = depth/2, beta = min(depth/4, (depth - omega)/2) and the largest
/// epsilon = k h for which the collar satisfies b >= min b + beta + omega.
struct WellBoundOptions {
    std::optional<double> epsilon;
    std::optional<double> beta;
    std::optional<double> omega;
};

/// Upper bound for lambda_1 from the test function u-hat = min(1, d/epsilon)
/// on the well region, d the Euclidean distance to the nearest node outside
/// the region. Returns the explicit C e^{-omega p} bound and the weighted
/// Rayleigh quotient of the same u-hat, both in log form.
BoundReport well_upper_bound(const Potential1D& pot, const Well& well, double p,
                             const WellBoundOptions& opt = {});
BoundReport well_upper_bound(const Field2D& field, const Well& well, double p,
                             const WellBoundOptions& opt = {});

/// Upper bound for lambda_m from m wells whose regions are pairwise disjoint
/// and not joined by any lattice edge.
BoundReport multiwell_upper_bound(const Potential1D& pot, const std::vector<Well>& wells, double p,
                                  const WellBoundOptions& opt = {});
BoundReport multiwell_upper_bound(const Field2D& field, const std::vector<Well>& wells, double p,
                                  const WellBoundOptions& opt = {});

}  // namespace driftev
