#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace driftev {

/// log(sum exp(v)) without overflow; -inf for an empty or all -inf input.
inline double log_sum_exp(std::span<const double> v) {
    double top = -std::numeric_limits<double>::infinity();
    for (double x : v) top = std::max(top, x);
    if (!std::isfinite(top)) return top;
    double s = 0.0;
    for (double x : v) s += std::exp(x - top);
    return top + std::log(s);
}

/// log(exp(a) + exp(b))
inline double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (!std::isfinite(b)) return a;
    return a + std::log1p(std::exp(b - a));
}

}  // namespace driftev
