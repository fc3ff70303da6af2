#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "driftev/grid.hpp"
#include "driftev/potential.hpp"
#include "driftev/wells.hpp"

namespace driftev {

/// Solution of u_t - Lap u + p a . grad u = 0 at the interior nodes (x-fastest,
/// boundary values 0). The true solution is exp(log_scale) * u.
struct State2D {
    Grid2D grid;
    std::vector<double> u;
    double t = 0.0;
    double tau = 5e-4;
    double log_scale = 0.0;

    static State2D filled(const Grid2D& grid, double tau, double value = 1.0);
    static State2D from_function(const Grid2D& grid, double tau,
                                 const std::function<double(double, double)>& u0);

    double max_value() const;
    /// log of the discrete L2 norm sqrt(sum u^2 hx hy) of the true solution.
    double log_l2() const;
    /// log of the max norm of the true solution.
    double log_max() const;
};

/// One semi-Lagrangian step operator for a fixed field, p and tau.
///
/// Each interior node takes the previous solution at its departure point
/// x - p a(x) tau by bilinear interpolation (0 outside the box), then
/// (I - tau Lap_h) u = u~ is solved by Jacobi-preconditioned conjugate
/// gradients to relative residual cg_tol.
class SemiLagrangian {
public:
    SemiLagrangian(const Field2D& field, double p, double tau, double cg_tol = 1e-10,
                   std::size_t cg_max_iter = 5000);

    /// Advances state by one step; throws NumericalError when CG stalls.
    void step(State2D& state) const;
    std::size_t last_cg_iterations() const { return last_iters_; }

private:
    struct Stencil {
        std::array<std::int32_t, 4> idx;  ///< interior indices, -1 for boundary or outside
        std::array<double, 4> w;
    };
    void advect(const std::vector<double>& u, std::vector<double>& out) const;
    void apply(const std::vector<double>& x, std::vector<double>& y) const;
    void solve(const std::vector<double>& rhs, std::vector<double>& x) const;

    Grid2D grid_;
    double tau_;
    double cg_tol_;
    std::size_t cg_max_iter_;
    double cx_, cy_, diag_;
    std::vector<Stencil> stencil_;
    mutable std::size_t last_iters_ = 0;
};

/// Convenience single step.
State2D step(const State2D& state, const Field2D& field, double p);

struct DecaySample {
    double t = 0.0;
    double log_l2 = 0.0;
    double log_max = 0.0;
};

struct DecayFit {
    std::vector<DecaySample> samples;
    double rate_l2 = 0.0;
    double rate_max = 0.0;
    double window_start = 0.0, window_end = 0.0;
    bool plateau_flag = false;
    double plateau_drift = 0.0;  ///< |rate(first half) - rate(second half)| / |rate|
    double lambda_est() const { return rate_l2; }
};

struct DecayOptions {
    double t_end = 1.0;
    double tau = 5e-4;
    double window_fraction = 0.4;  ///< fit over the last fraction of [0, t_end]
    std::optional<double> window_start;
    double plateau_tol = 1e-2;
    std::size_t renorm_every = 1;  ///< 0 disables renormalization
    double cg_tol = 1e-10;
    std::size_t cg_max_iter = 5000;
    std::function<void(const State2D&)> observer;  ///< called after every step
};

struct DecayRun {
    DecayFit fit;
    State2D state;
};

/// Time-integrates from u0 (a positive function, default 1) and fits the
/// decay rate of the L2 and max norms over the tail window.
DecayRun estimate_decay(const Field2D& field, double p, const DecayOptions& opt = {},
                        const std::function<double(double, double)>& u0 = {});

/// Least-squares fit over samples with t in [t0, t1].
DecayFit fit_decay(std::vector<DecaySample> samples, double t0, double t1, double plateau_tol);

struct RichardsonDecay {
    double coarse = 0.0;        ///< rate at (h, tau)
    double fine = 0.0;          ///< rate at (h/2, tau/2)
    double extrapolated = 0.0;  ///< 2 fine - coarse
    double error_estimate = 0.0;
    DecayRun coarse_run, fine_run;
};

/// Decay rates at (h, tau) and (h/2, tau/2), with first-order extrapolation.
RichardsonDecay decay_richardson(const FieldSpec& spec, const Grid2D& grid, double p,
                                 const DecayOptions& opt = {});

/// Normalized nodal profile on the full lattice (boundary ring 0, max 1).
struct Profile {
    Grid2D grid;
    std::vector<double> values;
    /// Bilinear interpolation, 0 outside the box.
    double at(double x, double y) const;
};

struct Section {
    std::vector<double> s, x, y, u;  ///< arclength from the first point, position, value
};

/// u / max u; throws InvalidArgument for a state without positive values.
Profile extract_profile(const State2D& state);

/// m equispaced samples on the segment (x0, y0)-(x1, y1).
Section sample_segment(const Profile& prof, double x0, double y0, double x1, double y1,
                       std::size_t m = 201);
/// m samples of the line a x + b y + c = 0 clipped to the box.
Section sample_line(const Profile& prof, double a, double b, double c, std::size_t m = 201);

/// v = exp(-p b) u renormalized to max 1, evaluated in the log domain.
Profile adjoint_profile(const State2D& state, const Field2D& field, double p);

/// Largest profile value over the nodes of a full-lattice mask.
double mask_peak(const Profile& prof, const std::vector<std::uint8_t>& mask);
/// Fraction of sum(values) carried by the nodes of mask.
double mask_mass_fraction(const Profile& prof, const std::vector<std::uint8_t>& mask);

}  // namespace driftev
