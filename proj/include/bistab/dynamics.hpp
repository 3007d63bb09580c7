// dynamics.hpp - time integration of the mean-field equations, settling onto
// attractors and quasi-static hysteresis sweeps.

#pragma once

#include "bistab/arc.hpp"
#include "bistab/model.hpp"
#include "bistab/observables.hpp"
#include "bistab/steady_state.hpp"

#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

namespace bistab {

/// Step size fell below the underflow limit.
struct StiffnessError : std::runtime_error {
    StiffnessError(const std::string& what, MeanFieldState last, double t)
        : std::runtime_error(what), last_good_state(last), time(t)
    {
    }
    MeanFieldState last_good_state;
    double time;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<MeanFieldState> states;
    long accepted_steps = 0;
    long rejected_steps = 0;
};

inline constexpr double kMinStep = 1e-14;

/// Dormand-Prince 5(4) pair with local extrapolation, PI step-size control
/// and the standard fourth-order dense output.
class DormandPrince {
public:
    DormandPrince(const SystemParams& p, const RealStateVector& y0, double t0, double rel_tol,
                  double abs_tol);

    /// Takes one accepted step (retrying rejected ones), never beyond t_stop.
    void step(double t_stop);

    /// Solution at t in [t_prev, t] from the last step's interpolant.
    RealStateVector dense(double t) const;

    double time() const { return t_; }
    double previous_time() const { return t_prev_; }
    const RealStateVector& state() const { return y_; }
    /// rhs at the current state (first-same-as-last stage).
    const RealStateVector& derivative() const { return f_; }
    long accepted() const { return accepted_; }
    long rejected() const { return rejected_; }

private:
    double initial_step() const;

    SystemParams params_;
    double rel_tol_, abs_tol_;
    double t_, t_prev_ = 0.0, h_;
    double err_prev_ = 1e-4;
    RealStateVector y_, f_;
    RealStateVector y_prev_;
    RealStateVector rcont_[5];
    long accepted_ = 0, rejected_ = 0;
};

/// Integrates to t_end. Without sample times every accepted step is stored;
/// otherwise the dense output is sampled at the requested times.
Trajectory integrate(const MeanFieldState& state0, const SystemParams& p, double t_end,
                     double rel_tol = 1e-10, double abs_tol = 1e-10,
                     const std::vector<double>& sample_times = {});

struct NonConvergence {
    MeanFieldState last_state;
    double time = 0.0;
    double rhs_norm = 0.0;
};

struct SettleOptions {
    double eps = 1e-9;  // on |rhs|_2
    double t_max = 1e5;
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    // Once |rhs| < polish_below, Newton is tried from the current state; its
    // result is accepted if it is a stable fixed point within polish_radius.
    double polish_below = 1e-4;
    double polish_radius = 1e-6;
    int polish_every = 64;  // accepted steps between attempts
};

using SettleResult = std::variant<SteadyState, NonConvergence>;

/// Integrates until |rhs| < eps, then polishes with Newton (keeping the
/// conserved population total) and classifies the fixed point.
///
/// Explicit steps near the stability limit of the fast field modes leave a
/// residual oscillation of roughly the local tolerance, so |rhs| can stall
/// above eps right next to an attractor. The trajectory is then also
/// considered settled when it lies within polish_radius of a stable fixed
/// point that Newton reaches from the current state.
SettleResult settle(const MeanFieldState& state0, const SystemParams& p, const SettleOptions& opts = {});

struct SweepRecord {
    double control = 0.0;  // phi [rad]
    double eta1 = 0.0, eta2 = 0.0;
    bool converged = false;
    SteadyState steady;    // settled (or last integrated) state
    ObservableRecord observables;
};

/// Quarter-circle control path; the sweep runs phi_start -> phi_end and back.
struct ArcPath {
    double radius = 1.0;
    double phi_start = 0.0;
    double phi_end = quarter_turn;
    AngleConvention convention = AngleConvention::from_vertical;
};

struct HysteresisResult {
    std::vector<SweepRecord> forward;
    std::vector<SweepRecord> backward;  // in sweep order (phi_end -> phi_start)
};

/// Quasi-static protocol: every step settles from the previous settled state.
/// The first point settles from `initial` (default: ground state g1 with the
/// fields at rest).
HysteresisResult hysteresis_sweep(const SystemParams& base, const ArcPath& path, int n_steps,
                                  const SettleOptions& opts = {},
                                  std::optional<MeanFieldState> initial = std::nullopt);

/// Integral over phi of |T1_forward - T1_backward| (trapezoid rule).
double hysteresis_loop_area(const HysteresisResult& r, Mode mode = Mode::one);

} // namespace bistab
