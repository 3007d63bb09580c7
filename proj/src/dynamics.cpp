#include "bistab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bistab {

namespace {

// Dormand-Prince coefficients
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                 a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double safety = 0.9;
constexpr double fac_min = 0.2, fac_max = 10.0;
constexpr double beta = 0.04;  // PI controller
constexpr double expo = 0.2 - beta * 0.75;

} // namespace

DormandPrince::DormandPrince(const SystemParams& p, const RealStateVector& y0, double t0, double rel_tol,
                             double abs_tol)
    : params_(p), rel_tol_(rel_tol), abs_tol_(abs_tol), t_(t0), y_(y0)
{
    if (!(rel_tol > 1e-14 && rel_tol < 1e-2) || !(abs_tol > 1e-14 && abs_tol < 1e-2))
        throw std::invalid_argument("integration tolerances must lie in (1e-14, 1e-2)");
    f_ = rhs(y_, params_);
    y_prev_ = y_;
    t_prev_ = t_;
    h_ = initial_step();
    for (auto& r : rcont_)
        r.setZero();
    rcont_[0] = y_;
}

double DormandPrince::initial_step() const
{
    const RealStateVector sc = abs_tol_ + rel_tol_ * y_.cwiseAbs().array();
    const double dnf = (f_.cwiseQuotient(sc)).squaredNorm() / kStateDim;
    const double dny = (y_.cwiseQuotient(sc)).squaredNorm() / kStateDim;
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    const RealStateVector y1 = y_ + h * f_;
    const RealStateVector f1 = rhs(y1, params_);
    const double der2 = ((f1 - f_).cwiseQuotient(sc)).norm() / std::sqrt(double(kStateDim)) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::min(100.0 * h, h1);
}

void DormandPrince::step(double t_stop)
{
    const SystemParams& p = params_;
    for (;;) {
        double h = std::min(h_, t_stop - t_);
        if (h < kMinStep) {
            if (t_stop - t_ < kMinStep && t_stop > t_) {
                // land exactly on t_stop
                h = t_stop - t_;
            } else {
                std::ostringstream msg;
                msg << "step size underflow (h = " << h << ") at t = " << t_;
                throw StiffnessError(msg.str(), MeanFieldState::from_real(y_), t_);
            }
        }

        const RealStateVector& k1 = f_;
        const RealStateVector k2 = rhs(RealStateVector(y_ + h * a21 * k1), p);
        const RealStateVector k3 = rhs(RealStateVector(y_ + h * (a31 * k1 + a32 * k2)), p);
        const RealStateVector k4 = rhs(RealStateVector(y_ + h * (a41 * k1 + a42 * k2 + a43 * k3)), p);
        const RealStateVector k5 =
            rhs(RealStateVector(y_ + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)), p);
        const RealStateVector k6 =
            rhs(RealStateVector(y_ + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)), p);
        const RealStateVector y1 = y_ + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const RealStateVector k7 = rhs(y1, p);

        const RealStateVector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const RealStateVector sc = abs_tol_ + rel_tol_ * y_.cwiseAbs().cwiseMax(y1.cwiseAbs()).array();
        const double e = std::sqrt(err.cwiseQuotient(sc).squaredNorm() / kStateDim);

        if (!std::isfinite(e)) {
            ++rejected_;
            h_ = h * fac_min;
            continue;
        }

        const double fac11 = std::pow(e, expo);
        double fac = fac11 / std::pow(err_prev_, beta) / safety;
        fac = std::clamp(fac, 1.0 / fac_max, 1.0 / fac_min);
        if (e <= 1.0) {
            err_prev_ = std::max(e, 1e-4);
            rcont_[0] = y_;
            const RealStateVector ydiff = y1 - y_;
            const RealStateVector bspl = h * k1 - ydiff;
            rcont_[1] = ydiff;
            rcont_[2] = bspl;
            rcont_[3] = ydiff - h * k7 - bspl;
            rcont_[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

            y_prev_ = y_;
            t_prev_ = t_;
            y_ = y1;
            f_ = k7;
            t_ = (h == t_stop - t_prev_) ? t_stop : t_prev_ + h;
            ++accepted_;
            h_ = h / fac;
            return;
        }
        ++rejected_;
        h_ = h / std::min(1.0 / fac_min, fac11 / safety);
    }
}

RealStateVector DormandPrince::dense(double t) const
{
    const double h = t_ - t_prev_;
    if (h <= 0.0)
        return y_;
    const double s = (t - t_prev_) / h;
    const double s1 = 1.0 - s;
    return rcont_[0] + s * (rcont_[1] + s1 * (rcont_[2] + s * (rcont_[3] + s1 * rcont_[4])));
}

Trajectory integrate(const MeanFieldState& state0, const SystemParams& p, double t_end, double rel_tol,
                     double abs_tol, const std::vector<double>& sample_times)
{
    require_valid(p, true);
    if (!(t_end > 0.0))
        throw std::invalid_argument("t_end must be positive");
    if (!std::is_sorted(sample_times.begin(), sample_times.end()))
        throw std::invalid_argument("sample times must be increasing");

    DormandPrince solver(p, state0.to_real(), 0.0, rel_tol, abs_tol);
    Trajectory tr;
    tr.times.push_back(0.0);
    tr.states.push_back(state0);

    std::size_t next = 0;
    while (next < sample_times.size() && sample_times[next] <= 0.0)
        ++next;

    while (solver.time() < t_end) {
        solver.step(t_end);
        if (sample_times.empty()) {
            tr.times.push_back(solver.time());
            tr.states.push_back(MeanFieldState::from_real(solver.state()));
            continue;
        }
        while (next < sample_times.size() && sample_times[next] <= solver.time() && sample_times[next] <= t_end) {
            const double ts = sample_times[next++];
            const RealStateVector y = ts == solver.time() ? solver.state() : solver.dense(ts);
            tr.times.push_back(ts);
            tr.states.push_back(MeanFieldState::from_real(y));
        }
    }
    tr.accepted_steps = solver.accepted();
    tr.rejected_steps = solver.rejected();
    return tr;
}

SettleResult settle(const MeanFieldState& state0, const SystemParams& p, const SettleOptions& opts)
{
    require_valid(p, true);
    if (!(opts.eps >= 1e-12))
        throw std::invalid_argument("settle eps must be >= 1e-12");

    const double total = state0.population_sum();
    auto try_attractor = [&](const RealStateVector& y) -> std::optional<SteadyState> {
        const MeanFieldState here = MeanFieldState::from_real(y);
        const NewtonResult polished = refine_fixed_point(here, p, {}, total);
        if (!polished.converged || state_distance(polished.state, here) > opts.polish_radius)
            return std::nullopt;
        SteadyState ss = make_steady_state(polished.state, p);
        if (!ss.stable)
            return std::nullopt;
        return ss;
    };

    DormandPrince solver(p, state0.to_real(), 0.0, opts.rel_tol, opts.abs_tol);
    double fnorm = solver.derivative().norm();
    long last_attempt = -opts.polish_every;
    try {
        while (fnorm >= opts.eps && solver.time() < opts.t_max) {
            solver.step(opts.t_max);
            fnorm = solver.derivative().norm();
            if (fnorm < opts.polish_below && solver.accepted() - last_attempt >= opts.polish_every) {
                last_attempt = solver.accepted();
                if (auto ss = try_attractor(solver.state()))
                    return *ss;
            }
        }
    } catch (const StiffnessError& e) {
        return NonConvergence{e.last_good_state, e.time, rhs(e.last_good_state, p).to_real().norm()};
    }

    const MeanFieldState reached = MeanFieldState::from_real(solver.state());
    if (fnorm >= opts.eps)
        return NonConvergence{reached, solver.time(), fnorm};

    // The population total is conserved along the flow, so polish on the
    // same hyperplane the trajectory lives on.
    const NewtonResult polished = refine_fixed_point(reached, p, {}, total);
    if (polished.converged && polished.residual_norm <= fnorm)
        return make_steady_state(polished.state, p);
    return make_steady_state(reached, p);
}

namespace {

SweepRecord settle_record(const SystemParams& base, double phi, const ArcPath& path,
                          const MeanFieldState& seed, const SettleOptions& opts, MeanFieldState& next_seed)
{
    SweepRecord rec;
    rec.control = phi;
    const auto drives = arc_drives(path.radius, phi, path.convention);
    rec.eta1 = drives.first;
    rec.eta2 = drives.second;
    const SystemParams p = with_drives(base, drives);

    const SettleResult r = settle(seed, p, opts);
    if (const auto* ss = std::get_if<SteadyState>(&r)) {
        rec.converged = true;
        rec.steady = *ss;
    } else {
        const auto& nc = std::get<NonConvergence>(r);
        rec.converged = false;
        rec.steady.state = nc.last_state;
        rec.steady.residual_norm = nc.rhs_norm;
        rec.steady.x1 = nc.last_state.inversion(Mode::one);
        rec.steady.x2 = nc.last_state.inversion(Mode::two);
    }
    rec.observables = observe(rec.steady, p);
    next_seed = rec.steady.state;
    return rec;
}

} // namespace

HysteresisResult hysteresis_sweep(const SystemParams& base, const ArcPath& path, int n_steps,
                                  const SettleOptions& opts, std::optional<MeanFieldState> initial)
{
    if (n_steps < 10)
        throw std::invalid_argument("hysteresis sweep needs at least 10 steps");
    if (!(path.radius > 0.0))
        throw std::invalid_argument("arc radius must be positive");

    std::vector<double> phis(n_steps + 1);
    // symmetric in (start, end): a reversed path visits bit-identical angles
    for (int k = 0; k <= n_steps; ++k)
        phis[k] = (path.phi_start * (n_steps - k) + path.phi_end * k) / n_steps;

    HysteresisResult out;
    MeanFieldState seed = initial.value_or(ground_state(Mode::one));
    for (double phi : phis)
        out.forward.push_back(settle_record(base, phi, path, seed, opts, seed));
    for (auto it = phis.rbegin(); it != phis.rend(); ++it)
        out.backward.push_back(settle_record(base, *it, path, seed, opts, seed));
    return out;
}

double hysteresis_loop_area(const HysteresisResult& r, Mode mode)
{
    const std::size_t n = r.forward.size();
    if (n < 2 || r.backward.size() != n)
        return 0.0;
    auto T = [mode](const SweepRecord& rec) {
        return mode == Mode::one ? rec.observables.T1 : rec.observables.T2;
    };
    // undriven endpoints have no transmittance
    auto gap = [](double a, double b) { return std::isnan(a) || std::isnan(b) ? 0.0 : std::abs(a - b); };
    double area = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double d0 = gap(T(r.forward[k]), T(r.backward[n - 1 - k]));
        const double d1 = gap(T(r.forward[k + 1]), T(r.backward[n - 2 - k]));
        area += 0.5 * (d0 + d1) * std::abs(r.forward[k + 1].control - r.forward[k].control);
    }
    return area;
}

} // namespace bistab
