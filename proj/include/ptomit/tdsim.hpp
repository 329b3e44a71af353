#ifndef PTOMIT_TDSIM_HPP
#define PTOMIT_TDSIM_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

#include "ptomit/error.hpp"
#include "ptomit/params.hpp"
#include "ptomit/pt_phase.hpp"
#include "ptomit/response.hpp"
#include "ptomit/steady_state.hpp"

namespace ptomit {

// Mean-field state in the frame rotating at the pump frequency, SI units;
// v = dx/dt carries p/m.
struct TrajectoryState {
    double x = 0.0;
    double v = 0.0;
    cplx a1;
    cplx a2;
};

struct TrajectorySample {
    double t = 0.0;
    TrajectoryState state;
};

struct Trajectory {
    double dt = 0.0;                       // integration step, s
    std::size_t stride = 1;                // samples are every stride steps
    std::vector<TrajectorySample> samples;
};

// Equations of motion in dimensionless form: time in 1/gamma, rates in
// gamma, displacement in units of x_unit = gamma/g (x_zpf when g = 0).
// The map to SI is linear and invertible, so every scaled run corresponds to
// exactly one SI parameter point.
struct ScaledModel {
    double delta_L = 0.0;
    double kappa = 0.0;
    double J = 0.0;
    double omega_m = 0.0;
    double Gamma_m = 0.0;
    double xi = 0.0;
    double shift_per_unit = 0.0;   // g x_unit / gamma
    double force_per_photon = 0.0; // (hbar g/m) / (x_unit gamma^2)
    double pump = 0.0;             // E_L / gamma
    cplx probe;                    // eps_p e^{i phase} / gamma
    double gamma = 0.0;            // SI scale, for conversions
    double x_unit = 0.0;

    static ScaledModel from(const SystemParams& sys, const DriveParams& drive, double probe_phase = 0.0)
    {
        ScaledModel s;
        const double g = sys.gamma;
        s.gamma = g;
        s.x_unit = sys.g_om > 0.0 ? g / sys.g_om : sys.x_zpf;
        s.delta_L = drive.Delta_L / g;
        s.kappa = sys.kappa / g;
        s.J = sys.J_coupling / g;
        s.omega_m = sys.omega_m / g;
        s.Gamma_m = sys.Gamma_m / g;
        s.xi = drive.xi / g;
        s.shift_per_unit = sys.g_om * s.x_unit / g;
        s.force_per_photon = force_per_photon_per_mass(sys) / (s.x_unit * g * g);
        s.pump = drive.E_L / g;
        s.probe = std::polar(drive.eps_p / g, probe_phase);
        return s;
    }
};

namespace detail {

struct ScaledState {
    double X = 0.0;
    double V = 0.0;
    cplx a1;
    cplx a2;

    ScaledState operator+(const ScaledState& o) const { return {X + o.X, V + o.V, a1 + o.a1, a2 + o.a2}; }
    ScaledState operator*(double h) const { return {X * h, V * h, a1 * h, a2 * h}; }
};

inline ScaledState rhs(const ScaledModel& m, double tau, const ScaledState& s)
{
    const cplx I(0.0, 1.0);
    ScaledState d;
    d.X = s.V;
    d.V = -m.Gamma_m * s.V - m.omega_m * m.omega_m * s.X + m.force_per_photon * std::norm(s.a1);
    d.a1 = (-I * m.delta_L + I * (m.shift_per_unit * s.X) - 1.0) * s.a1 + I * m.J * s.a2 + m.pump +
           m.probe * std::polar(1.0, -m.xi * tau);
    d.a2 = (-I * m.delta_L + m.kappa) * s.a2 + I * m.J * s.a1;
    return d;
}

inline ScaledState rk4_step(const ScaledModel& m, double tau, const ScaledState& y, double h)
{
    const ScaledState k1 = rhs(m, tau, y);
    const ScaledState k2 = rhs(m, tau + 0.5 * h, y + k1 * (0.5 * h));
    const ScaledState k3 = rhs(m, tau + 0.5 * h, y + k2 * (0.5 * h));
    const ScaledState k4 = rhs(m, tau + h, y + k3 * h);
    return y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
}

inline ScaledState to_scaled(const ScaledModel& m, const TrajectoryState& s)
{
    return {s.x / m.x_unit, s.v / (m.x_unit * m.gamma), s.a1, s.a2};
}

inline TrajectoryState to_si(const ScaledModel& m, const ScaledState& s)
{
    return {s.X * m.x_unit, s.V * m.x_unit * m.gamma, s.a1, s.a2};
}

inline bool diverged(const ScaledState& s)
{
    constexpr double limit = 1e12;
    const double mags[] = {std::abs(s.X), std::abs(s.V), std::abs(s.a1), std::abs(s.a2)};
    for (double v : mags)
        if (!(v <= limit))
            return true;
    return false;
}

} // namespace detail

// Largest step permitted: 1/50 of the fastest period in the problem.
inline double max_time_step(const SystemParams& sys, const DriveParams& drive)
{
    const double fastest = std::max({sys.omega_m, std::abs(drive.xi), sys.J_coupling, sys.gamma, std::abs(sys.kappa)});
    return 2.0 * std::numbers::pi / fastest / 50.0;
}

struct IntegrateOptions {
    std::size_t stride = 1;
    double record_from = 0.0;  // s; earlier samples are not kept
    double probe_phase = 0.0;  // rad, phase of the probe drive
};

// Classical fixed-step RK4 from t = 0 to t_end (rounded to whole steps).
inline Trajectory integrate(const SystemParams& sys, const DriveParams& drive, double t_end, double dt,
                            const TrajectoryState& initial, const IntegrateOptions& opt = {})
{
    if (!(dt > 0.0) || !(t_end >= 0.0))
        throw Error(ErrorKind::invalid_parameter, "integrate needs dt > 0 and t_end >= 0");
    const double dt_max = max_time_step(sys, drive);
    if (dt > dt_max * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "dt = " << dt << " s exceeds 1/50 of the fastest period (" << dt_max << " s)";
        throw Error(ErrorKind::invalid_parameter, msg.str());
    }

    const ScaledModel model = ScaledModel::from(sys, drive, opt.probe_phase);
    const double h = dt * sys.gamma;
    const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
    const std::size_t stride = std::max<std::size_t>(1, opt.stride);

    Trajectory traj;
    traj.dt = dt;
    traj.stride = stride;
    detail::ScaledState y = detail::to_scaled(model, initial);
    auto record = [&](std::size_t step) {
        const double t = static_cast<double>(step) * dt;
        if (t >= opt.record_from * (1.0 - 1e-12) && step % stride == 0)
            traj.samples.push_back({t, detail::to_si(model, y)});
    };
    record(0);
    for (std::size_t n = 0; n < steps; ++n) {
        y = detail::rk4_step(model, static_cast<double>(n) * h, y, h);
        if (detail::diverged(y)) {
            std::ostringstream msg;
            msg << "trajectory diverged at t = " << static_cast<double>(n + 1) * dt << " s (" << (n + 1)
                << " steps)";
            throw Error(ErrorKind::instability, msg.str());
        }
        record(n + 1);
    }
    return traj;
}

struct DemodResult {
    cplx da1_plus_est;
    cplx t_est;
    double eta_est = 0.0;
    double rel_err_vs_freq_domain = 0.0;
    double drift = 0.0; // between the two halves of the window
};

namespace detail {

// (1/N) sum (a1 - mean a1) e^{+i xi t} over samples [first, last).
inline cplx lock_in(const std::vector<TrajectorySample>& s, std::size_t first, std::size_t last, double xi)
{
    cplx mean = 0.0;
    for (std::size_t i = first; i < last; ++i)
        mean += s[i].state.a1;
    const double n = static_cast<double>(last - first);
    mean /= n;
    cplx acc = 0.0;
    for (std::size_t i = first; i < last; ++i)
        acc += (s[i].state.a1 - mean) * std::polar(1.0, xi * s[i].t);
    return acc / n;
}

inline cplx window_mean(const std::vector<TrajectorySample>& s, std::size_t first, std::size_t last)
{
    cplx acc = 0.0;
    for (std::size_t i = first; i < last; ++i)
        acc += s[i].state.a1;
    return acc / static_cast<double>(last - first);
}

// Fills t_est, eta_est and the comparison with the frequency-domain value,
// which is returned.
inline double finish_demod(DemodResult& r, const SystemParams& sys, const DriveParams& drive)
{
    const double eps = drive.eps_p;
    r.t_est = eps > 0.0 ? 1.0 - 2.0 * sys.gamma * r.da1_plus_est / eps : cplx(1.0);
    r.eta_est = std::norm(r.t_est);
    const ProbeResponse freq = probe_response(sys, drive, solve_steady_state(sys, drive));
    r.rel_err_vs_freq_domain = std::abs(r.eta_est - freq.eta) / freq.eta;
    return freq.eta;
}

inline void check_drift(const DemodResult& r, cplx first_half, cplx second_half, cplx level)
{
    const double diff = std::abs(first_half - second_half);
    if (diff > 1e-4 * std::abs(r.da1_plus_est) + 1e-10 * std::abs(level)) {
        std::ostringstream msg;
        msg << "demodulated amplitude drifts by " << diff / std::max(std::abs(r.da1_plus_est), 1e-300)
            << " (relative) across the window; increase t_end";
        throw Error(ErrorKind::not_converged, msg.str());
    }
}

} // namespace detail

// Extracts the exp(-i xi t) component of a1 over the trailing `window`
// seconds of the trajectory. The window should span a whole number of probe
// periods on the sample grid.
inline DemodResult demodulate(const Trajectory& traj, const SystemParams& sys, const DriveParams& drive,
                              double window)
{
    const auto& s = traj.samples;
    const double spacing = traj.dt * static_cast<double>(traj.stride);
    auto n = static_cast<std::size_t>(std::llround(window / spacing));
    n -= n % 2;
    if (n < 4 || n > s.size())
        throw Error(ErrorKind::invalid_parameter, "demodulation window does not fit the recorded samples");

    const std::size_t first = s.size() - n;
    const std::size_t mid = first + n / 2;
    DemodResult r;
    r.da1_plus_est = detail::lock_in(s, first, s.size(), drive.xi);
    const cplx h1 = detail::lock_in(s, first, mid, drive.xi);
    const cplx h2 = detail::lock_in(s, mid, s.size(), drive.xi);
    r.drift = std::abs(h1 - h2) / std::max(std::abs(r.da1_plus_est), 1e-300);
    detail::check_drift(r, h1, h2, detail::window_mean(s, first, s.size()));
    detail::finish_demod(r, sys, drive);
    return r;
}

struct OracleOptions {
    double probe_fraction = 1e-8;     // P_in / P_L for the oracle runs
    int steps_per_fast_period = 200;  // >= 50
    double window_periods = 200.0;    // probe periods (mechanical periods when xi = 0)
    double transient_factor = 40.0;   // discard transient_factor / slowest decay rate
    bool start_at_steady_state = true;
};

struct OracleReport {
    double Delta_p = 0.0;
    double eta_freq = 0.0;
    double eta_td = 0.0;
    double rel_err = 0.0;
    DemodResult demod;
};

namespace detail {

inline double slowest_decay(const SystemParams& sys, const DriveParams& drive)
{
    const PtClassification pt = classify(sys, drive.Delta_L);
    double rate = -std::max(pt.lambda_plus.real(), pt.lambda_minus.real());
    if (sys.g_om > 0.0 && sys.Gamma_m > 0.0)
        rate = std::min(rate, sys.Gamma_m);
    return rate;
}

} // namespace detail

// Runs the time-domain oracle at one drive point and compares against the
// frequency-domain transmission. For xi = 0 the +xi and -xi sidebands are
// both static; they are separated by cycling the probe phase over four
// quadratures.
inline OracleReport oracle_point(const SystemParams& sys, const DriveParams& drive_in, const OracleOptions& opt = {})
{
    const DriveParams drive = make_drive(sys, drive_in.P_L, drive_in.Delta_L, drive_in.Delta_p,
                                         drive_in.P_L * opt.probe_fraction);
    const double decay = detail::slowest_decay(sys, drive);
    const double dt_fast = max_time_step(sys, drive) * 50.0 / std::max(50, opt.steps_per_fast_period);
    const double xi = std::abs(drive.xi);
    const bool static_probe = xi * dt_fast < 1e-9;

    double dt = dt_fast;
    double window = 0.0;
    if (!static_probe) {
        const double period = 2.0 * std::numbers::pi / xi;
        dt = period / std::ceil(period / dt_fast);
        window = opt.window_periods * period;
    } else {
        window = opt.window_periods * 2.0 * std::numbers::pi / sys.omega_m;
    }
    // unstable supermodes: integrate over a mechanical-damping horizon and let
    // divergence detection report it
    const double horizon_rate = decay > 0.0 ? decay : std::max(sys.Gamma_m, sys.gamma * 1e-3);
    const double transient = opt.transient_factor / horizon_rate;
    const double t_end = std::ceil((transient + window) / dt) * dt;

    TrajectoryState initial;
    if (opt.start_at_steady_state) {
        const SteadyState ss = solve_steady_state(sys, drive);
        initial = {ss.x_s, 0.0, ss.a1_s, ss.a2_s};
    }

    OracleReport rep;
    rep.Delta_p = drive.Delta_p;
    if (!static_probe) {
        IntegrateOptions io;
        io.record_from = t_end - window - 2.0 * dt;
        const Trajectory traj = integrate(sys, drive, t_end, dt, initial, io);
        rep.demod = demodulate(traj, sys, drive, window);
        rep.eta_freq = probe_response(sys, drive, solve_steady_state(sys, drive)).eta;
    } else {
        constexpr double quarter = 0.5 * std::numbers::pi;
        cplx total = 0.0, first = 0.0, second = 0.0, level = 0.0;
        for (int k = 0; k < 4; ++k) {
            IntegrateOptions io;
            io.record_from = t_end - window - 2.0 * dt;
            io.probe_phase = quarter * k;
            const Trajectory traj = integrate(sys, drive, t_end, dt, initial, io);
            const auto& s = traj.samples;
            auto n = static_cast<std::size_t>(std::llround(window / dt));
            n = std::min(n - n % 2, s.size());
            const std::size_t a = s.size() - n, mid = a + n / 2;
            const cplx rot = std::polar(0.25, -quarter * k);
            total += rot * detail::window_mean(s, a, s.size());
            first += rot * detail::window_mean(s, a, mid);
            second += rot * detail::window_mean(s, mid, s.size());
            level += 0.25 * detail::window_mean(s, a, s.size());
        }
        rep.demod.da1_plus_est = total;
        rep.demod.drift = std::abs(first - second) / std::max(std::abs(total), 1e-300);
        detail::check_drift(rep.demod, first, second, level);
        rep.eta_freq = detail::finish_demod(rep.demod, sys, drive);
    }
    rep.eta_td = rep.demod.eta_est;
    rep.rel_err = rep.demod.rel_err_vs_freq_domain;
    return rep;
}

} // namespace ptomit

#endif // PTOMIT_TDSIM_HPP
