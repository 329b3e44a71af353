#ifndef PTOMIT_RESPONSE_HPP
#define PTOMIT_RESPONSE_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "ptomit/error.hpp"
#include "ptomit/parallel.hpp"
#include "ptomit/params.hpp"
#include "ptomit/steady_state.hpp"

namespace ptomit {

// First-order sideband amplitudes around the steady state; the "+" terms
// oscillate as exp(-i xi t), the "-" terms as exp(+i xi t).
struct SidebandAmplitudes {
    cplx da1_plus;
    cplx da1_minus;
    cplx da2_plus;
    cplx da2_minus;
    cplx dx_plus;
    cplx dx_minus;
};

struct ProbeResponse {
    cplx mu_plus;
    cplx mu_minus;
    cplx G1;
    cplx G2;
    cplx dx_plus;
    cplx dx_minus;
    cplx da1_plus; // the amplitude A that sets the transmission
    cplx da1_minus;
    cplx da2_plus;
    cplx da2_minus;
    cplx t_amp;
    double eta = 0.0;
    double phase = 0.0; // arg t in (-pi, pi]
};

struct SpectrumPoint {
    double Delta_p = 0.0;
    double eta = 0.0;
    double phase = 0.0; // unwrapped along the grid, principal value at the anchor
    double t_re = 0.0;
    double t_im = 0.0;
};

// arg in (-pi, pi]; std::arg returns -pi for negative reals with a -0 imaginary part.
inline double principal_arg(cplx z)
{
    const double a = std::arg(z);
    return a <= -std::numbers::pi ? a + 2.0 * std::numbers::pi : a;
}

// Closed-form sideband solution of the linearized equations. Amplitudes are
// linear in eps_p; t_amp is computed from the eps_p-normalized amplitude so
// it stays defined when the probe power is zero.
inline ProbeResponse probe_response(const SystemParams& sys, const DriveParams& drive, const SteadyState& ss)
{
    const cplx I(0.0, 1.0);
    const double gamma = sys.gamma;
    const double xi = drive.xi;
    const double DL = drive.Delta_L;
    const double J2 = sys.J_coupling * sys.J_coupling;
    const double gx = sys.g_om * ss.x_s;
    const double hbar_g_m = force_per_photon_per_mass(sys);
    const double coupling = hbar_g_m * sys.g_om;       // hbar g^2 / m
    const double K = coupling * ss.n1;

    ProbeResponse r;
    r.mu_plus = -sys.kappa - I * xi + I * DL;
    r.mu_minus = -sys.kappa - I * xi - I * DL;
    r.G1 = (I * DL + gamma - I * gx - I * xi) * r.mu_plus + J2;
    r.G2 = (-I * DL + gamma + I * gx - I * xi) * r.mu_minus + J2;
    const cplx chi = sys.omega_m * sys.omega_m - xi * xi - I * xi * sys.Gamma_m;

    const cplx den = chi * r.G1 * r.G2 - I * K * (r.G2 * r.mu_plus - r.G1 * r.mu_minus);
    const double g6 = std::pow(gamma, 6);
    if (!(std::abs(den) / g6 >= 1e-12)) {
        std::ostringstream msg;
        msg << "vanishing sideband denominator (|den|/gamma^6 = " << std::abs(den) / g6
            << ") at kappa/gamma = " << sys.kappa / gamma << ", J/gamma = " << sys.J_coupling / gamma
            << ", xi/gamma = " << xi / gamma << ", Delta_L/gamma = " << DL / gamma;
        throw Error(ErrorKind::response_singularity, msg.str());
    }
    const cplx den_minus = std::conj(den);
    const cplx a1 = ss.a1_s;
    const cplx common = chi * r.G2 + I * K * r.mu_minus;

    // per unit eps_p
    const cplx A = common * r.mu_plus / den;
    const cplx a1m = I * coupling * a1 * a1 * std::conj(r.mu_minus) * std::conj(r.mu_plus) / den_minus;
    const cplx a2p = I * sys.J_coupling * common / den;
    const cplx a2m = -sys.J_coupling * coupling * a1 * a1 * std::conj(r.mu_plus) / den_minus;
    const cplx xp = hbar_g_m * std::conj(a1) * r.G2 * r.mu_plus / den;
    const cplx xm = hbar_g_m * a1 * std::conj(r.G2) * std::conj(r.mu_plus) / den_minus;

    const double eps = drive.eps_p;
    r.da1_plus = eps * A;
    r.da1_minus = eps * a1m;
    r.da2_plus = eps * a2p;
    r.da2_minus = eps * a2m;
    r.dx_plus = eps * xp;
    r.dx_minus = eps * xm;

    r.t_amp = 1.0 - 2.0 * gamma * A;
    r.eta = std::norm(r.t_amp);
    r.phase = principal_arg(r.t_amp);
    return r;
}

// Independent route to the same amplitudes: assemble the linearized
// sideband equations for (da1+, da2+, conj da1-, conj da2-, dx+) and solve
// them numerically. Rates are scaled by gamma and displacements by gamma/g
// (or x_zpf when g = 0) so the system is O(1).
inline SidebandAmplitudes sideband_amplitudes_direct(const SystemParams& sys, const DriveParams& drive,
                                                     const SteadyState& ss)
{
    using Mat = Eigen::Matrix<cplx, 5, 5>;
    using Vec = Eigen::Matrix<cplx, 5, 1>;
    const cplx I(0.0, 1.0);
    const double gamma = sys.gamma;
    const double xi = drive.xi / gamma;
    const double DL = drive.Delta_L / gamma;
    const double J = sys.J_coupling / gamma;
    const double kappa = sys.kappa / gamma;
    const double gx = sys.g_om * ss.x_s / gamma;
    const double x_unit = sys.g_om > 0.0 ? gamma / sys.g_om : sys.x_zpf;
    const double shift_per_unit = sys.g_om * x_unit / gamma; // g x_unit / gamma
    const double wm = sys.omega_m / gamma;
    const double Gm = sys.Gamma_m / gamma;
    // force row divided by omega_m^2 x_unit, in units of gamma^2
    const double force = force_per_photon_per_mass(sys) / (sys.omega_m * sys.omega_m * x_unit);
    const cplx a1 = ss.a1_s;

    const cplx L1p = I * DL + 1.0 - I * gx - I * xi;
    const cplx L1m = I * DL + 1.0 - I * gx + I * xi;
    const cplx L2p = I * DL - kappa - I * xi;
    const cplx L2m = I * DL - kappa + I * xi;
    const cplx chi = (wm * wm - xi * xi - I * xi * Gm) / (wm * wm);

    Mat M = Mat::Zero();
    Vec b = Vec::Zero();
    M(0, 0) = L1p;
    M(0, 1) = -I * J;
    M(0, 4) = -I * shift_per_unit * a1;
    b(0) = 1.0 / gamma;
    M(1, 0) = -I * J;
    M(1, 1) = L2p;
    M(2, 2) = std::conj(L1m);
    M(2, 3) = I * J;
    M(2, 4) = I * shift_per_unit * std::conj(a1);
    M(3, 2) = I * J;
    M(3, 3) = std::conj(L2m);
    M(4, 0) = -force * std::conj(a1);
    M(4, 2) = -force * a1;
    M(4, 4) = chi;

    // equilibrate rows and columns; the optical and mechanical blocks differ
    // by many orders of magnitude at strong pump
    Eigen::Matrix<double, 5, 1> rs, cs;
    for (int i = 0; i < 5; ++i)
        rs(i) = 1.0 / M.row(i).cwiseAbs().maxCoeff();
    M = rs.asDiagonal() * M;
    b = rs.asDiagonal() * b;
    for (int j = 0; j < 5; ++j)
        cs(j) = 1.0 / M.col(j).cwiseAbs().maxCoeff();
    M = M * cs.asDiagonal();
    const auto lu = M.fullPivLu();
    Vec y = lu.solve(b);
    y += lu.solve(b - M * y);
    const Vec u = cs.asDiagonal() * y * drive.eps_p;
    SidebandAmplitudes s;
    s.da1_plus = u(0);
    s.da2_plus = u(1);
    s.da1_minus = std::conj(u(2));
    s.da2_minus = std::conj(u(3));
    s.dx_plus = u(4) * x_unit;
    s.dx_minus = std::conj(s.dx_plus);
    return s;
}

namespace detail {

inline double unwrap_near(double value, double reference)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return value - two_pi * std::round((value - reference) / two_pi);
}

inline std::size_t anchor_index(const std::vector<double>& grid)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (std::abs(grid[i]) < std::abs(grid[best]))
            best = i;
    return best;
}

} // namespace detail

// Probe spectrum over Delta_p values with the pump (and so the steady state)
// held fixed. The phase is unwrapped cumulatively outward from the grid point
// nearest Delta_p = 0, which keeps its principal value.
inline std::vector<SpectrumPoint> spectrum(const SystemParams& sys, const DriveParams& drive_base,
                                           const std::vector<double>& detuning_grid, unsigned jobs = 1)
{
    if (detuning_grid.empty())
        throw Error(ErrorKind::invalid_parameter, "detuning grid must be nonempty");
    for (double d : detuning_grid)
        if (!std::isfinite(d))
            throw Error(ErrorKind::invalid_parameter, "detuning grid values must be finite");

    const SteadyState ss = solve_steady_state(sys, drive_base);
    std::vector<SpectrumPoint> out(detuning_grid.size());
    parallel_for(detuning_grid.size(), jobs, [&](std::size_t i) {
        const double dp = detuning_grid[i];
        try {
            const ProbeResponse r = probe_response(sys, with_probe_detuning(drive_base, sys, dp), ss);
            out[i] = {dp, r.eta, r.phase, r.t_amp.real(), r.t_amp.imag()};
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "at Delta_p = " << dp << " rad/s: " << e.what();
            throw Error(e.kind(), msg.str());
        }
    });

    const std::size_t anchor = detail::anchor_index(detuning_grid);
    for (std::size_t i = anchor + 1; i < out.size(); ++i)
        out[i].phase = detail::unwrap_near(out[i].phase, out[i - 1].phase);
    for (std::size_t i = anchor; i-- > 0;)
        out[i].phase = detail::unwrap_near(out[i].phase, out[i + 1].phase);
    return out;
}

inline double transmission_phase(const SystemParams& sys, const DriveParams& drive, const SteadyState& ss,
                                 double Delta_p)
{
    return probe_response(sys, with_probe_detuning(drive, sys, Delta_p), ss).phase;
}

namespace detail {

// Five-point central derivative of arg t at Delta_p = center, with the
// stencil phases unwrapped against the center value.
inline double phase_derivative(const SystemParams& sys, const DriveParams& drive, const SteadyState& ss,
                               double center, double h)
{
    const double p0 = transmission_phase(sys, drive, ss, center);
    const double pm2 = unwrap_near(transmission_phase(sys, drive, ss, center - 2.0 * h), p0);
    const double pm1 = unwrap_near(transmission_phase(sys, drive, ss, center - h), p0);
    const double pp1 = unwrap_near(transmission_phase(sys, drive, ss, center + h), p0);
    const double pp2 = unwrap_near(transmission_phase(sys, drive, ss, center + 2.0 * h), p0);
    return (pm2 - 8.0 * pm1 + 8.0 * pp1 - pp2) / (12.0 * h);
}

} // namespace detail

struct GroupDelayOptions {
    double initial_step_over_gamma = 1e-6;
    double rel_tol = 1e-6;
    int max_halvings = 10;
};

// d arg t / d omega_p at the given probe detuning, in seconds. Each estimate
// at step h is checked against one at h/2; the step is halved until they agree.
inline double group_delay_at(const SystemParams& sys, const DriveParams& drive, const SteadyState& ss,
                             double Delta_p, const GroupDelayOptions& opt = {})
{
    double h = opt.initial_step_over_gamma * sys.gamma;
    double coarse = detail::phase_derivative(sys, drive, ss, Delta_p, h);
    // absolute floor far below any physically resolvable delay
    const double abs_floor = 1e-12 / sys.gamma;
    for (int halving = 0; halving <= opt.max_halvings; ++halving) {
        const double fine = detail::phase_derivative(sys, drive, ss, Delta_p, 0.5 * h);
        const double diff = std::abs(fine - coarse);
        if (std::isfinite(fine) && (diff <= opt.rel_tol * std::max(std::abs(fine), std::abs(coarse)) ||
                                    diff <= abs_floor))
            return fine;
        h *= 0.5;
        coarse = fine;
    }
    std::ostringstream msg;
    msg << "finite-difference delay did not settle at Delta_p = " << Delta_p << " rad/s, kappa/gamma = "
        << sys.kappa / sys.gamma << ", P_L = " << drive.P_L << " W";
    throw Error(ErrorKind::delay_derivative_unstable, msg.str());
}

// Group delay at Delta_p = 0 for the pump in `drive`.
inline double group_delay(const SystemParams& sys, const DriveParams& drive, const GroupDelayOptions& opt = {})
{
    const SteadyState ss = solve_steady_state(sys, drive);
    return group_delay_at(sys, drive, ss, 0.0, opt);
}

// Small-shift estimate of eta for Delta_L ~ 0, xi ~ 0, x_s ~ 0; the regime
// is the caller's responsibility.
inline double eta_approx(const SystemParams& sys, const SteadyState& ss)
{
    const cplx I(0.0, 1.0);
    const double kg = sys.kappa * sys.gamma;
    const double d = sys.J_coupling * sys.J_coupling - kg;
    if (d == 0.0)
        throw Error(ErrorKind::division_by_zero, "eta_approx has a pole at J^2 = kappa gamma");
    const double mw2 = sys.m_eff * sys.omega_m * sys.omega_m;
    const double hg2 = sys.constants.hbar * sys.g_om * sys.g_om;
    const cplx inner = 2.0 * kg * (mw2 * d - I * hg2 * ss.n1 * sys.kappa) / (mw2 * d * d);
    return std::norm(1.0 + inner);
}

} // namespace ptomit

#endif // PTOMIT_RESPONSE_HPP
