#ifndef PTOMIT_STEADY_STATE_HPP
#define PTOMIT_STEADY_STATE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <vector>

#include "ptomit/cubic.hpp"
#include "ptomit/error.hpp"
#include "ptomit/params.hpp"

namespace ptomit {

using cplx = std::complex<double>;

struct SteadyState {
    double x_s = 0.0;    // m
    cplx a1_s;           // passive resonator
    cplx a2_s;           // gain resonator
    double n1 = 0.0;
    double n2 = 0.0;
    double residual = 0.0;
};

// D(x) = (i Delta_L - kappa)(gamma + i Delta_L - i g x) + J^2, the common
// denominator of the steady-state amplitudes.
inline cplx steady_denominator(const SystemParams& sys, const DriveParams& drive, double x)
{
    const cplx I(0.0, 1.0);
    const cplx lhs = I * drive.Delta_L - sys.kappa;
    return lhs * (sys.gamma + I * drive.Delta_L - I * (sys.g_om * x)) + sys.J_coupling * sys.J_coupling;
}

// Eliminating a1 between x = (hbar g/(m omega_m^2))|a1|^2 and
// a1 = E_L (i Delta_L - kappa) / D(x) gives x |P + Q x|^2 = K with
// P = D(0), Q = -i g (i Delta_L - kappa).
inline CubicPoly cubic_coefficients(const SystemParams& sys, const DriveParams& drive)
{
    const cplx I(0.0, 1.0);
    const cplx lhs = I * drive.Delta_L - sys.kappa;
    const cplx P = steady_denominator(sys, drive, 0.0);
    const cplx Q = -I * sys.g_om * lhs;
    const double K = displacement_per_photon(sys) * drive.E_L * drive.E_L * std::norm(lhs);

    CubicPoly poly;
    poly.c3 = std::norm(Q);
    poly.c2 = 2.0 * (P * std::conj(Q)).real();
    poly.c1 = std::norm(P);
    poly.c0 = -K;
    return poly;
}

// Non-negative real roots of the self-consistency, ascending. More than one
// entry means the pump sits in a bistable window.
inline std::vector<double> steady_state_roots(const SystemParams& sys, const DriveParams& drive)
{
    const CubicPoly poly = cubic_coefficients(sys, drive);
    if (poly.c0 == 0.0)
        return {0.0}; // undriven or mechanically decoupled
    std::vector<double> roots = real_roots(poly);
    std::erase_if(roots, [](double r) { return r < 0.0; });
    return roots;
}

namespace detail {

inline double relative_defect(cplx value, cplx reference, double scale)
{
    const double d = std::abs(value - reference);
    return scale > 0.0 ? d / scale : d;
}

} // namespace detail

// Populates the amplitudes and residual for a given displacement root.
inline SteadyState steady_state_at(const SystemParams& sys, const DriveParams& drive, double x_s)
{
    const cplx I(0.0, 1.0);
    const cplx D = steady_denominator(sys, drive, x_s);
    const double gamma2 = sys.gamma * sys.gamma;
    if (std::abs(D) < 1e-6 * gamma2) {
        std::ostringstream msg;
        msg << "|D(x_s)| = " << std::abs(D) << " < 1e-6 gamma^2 at kappa/gamma = " << sys.kappa / sys.gamma
            << ", J/gamma = " << sys.J_coupling / sys.gamma << ", Delta_L/gamma = " << drive.Delta_L / sys.gamma
            << "; no linear steady state exists";
        throw Error(ErrorKind::lasing_threshold, msg.str());
    }

    SteadyState ss;
    ss.x_s = x_s;
    ss.a1_s = drive.E_L * (I * drive.Delta_L - sys.kappa) / D;
    ss.a2_s = I * sys.J_coupling * drive.E_L / D;
    ss.n1 = std::norm(ss.a1_s);
    ss.n2 = std::norm(ss.a2_s);

    // Residuals of the time-independent equations of motion, each scaled by
    // the magnitude of its largest term.
    const cplx rot1 = -I * drive.Delta_L + I * (sys.g_om * x_s) - sys.gamma;
    const cplx t1a = rot1 * ss.a1_s;
    const cplx t1b = I * sys.J_coupling * ss.a2_s;
    const double s1 = std::max({std::abs(t1a), std::abs(t1b), drive.E_L});
    const double r1 = detail::relative_defect(t1a + t1b + drive.E_L, 0.0, s1);

    const cplx t2a = (-I * drive.Delta_L + sys.kappa) * ss.a2_s;
    const cplx t2b = I * sys.J_coupling * ss.a1_s;
    const double r2 = detail::relative_defect(t2a + t2b, 0.0, std::max(std::abs(t2a), std::abs(t2b)));

    const double spring = sys.omega_m * sys.omega_m * x_s;
    const double force = force_per_photon_per_mass(sys) * ss.n1;
    const double rx = detail::relative_defect(spring - force, 0.0, std::max(std::abs(spring), std::abs(force)));

    ss.residual = std::max({r1, r2, rx});
    return ss;
}

// Power fractions along which the physical branch is continued from x = 0.
inline constexpr std::array<double, 5> homotopy_fractions{1e-3, 1e-2, 0.1, 0.3, 1.0};

inline SteadyState solve_steady_state(const SystemParams& sys, const DriveParams& drive)
{
    if (drive.E_L == 0.0)
        return steady_state_at(sys, drive, 0.0);

    double x = 0.0;
    for (double fraction : homotopy_fractions) {
        DriveParams partial = drive;
        partial.P_L = drive.P_L * fraction;
        partial.E_L = drive.E_L * std::sqrt(fraction);
        const std::vector<double> roots = steady_state_roots(sys, partial);
        if (roots.empty())
            throw Error(ErrorKind::internal, "self-consistency has no non-negative real root");
        x = *std::min_element(roots.begin(), roots.end(),
                              [x](double l, double r) { return std::abs(l - x) < std::abs(r - x); });
    }
    return steady_state_at(sys, drive, x);
}

} // namespace ptomit

#endif // PTOMIT_STEADY_STATE_HPP
