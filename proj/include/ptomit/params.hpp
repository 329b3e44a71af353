#ifndef PTOMIT_PARAMS_HPP
#define PTOMIT_PARAMS_HPP

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "ptomit/error.hpp"

namespace ptomit {

// All rates and frequencies are angular (rad/s); everything else is SI.

struct PhysicalConstants {
    double hbar = 1.054571817e-34; // J s
};

struct SystemParams {
    double omega_c = 0.0;        // optical resonance
    std::optional<double> R;     // resonator radius; fixes g_om = omega_c / R when set
    double omega_m = 0.0;        // mechanical frequency
    double m_eff = 0.0;          // effective mass, kg
    double gamma = 0.0;          // loss of the optomechanical resonator
    double kappa = 0.0;          // gain (> 0) or loss (< 0) of the second resonator
    double Gamma_m = 0.0;        // mechanical damping
    double J_coupling = 0.0;     // inter-resonator tunnelling
    std::optional<double> Q_c;   // stored, unused in dynamics
    std::optional<double> Q_m;   // stored, unused in dynamics

    // derived
    double g_om = 0.0;           // rad/(s m)
    double x_zpf = 0.0;          // m
    PhysicalConstants constants;
};

struct DriveParams {
    double P_L = 0.0;      // pump power, W
    double P_in = 0.0;     // probe power, W
    double omega_L = 0.0;
    double omega_p = 0.0;
    double Delta_L = 0.0;  // omega_c - omega_L
    double Delta_p = 0.0;  // omega_p - omega_c
    double xi = 0.0;       // omega_p - omega_L
    double E_L = 0.0;      // pump amplitude, 1/s
    double eps_p = 0.0;    // probe amplitude, 1/s
};

// The four independent drive inputs; detunings follow by subtraction.
struct DriveInput {
    double P_L = 0.0;
    double P_in = 0.0;
    double omega_L = 0.0;
    double omega_p = 0.0;
};

namespace detail {

inline void require(bool ok, const char* field, const char* rule)
{
    if (!ok)
        throw Error(ErrorKind::invalid_parameter, std::string(field) + " must be " + rule);
}

inline void require_positive(double v, const char* field)
{
    require(std::isfinite(v) && v > 0.0, field, "finite and > 0");
}

inline void require_nonnegative(double v, const char* field)
{
    require(std::isfinite(v) && v >= 0.0, field, "finite and >= 0");
}

} // namespace detail

// Validates the raw fields and fills g_om and x_zpf. When R is absent the
// caller-supplied g_om is kept (this is how decoupled mechanics, g_om = 0,
// is expressed).
inline SystemParams derive_params(SystemParams raw, const PhysicalConstants& constants = {})
{
    using detail::require_nonnegative;
    using detail::require_positive;
    require_positive(raw.omega_c, "omega_c");
    if (raw.R)
        require_positive(*raw.R, "R");
    require_positive(raw.m_eff, "m_eff");
    require_positive(raw.omega_m, "omega_m");
    require_positive(raw.gamma, "gamma");
    detail::require(std::isfinite(raw.kappa), "kappa", "finite");
    require_nonnegative(raw.Gamma_m, "Gamma_m");
    require_nonnegative(raw.J_coupling, "J_coupling");
    require_positive(constants.hbar, "hbar");

    raw.constants = constants;
    if (raw.R)
        raw.g_om = raw.omega_c / *raw.R;
    else
        require_nonnegative(raw.g_om, "g_om");
    raw.x_zpf = std::sqrt(constants.hbar / (2.0 * raw.m_eff * raw.omega_m));
    return raw;
}

// Static displacement per intracavity photon, hbar g / (m omega_m^2).
inline double displacement_per_photon(const SystemParams& sys)
{
    return sys.constants.hbar * sys.g_om / (sys.m_eff * sys.omega_m * sys.omega_m);
}

// Radiation-pressure acceleration per photon, hbar g / m.
inline double force_per_photon_per_mass(const SystemParams& sys)
{
    return sys.constants.hbar * sys.g_om / sys.m_eff;
}

inline double field_amplitude(double power, double gamma, double omega, const PhysicalConstants& c)
{
    return std::sqrt(2.0 * power * gamma / (c.hbar * omega));
}

// Drive from absolute frequencies. Delta_L and Delta_p are obtained by
// subtraction, which loses ~omega_c * 1e-16 rad/s of absolute accuracy;
// prefer make_drive when the detunings are the controlled quantities.
inline DriveParams drive_amplitudes(const DriveInput& in, const SystemParams& sys)
{
    detail::require_nonnegative(in.P_L, "P_L");
    detail::require_nonnegative(in.P_in, "P_in");
    detail::require_positive(in.omega_L, "omega_L");
    detail::require_positive(in.omega_p, "omega_p");

    DriveParams d;
    d.P_L = in.P_L;
    d.P_in = in.P_in;
    d.omega_L = in.omega_L;
    d.omega_p = in.omega_p;
    d.Delta_L = sys.omega_c - in.omega_L;
    d.Delta_p = in.omega_p - sys.omega_c;
    d.xi = d.Delta_L + d.Delta_p;
    d.E_L = field_amplitude(in.P_L, sys.gamma, in.omega_L, sys.constants);
    d.eps_p = field_amplitude(in.P_in, sys.gamma, in.omega_p, sys.constants);
    return d;
}

// Default probe power relative to the pump when none is given.
inline constexpr double default_probe_fraction = 1e-4;

// Drive from detunings, which are stored exactly as given.
inline DriveParams make_drive(const SystemParams& sys, double P_L, double Delta_L, double Delta_p,
                              std::optional<double> P_in_opt = std::nullopt)
{
    detail::require_nonnegative(P_L, "P_L");
    const double P_in = P_in_opt.value_or(P_L * default_probe_fraction);
    detail::require_nonnegative(P_in, "P_in");
    detail::require(std::isfinite(Delta_L), "Delta_L", "finite");
    detail::require(std::isfinite(Delta_p), "Delta_p", "finite");

    DriveParams d;
    d.P_L = P_L;
    d.P_in = P_in;
    d.Delta_L = Delta_L;
    d.Delta_p = Delta_p;
    d.xi = Delta_L + Delta_p;
    d.omega_L = sys.omega_c - Delta_L;
    d.omega_p = sys.omega_c + Delta_p;
    detail::require_positive(d.omega_L, "omega_L");
    detail::require_positive(d.omega_p, "omega_p");
    d.E_L = field_amplitude(P_L, sys.gamma, d.omega_L, sys.constants);
    d.eps_p = field_amplitude(P_in, sys.gamma, d.omega_p, sys.constants);
    return d;
}

inline DriveParams with_probe_detuning(const DriveParams& d, const SystemParams& sys, double Delta_p)
{
    return make_drive(sys, d.P_L, d.Delta_L, Delta_p, d.P_in);
}

inline DriveParams with_pump_power(const DriveParams& d, const SystemParams& sys, double P_L)
{
    return make_drive(sys, P_L, d.Delta_L, d.Delta_p, P_L * default_probe_fraction);
}

namespace preset {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Experimentally accessible toroid parameters. kappa is the tuning knob and
// defaults to 0.5 gamma; J = gamma.
inline SystemParams paper_system(double kappa_over_gamma = 0.5, double J_over_gamma = 1.0)
{
    SystemParams s;
    s.omega_c = 1.93e14;
    s.R = 34.5e-6;
    s.omega_m = two_pi * 23.4e6;
    s.m_eff = 5e-11;
    s.gamma = 6.43e6;
    s.Gamma_m = 2.4e5;
    s.kappa = kappa_over_gamma * s.gamma;
    s.J_coupling = J_over_gamma * s.gamma;
    s.Q_c = 3e7;
    s.Q_m = 150.0;
    return derive_params(s);
}

inline constexpr double paper_pump_power = 10e-6;

// Pump red-detuned by one mechanical frequency, probe on cavity resonance.
inline DriveParams paper_drive(const SystemParams& sys, double P_L = paper_pump_power)
{
    return make_drive(sys, P_L, sys.omega_m, 0.0, P_L * default_probe_fraction);
}

} // namespace preset

} // namespace ptomit

#endif // PTOMIT_PARAMS_HPP
