#include <gtest/gtest.h>

#include <random>

#include "ptomit/response.hpp"

using namespace ptomit;

namespace {

const cplx I(0.0, 1.0);

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

SystemParams decoupled(double kappa_over_gamma, double J_over_gamma)
{
    SystemParams s = preset::paper_system(kappa_over_gamma, J_over_gamma);
    s.R.reset();
    s.g_om = 0.0;
    return derive_params(s);
}

// Single optomechanical cavity (J = 0) linear response, solved by hand:
// (gamma + i D - i xi) a+ = eps + i g a1 x+
// (gamma - i D - i xi) conj(a-) = -i g conj(a1) x+
// chi x+ = (hbar g/m)(conj(a1) a+ + a1 conj(a-)),  D = Delta_L - g x_s
cplx single_cavity_A(const SystemParams& s, const DriveParams& d, const SteadyState& ss)
{
    const double D = d.Delta_L - s.g_om * ss.x_s;
    const cplx Lp = s.gamma + I * D - I * d.xi;
    const cplx Lm = s.gamma - I * D - I * d.xi;
    const cplx chi = s.omega_m * s.omega_m - d.xi * d.xi - I * d.xi * s.Gamma_m;
    const double hgm = s.constants.hbar * s.g_om / s.m_eff;
    const cplx xp = hgm * std::conj(ss.a1_s) * d.eps_p / Lp /
                    (chi - I * hgm * s.g_om * ss.n1 * (1.0 / Lp - 1.0 / Lm));
    return (d.eps_p + I * s.g_om * ss.a1_s * xp) / Lp;
}

struct RandomPoint {
    SystemParams sys;
    DriveParams drive;
    SteadyState ss;
};

std::vector<RandomPoint> random_points(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<RandomPoint> pts;
    while (pts.size() < n) {
        const SystemParams s = preset::paper_system(-2.0 + 4.0 * u(rng), 2.0 * u(rng));
        const double DL = (-2.0 + 4.0 * u(rng)) * s.omega_m;
        const double Dp = (-3.0 + 6.0 * u(rng)) * s.omega_m;
        const double P = 1e-8 * std::pow(2e3, u(rng));
        const DriveParams d = make_drive(s, P, DL, Dp);
        try {
            pts.push_back({s, d, solve_steady_state(s, d)});
        } catch (const Error&) {
        }
    }
    return pts;
}

} // namespace

TEST(Response, BareCavityOnResonance)
{
    const SystemParams s = decoupled(0.5, 0.0);
    for (double DL : {0.0, s.omega_m, -0.3 * s.gamma}) {
        const DriveParams d = make_drive(s, 10e-6, DL, 0.0); // xi = Delta_L
        const ProbeResponse r = probe_response(s, d, solve_steady_state(s, d));
        EXPECT_LT(rel(r.da1_plus, d.eps_p / s.gamma), 1e-14);
        EXPECT_LT(std::abs(r.t_amp + 1.0), 1e-14);
        EXPECT_NEAR(r.eta, 1.0, 1e-14);
    }
}

TEST(Response, DecoupledMechanicsCoupledCavities)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const SystemParams s = decoupled(-2.0 + 4.0 * u(rng), 2.0 * u(rng));
        const DriveParams d = make_drive(s, 1e-6, (u(rng) * 2 - 1) * s.omega_m, (u(rng) * 4 - 2) * s.omega_m);
        const ProbeResponse r = probe_response(s, d, solve_steady_state(s, d));
        // two driven-damped modes: solve the 2x2 system by Cramer's rule
        const cplx L1 = s.gamma + I * d.Delta_L - I * d.xi;
        const cplx L2 = -s.kappa + I * d.Delta_L - I * d.xi;
        const cplx a1 = d.eps_p * L2 / (L1 * L2 + s.J_coupling * s.J_coupling);
        EXPECT_LT(rel(r.da1_plus, a1), 1e-12);
    }
}

TEST(Response, SingleCavityReduction)
{
    for (double DL_over_wm : {1.0, 0.0, -1.0, 0.3}) {
        for (double P : {1e-6, 10e-6}) {
            const SystemParams s = preset::paper_system(0.5, 0.0);
            const DriveParams base = make_drive(s, P, DL_over_wm * s.omega_m, 0.0);
            const SteadyState ss = solve_steady_state(s, base);
            for (int k = -20; k <= 20; ++k) {
                const DriveParams d = with_probe_detuning(base, s, 0.1 * k * s.omega_m);
                const ProbeResponse r = probe_response(s, d, ss);
                EXPECT_LT(rel(r.da1_plus, single_cavity_A(s, d, ss)), 1e-12) << DL_over_wm << " " << k;
            }
        }
    }
}

TEST(Response, TwoPathAgreementRandom)
{
    for (const auto& p : random_points(1000, 19)) {
        const ProbeResponse r = probe_response(p.sys, p.drive, p.ss);
        const SidebandAmplitudes s = sideband_amplitudes_direct(p.sys, p.drive, p.ss);
        EXPECT_LT(rel(s.da1_plus, r.da1_plus), 1e-12);
        const double scale_a = std::max({std::abs(r.da1_plus), std::abs(r.da2_plus), std::abs(r.da1_minus)});
        EXPECT_LE(std::abs(s.da2_plus - r.da2_plus), 1e-12 * scale_a);
        EXPECT_LE(std::abs(s.da1_minus - r.da1_minus), 1e-12 * scale_a);
        EXPECT_LE(std::abs(s.da2_minus - r.da2_minus), 1e-12 * scale_a);
        if (std::abs(r.dx_plus) > 0.0) {
            EXPECT_LT(rel(s.dx_plus, r.dx_plus), 1e-12);
            EXPECT_LT(rel(s.dx_minus, r.dx_minus), 1e-12);
        }
    }
}

TEST(Response, ProbeAmplitudeInvariance)
{
    for (const auto& p : random_points(100, 5)) {
        const ProbeResponse r1 = probe_response(p.sys, p.drive, p.ss);
        for (double scale : {1e-3, 1.0, 1e3}) {
            DriveParams d = p.drive;
            d.eps_p *= scale;
            const ProbeResponse r = probe_response(p.sys, d, p.ss);
            EXPECT_LT(rel(r.t_amp, r1.t_amp), 1e-10);
            EXPECT_LT(std::abs(r.eta - r1.eta) / r1.eta, 1e-10);
            EXPECT_LT(std::abs(r.phase - r1.phase), 1e-10);
            EXPECT_LT(rel(r.da1_plus, scale * r1.da1_plus), 1e-12);
            EXPECT_LT(rel(r.dx_plus, scale * r1.dx_plus), 1e-12);
            EXPECT_LT(rel(r.da1_minus, scale * r1.da1_minus), 1e-12);
        }
    }
}

TEST(Response, EtaAndPhaseConsistency)
{
    for (const auto& p : random_points(200, 23)) {
        const ProbeResponse r = probe_response(p.sys, p.drive, p.ss);
        EXPECT_EQ(r.eta, std::norm(r.t_amp));
        EXPECT_GT(r.phase, -std::numbers::pi);
        EXPECT_LE(r.phase, std::numbers::pi);
        EXPECT_LT(std::abs(r.t_amp - (1.0 - 2.0 * p.sys.gamma * r.da1_plus / p.drive.eps_p)), 1e-14);
    }
    EXPECT_EQ(principal_arg(cplx(-1.0, -0.0)), std::numbers::pi);
}

TEST(Response, SpectrumSinglePointMatchesProbeResponse)
{
    const SystemParams s = preset::paper_system();
    const DriveParams d = preset::paper_drive(s);
    const auto pts = spectrum(s, d, {0.0});
    ASSERT_EQ(pts.size(), 1u);
    const ProbeResponse r = probe_response(s, d, solve_steady_state(s, d));
    EXPECT_EQ(pts[0].eta, r.eta);
    EXPECT_EQ(pts[0].phase, r.phase);
    EXPECT_EQ(pts[0].t_re, r.t_amp.real());
    EXPECT_EQ(pts[0].t_im, r.t_amp.imag());
}

TEST(Response, SpectrumParallelMatchesSerial)
{
    const SystemParams s = preset::paper_system(1.5);
    const DriveParams d = preset::paper_drive(s);
    std::vector<double> grid;
    for (int i = -500; i <= 500; ++i)
        grid.push_back(i * 0.004 * s.omega_m);
    const auto a = spectrum(s, d, grid, 1);
    const auto b = spectrum(s, d, grid, 8);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_EQ(a[i].eta, b[i].eta);
        EXPECT_EQ(a[i].phase, b[i].phase);
    }
    // unwrapped: no jumps near 2 pi between neighbours
    for (std::size_t i = 1; i < a.size(); ++i)
        EXPECT_LT(std::abs(a[i].phase - a[i - 1].phase), std::numbers::pi);
}

TEST(Response, SpectrumSingularityCarriesDetuning)
{
    // J = 0, g = 0, kappa = 0: the second mode is undamped and the probe on
    // its resonance makes the sideband denominator vanish
    const SystemParams s = decoupled(0.0, 0.0);
    const DriveParams d = make_drive(s, 1e-6, s.omega_m, 0.0);
    try {
        spectrum(s, d, {0.5 * s.gamma, 0.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::response_singularity);
        EXPECT_NE(std::string(e.what()).find("Delta_p"), std::string::npos) << e.what();
    }
}

TEST(Response, GroupDelayMatchesAmplitudeDerivative)
{
    for (double k : {-1.0, 0.2, 0.5, 1.5}) {
        for (double P : {1e-6, 10e-6}) {
            const SystemParams s = preset::paper_system(k);
            const DriveParams d = preset::paper_drive(s, P);
            const SteadyState ss = solve_steady_state(s, d);
            // d arg t / d omega = Im(t'/t), with t' from a central difference of t
            const double h = 1e-4 * s.Gamma_m;
            auto t_at = [&](double dp) { return probe_response(s, with_probe_detuning(d, s, dp), ss).t_amp; };
            const cplx t0 = t_at(0.0);
            const cplx dt = (t_at(h) - t_at(-h)) / (2.0 * h);
            const double ref = (dt / t0).imag();
            EXPECT_LT(std::abs(group_delay(s, d) - ref), 1e-5 * std::abs(ref)) << k << " " << P;
        }
    }
}

TEST(Response, PassivePassiveSlowLight)
{
    const SystemParams s = preset::paper_system(-1.0);
    for (int i = 0; i < 50; ++i) {
        const double P = 0.5e-6 * std::pow(40.0, i / 49.0);
        EXPECT_GT(group_delay(s, preset::paper_drive(s, P)), 0.0) << P;
    }
}

TEST(Response, DelaySignFlipsAcrossBalanceAtZeroDetuning)
{
    auto tau = [](double k) {
        const SystemParams s = preset::paper_system(k);
        return group_delay(s, make_drive(s, 10e-6, 0.0, 0.0));
    };
    EXPECT_LT(tau(0.9) * tau(1.1), 0.0) << tau(0.9) << " " << tau(1.1);
}

TEST(Response, EtaApproxClosedForms)
{
    SystemParams s = preset::paper_system(0.0);
    SteadyState ss;
    ss.n1 = 1e8;
    EXPECT_DOUBLE_EQ(eta_approx(s, ss), 1.0);

    for (double k : {0.3, -0.7, 1.4}) {
        s = preset::paper_system(k);
        ss.n1 = 0.0;
        const double kg = s.kappa * s.gamma;
        const double J2 = s.J_coupling * s.J_coupling;
        const double expect = std::pow((J2 + kg) / (J2 - kg), 2);
        EXPECT_LT(std::abs(eta_approx(s, ss) - expect) / expect, 1e-12);
    }

    s = preset::paper_system(1.0);
    try {
        eta_approx(s, ss);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::division_by_zero);
    }
}
