#include <gtest/gtest.h>

#include <random>

#include "ptomit/steady_state.hpp"

using namespace ptomit;

namespace {

const cplx I(0.0, 1.0);

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Fixed-point map x -> (hbar g/(m wm^2)) |a1(x)|^2 written out from the
// time-independent equations, independent of the cubic.
double fixed_point_map(const SystemParams& s, const DriveParams& d, double x)
{
    const cplx a2_over_a1 = I * s.J_coupling / (I * d.Delta_L - s.kappa);
    // 0 = (-i DL + i g x - gamma) a1 + i J a2 + E_L
    const cplx coeff = -I * d.Delta_L + I * s.g_om * x - s.gamma + I * s.J_coupling * a2_over_a1;
    const cplx a1 = -d.E_L / coeff;
    return s.constants.hbar * s.g_om / (s.m_eff * s.omega_m * s.omega_m) * std::norm(a1);
}

std::vector<double> scan_fixed_points(const SystemParams& s, const DriveParams& d)
{
    const double guess = fixed_point_map(s, d, 0.0);
    const double hi = 10.0 * guess;
    const int n = 1000000;
    auto f = [&](double x) { return fixed_point_map(s, d, x) - x; };
    std::vector<double> roots;
    double xa = 0.0, fa = f(0.0);
    for (int i = 1; i <= n; ++i) {
        const double xb = hi * i / n;
        const double fb = f(xb);
        if ((fa > 0) != (fb > 0)) {
            double lo = xa, up = xb, flo = fa;
            for (int k = 0; k < 200 && up - lo > 1e-18 * up; ++k) {
                const double mid = 0.5 * (lo + up);
                const double fm = f(mid);
                if ((fm > 0) == (flo > 0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    up = mid;
                }
            }
            roots.push_back(0.5 * (lo + up));
        }
        xa = xb;
        fa = fb;
    }
    return roots;
}

SystemParams paper(double k = 0.5, double J = 1.0) { return preset::paper_system(k, J); }

SystemParams decoupled(double kappa_over_gamma, double J_over_gamma)
{
    SystemParams s = paper(kappa_over_gamma, J_over_gamma);
    s.R.reset();
    s.g_om = 0.0;
    return derive_params(s);
}

} // namespace

TEST(Cubic, KnownRoots)
{
    const auto r = real_roots({1.0, -6.0, 11.0, -6.0});
    ASSERT_EQ(r.size(), 3u);
    EXPECT_NEAR(r[0], 1.0, 1e-14);
    EXPECT_NEAR(r[1], 2.0, 1e-14);
    EXPECT_NEAR(r[2], 3.0, 1e-14);
    const auto one = real_roots({1.0, 0.0, 1.0, -2.0});
    ASSERT_EQ(one.size(), 1u);
    EXPECT_NEAR(one[0], 1.0, 1e-14);
    const auto lin = real_roots({0.0, 0.0, 4.0, -2.0});
    ASSERT_EQ(lin.size(), 1u);
    EXPECT_NEAR(lin[0], 0.5, 1e-15);
}

TEST(Cubic, NoDriveOnlyZeroRoot)
{
    const SystemParams s = paper();
    const DriveParams d = make_drive(s, 0.0, s.omega_m, 0.0);
    EXPECT_EQ(cubic_coefficients(s, d).c0, 0.0);
    EXPECT_EQ(steady_state_roots(s, d), std::vector<double>{0.0});
}

TEST(Cubic, DecoupledMechanicsReducesToLinear)
{
    const SystemParams s = decoupled(0.5, 1.0);
    const DriveParams d = preset::paper_drive(s);
    const CubicPoly p = cubic_coefficients(s, d);
    EXPECT_EQ(p.c3, 0.0);
    EXPECT_EQ(p.c2, 0.0);
    EXPECT_EQ(p.c0, 0.0);
    EXPECT_EQ(steady_state_roots(s, d), std::vector<double>{0.0});
}

TEST(Cubic, RootsSatisfyDefiningIdentity)
{
    for (double k : {-1.0, 0.2, 0.5, 1.5}) {
        const SystemParams s = paper(k);
        for (double P : {1e-6, 10e-6, 20e-6}) {
            const DriveParams d = preset::paper_drive(s, P);
            const double K = s.constants.hbar * s.g_om / (s.m_eff * s.omega_m * s.omega_m) * d.E_L * d.E_L *
                             std::norm(I * d.Delta_L - s.kappa);
            for (double r : steady_state_roots(s, d)) {
                const cplx D = (I * d.Delta_L - s.kappa) * (s.gamma + I * d.Delta_L - I * s.g_om * r) +
                               s.J_coupling * s.J_coupling;
                EXPECT_LT(rel(r * std::norm(D), K), 1e-9);
            }
        }
    }
}

TEST(Cubic, RootsMatchFixedPointScan)
{
    const SystemParams s = paper(0.5);
    const DriveParams d = preset::paper_drive(s);
    const auto scan = scan_fixed_points(s, d);
    const auto roots = steady_state_roots(s, d);
    ASSERT_EQ(scan.size(), roots.size());
    for (std::size_t i = 0; i < scan.size(); ++i)
        EXPECT_LT(rel(roots[i], scan[i]), 1e-9);
}

TEST(SteadyState, PaperPresetMatchesFixedPointScan)
{
    const SystemParams s = paper(0.5);
    const DriveParams d = preset::paper_drive(s);
    const auto scan = scan_fixed_points(s, d);
    ASSERT_FALSE(scan.empty());
    const SteadyState ss = solve_steady_state(s, d);
    EXPECT_LT(rel(ss.x_s, scan.front()), 1e-6);
    EXPECT_LE(ss.residual, 1e-10);
}

TEST(SteadyState, NoPump)
{
    const SystemParams s = paper();
    const SteadyState ss = solve_steady_state(s, make_drive(s, 0.0, s.omega_m, 0.0));
    EXPECT_EQ(ss.x_s, 0.0);
    EXPECT_EQ(ss.a1_s, cplx(0.0));
    EXPECT_EQ(ss.a2_s, cplx(0.0));
    EXPECT_EQ(ss.n1, 0.0);
    EXPECT_EQ(ss.n2, 0.0);
}

TEST(SteadyState, DecoupledClosedForm)
{
    // Delta_L = 0, kappa = -gamma, J = gamma: a1 = E_L gamma / (gamma^2 + gamma^2)
    const SystemParams s = decoupled(-1.0, 1.0);
    const DriveParams d = make_drive(s, 10e-6, 0.0, 0.0);
    const SteadyState ss = solve_steady_state(s, d);
    EXPECT_EQ(ss.x_s, 0.0);
    const cplx a1 = d.E_L / (2.0 * s.gamma);
    const cplx a2 = I * s.J_coupling * d.E_L / (2.0 * s.gamma * s.gamma);
    EXPECT_LT(std::abs(ss.a1_s - a1) / std::abs(a1), 1e-12);
    EXPECT_LT(std::abs(ss.a2_s - a2) / std::abs(a2), 1e-12);
    EXPECT_EQ(ss.n1, std::norm(ss.a1_s));
    EXPECT_EQ(ss.n2, std::norm(ss.a2_s));
}

TEST(SteadyState, LasingThresholdReported)
{
    // kappa gamma = J^2 at Delta_L = 0 makes D(0) vanish
    const SystemParams s = decoupled(1.0, 1.0);
    try {
        solve_steady_state(s, make_drive(s, 10e-6, 0.0, 0.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::lasing_threshold);
    }
}

TEST(SteadyState, RandomBackSubstitution)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        SystemParams s = paper(-2.0 + 4.0 * u(rng), 2.0 * u(rng));
        const double DL = (-2.0 + 4.0 * u(rng)) * s.omega_m;
        const double P = 1e-8 * std::pow(2e3, u(rng));
        const DriveParams d = make_drive(s, P, DL, 0.0);
        SteadyState ss;
        try {
            ss = solve_steady_state(s, d);
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::lasing_threshold);
            continue;
        }
        ++checked;
        EXPECT_GE(ss.x_s, 0.0);
        EXPECT_LE(ss.residual, 1e-10);
        // right-hand sides of the steady-state relations, evaluated here
        const cplx D = (I * DL - s.kappa) * (s.gamma + I * DL - I * s.g_om * ss.x_s) + s.J_coupling * s.J_coupling;
        const cplx a1 = d.E_L * (I * DL - s.kappa) / D;
        const cplx a2 = I * s.J_coupling * d.E_L / D;
        const double x = s.constants.hbar * s.g_om / (s.m_eff * s.omega_m * s.omega_m) * std::norm(a1);
        EXPECT_LE(std::abs(a1 - ss.a1_s), 1e-10 * std::abs(a1));
        EXPECT_LE(std::abs(a2 - ss.a2_s), 1e-10 * std::max(std::abs(a2), 1e-300));
        EXPECT_LE(std::abs(x - ss.x_s), 1e-10 * x);
    }
    EXPECT_GT(checked, 900);
}

TEST(SteadyState, MonotoneOnsetForPassiveSecondResonator)
{
    for (double k : {-1.0, -0.5, 0.0}) {
        const SystemParams s = paper(k);
        double prev = -1.0;
        for (int i = 0; i < 50; ++i) {
            const double P = 20e-6 * i / 49.0;
            const double x = solve_steady_state(s, preset::paper_drive(s, P)).x_s;
            EXPECT_GE(x, prev) << "kappa/gamma = " << k << ", P = " << P;
            prev = x;
        }
    }
}

TEST(SteadyState, AmplitudeScaling)
{
    const SystemParams s = paper();
    const DriveParams d1 = preset::paper_drive(s, 1e-6);
    const DriveParams d4 = preset::paper_drive(s, 4e-6); // E_L doubles
    EXPECT_LT(rel(cubic_coefficients(s, d4).c0, 4.0 * cubic_coefficients(s, d1).c0), 1e-14);

    const SystemParams z = decoupled(0.5, 1.0);
    const double a = std::abs(solve_steady_state(z, preset::paper_drive(z, 1e-6)).a1_s);
    const double b = std::abs(solve_steady_state(z, preset::paper_drive(z, 4e-6)).a1_s);
    EXPECT_LT(rel(b, 2.0 * a), 1e-14);
}
