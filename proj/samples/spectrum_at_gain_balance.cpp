// Prints a coarse transmission spectrum at the gain/loss balance point and
// the group delay on resonance.

#include <cstdio>

#include "ptomit/ptomit.hpp"

int main()
{
    using namespace ptomit;
    const SystemParams sys = preset::paper_system(1.0, 1.0);
    const DriveParams drive = preset::paper_drive(sys, 10e-6);

    const auto pt = classify(sys, drive.Delta_L);
    std::printf("phase label: %s, unstable: %s\n", std::string(to_string(pt.phase_label)).c_str(),
                pt.unstable ? "yes" : "no");

    std::vector<double> grid;
    for (int i = -20; i <= 20; ++i)
        grid.push_back(0.1 * i * sys.omega_m);
    for (const auto& p : spectrum(sys, drive, grid))
        std::printf("%+6.2f  eta = %-12.6g phase = %+.6f\n", p.Delta_p / sys.omega_m, p.eta, p.phase);

    std::printf("tau_g at resonance: %.6g s\n", group_delay(sys, drive));
}
