#ifndef PTOMIT_PT_PHASE_HPP
#define PTOMIT_PT_PHASE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string_view>

#include "ptomit/params.hpp"

namespace ptomit {

enum class PtPhase { symmetric, broken, exceptional };

inline std::string_view to_string(PtPhase p)
{
    switch (p) {
    case PtPhase::symmetric: return "symmetric";
    case PtPhase::broken: return "broken";
    case PtPhase::exceptional: return "exceptional";
    }
    return "unknown";
}

struct PtClassification {
    std::complex<double> lambda_plus;
    std::complex<double> lambda_minus;
    double discriminant = 0.0; // J^2 - ((kappa + gamma)/2)^2
    PtPhase phase_label = PtPhase::symmetric;
    bool unstable = false;     // some supermode grows or is undamped
};

// Supermodes of the two optical modes without drive or mechanics, i.e. the
// eigenvalues of [[-(gamma + i Delta_L), iJ], [iJ, kappa - i Delta_L]].
inline PtClassification classify(const SystemParams& sys, double Delta_L)
{
    using cplx = std::complex<double>;
    const cplx I(0.0, 1.0);
    const double half_sum = 0.5 * (sys.kappa + sys.gamma);
    const double J = sys.J_coupling;

    PtClassification c;
    c.discriminant = J * J - half_sum * half_sum;
    const cplx center = 0.5 * (sys.kappa - sys.gamma) - I * Delta_L;
    // sqrt(half_sum^2 - J^2) = sqrt(-discriminant)
    const cplx split = c.discriminant > 0.0 ? I * std::sqrt(c.discriminant) : cplx(std::sqrt(-c.discriminant));
    c.lambda_plus = center + split;
    c.lambda_minus = center - split;

    const double tol = 1e-9 * sys.gamma * sys.gamma;
    if (std::abs(c.discriminant) <= tol)
        c.phase_label = PtPhase::exceptional;
    else
        c.phase_label = c.discriminant > 0.0 ? PtPhase::symmetric : PtPhase::broken;
    c.unstable = std::max(c.lambda_plus.real(), c.lambda_minus.real()) >= 0.0;
    return c;
}

// Gain at which the supermodes coalesce, 2J - gamma. Empty when that gain
// would be negative (2J < gamma): no amount of gain reaches the boundary.
inline std::optional<double> phase_boundary(double gamma, double J)
{
    const double k = 2.0 * J - gamma;
    if (k < 0.0)
        return std::nullopt;
    return k;
}

} // namespace ptomit

#endif // PTOMIT_PT_PHASE_HPP
