#ifndef PTOMIT_CUBIC_HPP
#define PTOMIT_CUBIC_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace ptomit {

// c3 x^3 + c2 x^2 + c1 x + c0 with real coefficients.
struct CubicPoly {
    double c3 = 0.0;
    double c2 = 0.0;
    double c1 = 0.0;
    double c0 = 0.0;

    double operator()(double x) const { return ((c3 * x + c2) * x + c1) * x + c0; }
    double derivative(double x) const { return (3.0 * c3 * x + 2.0 * c2) * x + c1; }
};

namespace detail {

inline double polish_root(const CubicPoly& p, double x)
{
    for (int it = 0; it < 8; ++it) {
        const double d = p.derivative(x);
        if (d == 0.0)
            break;
        const double step = p(x) / d;
        if (!std::isfinite(step))
            break;
        x -= step;
        if (std::abs(step) <= 1e-15 * std::abs(x))
            break;
    }
    return x;
}

// Real roots of the monic cubic y^3 + a y^2 + b y + c, coefficients O(1).
inline std::vector<double> monic_cubic_roots(double a, double b, double c)
{
    constexpr double pi = std::numbers::pi;
    const double shift = a / 3.0;
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double disc = 0.25 * q * q + p * p * p / 27.0;

    std::vector<double> y;
    if (p == 0.0 && q == 0.0) {
        y = {0.0};
    } else if (disc > 0.0) {
        // one real root; pick the cube-root branch that avoids cancellation
        const double big = std::cbrt(std::abs(0.5 * q) + std::sqrt(disc));
        const double u = q > 0.0 ? -big : big;
        const double v = u != 0.0 ? -p / (3.0 * u) : 0.0;
        y = {u + v};
    } else {
        const double r = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        y = {r * std::cos(phi), r * std::cos(phi - 2.0 * pi / 3.0), r * std::cos(phi - 4.0 * pi / 3.0)};
    }
    for (double& v : y)
        v -= shift;
    return y;
}

} // namespace detail

// All distinct real roots, ascending. Closed form (trigonometric or Cardano)
// on a rescaled monic cubic, then Newton-polished on the original
// polynomial. Degenerate leading coefficients fall back to the quadratic or
// linear case; the zero polynomial has no isolated roots and yields {}.
inline std::vector<double> real_roots(const CubicPoly& poly)
{
    std::vector<double> roots;
    if (poly.c3 != 0.0) {
        const double a = poly.c2 / poly.c3;
        const double b = poly.c1 / poly.c3;
        const double c = poly.c0 / poly.c3;
        const double scale = std::max({std::abs(a), std::sqrt(std::abs(b)), std::cbrt(std::abs(c))});
        if (scale == 0.0) {
            roots = {0.0};
        } else {
            roots = detail::monic_cubic_roots(a / scale, b / (scale * scale), c / (scale * scale * scale));
            for (double& r : roots)
                r *= scale;
        }
    } else if (poly.c2 != 0.0) {
        const double disc = poly.c1 * poly.c1 - 4.0 * poly.c2 * poly.c0;
        if (disc >= 0.0) {
            const double s = std::sqrt(disc);
            const double qq = -0.5 * (poly.c1 + (poly.c1 >= 0.0 ? s : -s));
            if (qq != 0.0)
                roots = {qq / poly.c2, poly.c0 / qq};
            else
                roots = {0.0};
        }
    } else if (poly.c1 != 0.0) {
        roots = {-poly.c0 / poly.c1};
    }

    for (double& r : roots)
        r = detail::polish_root(poly, r);
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double l, double r) {
                                return std::abs(l - r) <= 1e-12 * std::max(std::abs(l), std::abs(r));
                            }),
                roots.end());
    return roots;
}

} // namespace ptomit

#endif // PTOMIT_CUBIC_HPP
