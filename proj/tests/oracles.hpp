// Independent oracles used by the test suites: quadrature of closed-form
// characteristic integrals, Bessel-root eigenvalue references, and radial
// closed forms for the cross-section correctors. These deliberately avoid
// the solver code paths they are used to check.
#pragma once

#include <cmath>
#include <functional>

namespace oracles {

// Composite 16-point Gauss-Legendre quadrature.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        int panels = 24) {
    static const double xg[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                 0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                 0.9445750230732326, 0.9894009349916499};
    static const double wg[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                 0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                 0.0622535239386479, 0.0271524594117541};
    double acc = 0.0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double c = a + (p + 0.5) * h, s = 0.5 * h;
        for (int g = 0; g < 8; ++g)
            acc += s * wg[g] * (f(c + s * xg[g]) + f(c - s * xg[g]));
    }
    return acc;
}

// First positive root of J1'(x) ... the derivative of the first-order Bessel
// function, via bisection on J1'(x) = (J0(x) - J2(x))/2.
inline double bessel_j1_prime_root() {
    auto d = [](double x) { return 0.5 * (std::cyl_bessel_j(0, x) - std::cyl_bessel_j(2, x)); };
    double lo = 1.2, hi = 2.4;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (d(lo) * d(mid) <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

// Radial solution of  Laplace(u) = 4a/r0^2-normalized constant problems:
// u(rho) = a (rho^2 - r0^2/2) solves Laplace(u) = 4a with du/drho(r0) = 2 a r0
// and zero mean on the disk of radius r0.
inline double radial_quadratic(double a, double rho, double r0) {
    return a * (rho * rho - 0.5 * r0 * r0);
}

} // namespace oracles
