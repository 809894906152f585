#include <doctest.h>

#include <cmath>

#include "thincyl/numerics.hpp"

using namespace thincyl;

TEST_CASE("fourth-order stencils are exact on quartics") {
    const double h = 0.1;
    const std::size_t n = 12;
    Vec f(n);
    auto poly = [](double x) { return 1.0 + x * (2.0 + x * (-3.0 + x * (0.5 + 0.25 * x))); };
    auto d1 = [](double x) { return 2.0 + x * (-6.0 + x * (1.5 + x)); };
    auto d2 = [](double x) { return -6.0 + x * (3.0 + 3.0 * x); };
    for (std::size_t i = 0; i < n; ++i) f[i] = poly(h * static_cast<double>(i));
    const Vec g1 = deriv1_uniform(f, h);
    const Vec g2 = deriv2_uniform(f, h);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = h * static_cast<double>(i);
        CHECK(g1[i] == doctest::Approx(d1(x)).epsilon(1e-11));
        CHECK(g2[i] == doctest::Approx(d2(x)).epsilon(1e-9));
    }
}

TEST_CASE("fourth-order stencils converge at the right rates") {
    auto run = [](std::size_t n) {
        const double h = 1.0 / static_cast<double>(n - 1);
        Vec f(n);
        for (std::size_t i = 0; i < n; ++i) f[i] = std::sin(3.0 * h * static_cast<double>(i));
        const Vec g = deriv1_uniform(f, h);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            err = std::max(err, std::abs(g[i] - 3.0 * std::cos(3.0 * h * static_cast<double>(i))));
        return err;
    };
    const double e1 = run(33), e2 = run(65);
    CHECK(std::log2(e1 / e2) > 3.5);
}

TEST_CASE("not-a-knot spline reproduces cubics exactly") {
    Vec x = {0.0, 0.17, 0.3, 0.55, 0.8, 1.0};
    Vec y(x.size());
    auto cubic = [](double t) { return 2.0 - t * (1.0 + t * (4.0 - 2.5 * t)); };
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = cubic(x[i]);
    CubicSpline s(x, y);
    for (double t = 0.0; t <= 1.0; t += 0.013)
        CHECK(s.value(t) == doctest::Approx(cubic(t)).epsilon(1e-12));
}

TEST_CASE("spline interpolation error is fourth order on smooth data") {
    auto run = [](std::size_t n) {
        Vec x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<double>(i) / static_cast<double>(n - 1);
            y[i] = std::exp(std::sin(5.0 * x[i]));
        }
        CubicSpline s(x, y);
        double err = 0.0;
        for (double t = 0.0; t <= 1.0; t += 1e-3)
            err = std::max(err, std::abs(s.value(t) - std::exp(std::sin(5.0 * t))));
        return err;
    };
    const double e1 = run(65), e2 = run(129);
    CHECK(std::log2(e1 / e2) > 3.4);
}

TEST_CASE("uniform cubic field interpolation and partials") {
    UniformAxis ax{0.0, 0.05, 41};
    UniformAxis at{0.0, 0.02, 51};
    GridField2D f(ax, at);
    auto fn = [](double x, double t) { return std::sin(2 * x + 1) * std::cos(3 * t); };
    for (std::size_t k = 0; k < at.count; ++k)
        for (std::size_t i = 0; i < ax.count; ++i)
            f.at(i, k) = fn(ax.origin + ax.step * static_cast<double>(i),
                            at.origin + at.step * static_cast<double>(k));
    const double x = 0.777, t = 0.33;
    CHECK(f.value(x, t) == doctest::Approx(fn(x, t)).epsilon(1e-5));
    CHECK(f.ddx(x, t) == doctest::Approx(2 * std::cos(2 * x + 1) * std::cos(3 * t)).epsilon(2e-3));
    CHECK(f.ddt(x, t) == doctest::Approx(-3 * std::sin(2 * x + 1) * std::sin(3 * t)).epsilon(2e-3));
}

TEST_CASE("smoothstep junction values") {
    CHECK(smoothstep5(0.0) == 0.0);
    CHECK(smoothstep5(1.0) == 1.0);
    CHECK(smoothstep5(0.5) == doctest::Approx(0.5));
    CHECK(smoothstep5_d1(0.0) == 0.0);
    CHECK(smoothstep5_d2(1.0) == 0.0);
    CHECK(smoothstep9(0.5) == doctest::Approx(0.5));
    CHECK(smoothstep9_d1(1.0) == 0.0);
}

TEST_CASE("line fit recovers slope and residual") {
    Vec x = {0, 1, 2, 3}, y = {1.0, 3.0, 5.0, 7.2};
    const LineFit fit = fit_line(x, y);
    CHECK(fit.slope == doctest::Approx(2.06).epsilon(1e-12));
    CHECK(fit.max_residual < 0.2);
}
