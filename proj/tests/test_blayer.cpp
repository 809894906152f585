#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace thincyl;

namespace {

// layer-bearing benchmark; the angular variant adds an odd-in-xi2 interaction
// component so the first fluctuating mode is populated
struct LayerFixture : fixtures::Pipeline {
    explicit LayerFixture(bool angular, int n = 160, int nxi = 24, int modes = 12)
        : fixtures::Pipeline(angular ? fixtures::angular_layer_config()
                                     : builtin_scenarios("axisym-robin"),
                             n, nxi, modes) {}
};

} // namespace

TEST_CASE("pi0 evaluator reproduces the explicit solution") {
    const LayerFixture fx(false, 96, 16, 6);
    // Phi0(t) exp(-v1 zeta) with v1 = 1 on this benchmark; sample at a grid
    // time so the stored trace is exact
    const std::size_t kt = (7 * fx.lim.w0.nt()) / 10;
    const double t = fx.lim.w0.taxis().step * static_cast<double>(kt);
    const double phi0 = fx.cfg.boundary.q(t) - fx.lim.w0.at(fx.lim.w0.nx() - 1, kt);
    CHECK(pi0_eval(0.0, t, fx.layer) == doctest::Approx(phi0).epsilon(1e-12));
    CHECK(pi0_eval(std::log(2.0), t, fx.layer) == doctest::Approx(0.5 * phi0).epsilon(1e-12));
    CHECK(pi0_eval(3.0, t, fx.layer) == doctest::Approx(phi0 * std::exp(-3.0)).epsilon(1e-12));
    CHECK(pi0_eval(2.0, 0.0, fx.layer) == 0.0);
}

TEST_CASE("pi0 decay rate is the right-end speed") {
    const LayerFixture fx(false, 96, 16, 6);
    auto amp = [&](double z) {
        double m = 0.0;
        for (int k = 0; k <= 32; ++k)
            m = std::max(m, std::abs(pi0_eval(z, fx.lim.T1_observed * k / 32.0, fx.layer)));
        return m;
    };
    const DecayFit fit = decay_rate(amp, 1.0, 20.0);
    CHECK_FALSE(fit.numerically_zero);
    CHECK(fit.rate == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("pi1-hat satisfies its half-line ODE under finite differences") {
    const LayerFixture fx(false, 160, 16, 6);
    const double h = 0.004;
    double worst = 0.0;
    for (double zeta : {0.3, 1.0, 2.5, 5.0})
        for (int k = 2; k <= 8; ++k) {
            const double t = fx.lim.T1_observed * k / 8.0;
            const double v = fx.layer.v1_right(t);
            auto f = [&](double z) { return pi1_hat_eval(z, t, fx.layer); };
            const double d1 =
                (f(zeta - 2 * h) - 8 * f(zeta - h) + 8 * f(zeta + h) - f(zeta + 2 * h)) /
                (12 * h);
            const double d2 = (-f(zeta - 2 * h) + 16 * f(zeta - h) - 30 * f(zeta) +
                               16 * f(zeta + h) - f(zeta + 2 * h)) /
                              (12 * h * h);
            // d/dt Pi0 with the analytic Phi0'
            const double dpi0 = fx.layer.dPhi0(t) * std::exp(-v * zeta) -
                                fx.layer.Phi0(t) * fx.layer.dv1_right(t) * zeta *
                                    std::exp(-v * zeta);
            worst = std::max(worst, std::abs(d2 + v * d1 - dpi0));
        }
    CHECK(worst <= 1e-8);
}

TEST_CASE("all layer traces vanish at t = 0") {
    const LayerFixture fx(true, 128, 24, 10);
    const BoundaryLayerTerm pi1t = pi1_tilde_build(fx.layer);
    const BoundaryLayerTerm pi2 = pi2_build(fx.layer, pi1t);
    CHECK(std::abs(pi0_eval(0.5, 0.0, fx.layer)) < 1e-8);
    CHECK(std::abs(pi1_hat_eval(0.5, 0.0, fx.layer)) < 1e-8);
    Vec nodal;
    pi1t.values_all_nodes(0.5, 0.0, nodal);
    for (double v : nodal) CHECK(std::abs(v) < 1e-8);
    pi2.values_all_nodes(0.5, 0.0, nodal);
    for (double v : nodal) CHECK(std::abs(v) < 1e-8);
}

TEST_CASE("pi1-tilde trace reproduces the cell datum exactly at zeta = 0") {
    const LayerFixture fx(true, 128, 24, 10);
    const BoundaryLayerTerm pi1t = pi1_tilde_build(fx.layer);
    Vec nodal;
    for (std::size_t k = 0; k < fx.layer.t_cell.count; k += 7) {
        const double t = fx.layer.t_cell.step * static_cast<double>(k);
        pi1t.values_all_nodes(0.0, t, nodal);
        for (std::size_t j = 0; j < nodal.size(); ++j)
            CHECK(nodal[j] == doctest::Approx(fx.layer.phi1_tilde[k][j]).epsilon(1e-10).scale(
                                  1.0));
    }
}

TEST_CASE("single-mode datum produces a single-mode layer term") {
    LayerFixture fx(false, 96, 20, 8);
    // overwrite the fluctuating trace with the first eigenfunction
    for (auto& slice : fx.layer.phi1_tilde) slice = fx.basis.theta[1];
    const BoundaryLayerTerm pi1t = pi1_tilde_build(fx.layer);
    const double t = 0.5 * fx.lim.T1_observed;
    Vec nodal;
    pi1t.values_all_nodes(0.0, t, nodal);
    for (std::size_t j = 0; j < nodal.size(); ++j)
        CHECK(nodal[j] == doctest::Approx(fx.basis.theta[1][j]).epsilon(1e-7).scale(1.0));
    // decay at the first-mode rate: v/2 + sqrt(v^2/4 + lambda1)
    auto amp = [&](double z) { return pi1t.max_abs(z); };
    const DecayFit fit = decay_rate(amp, 1.0, 6.0);
    const double kappa = 0.5 + std::sqrt(0.25 + fx.basis.lambda[1]);
    CHECK(fit.rate == doctest::Approx(kappa).epsilon(0.01));
}

TEST_CASE("angular benchmark decays at the certified first-mode rate") {
    const LayerFixture fx(true, 128, 32, 16);
    const BoundaryLayerTerm pi1t = pi1_tilde_build(fx.layer);
    const DecayFit fit = decay_rate([&](double z) { return pi1t.max_abs(z); }, 1.0, 5.0);
    CHECK_FALSE(fit.numerically_zero);
    const double j11 = oracles::bessel_j1_prime_root();
    const double kappa0 = 0.5 + std::sqrt(0.25 + j11 * j11);
    CHECK(std::abs(fit.rate - kappa0) / kappa0 < 0.05);
    CHECK(pi1t.certified_rate() ==
          doctest::Approx(0.5 + std::sqrt(0.25 + fx.basis.lambda[1])));
}

TEST_CASE("pi2 trace equals the second-corrector datum and decays") {
    const LayerFixture fx(true, 128, 24, 10);
    const BoundaryLayerTerm pi1t = pi1_tilde_build(fx.layer);
    const BoundaryLayerTerm pi2 = pi2_build(fx.layer, pi1t);
    Vec nodal;
    for (std::size_t k = 2; k < fx.layer.t_cell.count; k += 11) {
        const double t = fx.layer.t_cell.step * static_cast<double>(k);
        pi2.values_all_nodes(0.0, t, nodal);
        for (std::size_t j = 0; j < nodal.size(); j += 17)
            CHECK(nodal[j] == doctest::Approx(fx.layer.phi2[k][j]).epsilon(1e-9).scale(1.0));
    }
    const DecayFit fit = decay_rate([&](double z) { return pi2.max_abs(z); }, 1.0, 6.0);
    if (!fit.numerically_zero) CHECK(fit.rate > 0.0);
}

TEST_CASE("pi2 mean mode satisfies its half-line equation") {
    // the mean component obeys X'' + v X' = d/dt Pi1-hat; probe it with
    // finite differences against a centered time difference of the hat term
    const LayerFixture fx(true, 128, 24, 10);
    const BoundaryLayerTerm pi1t = pi1_tilde_build(fx.layer);
    const BoundaryLayerTerm pi2 = pi2_build(fx.layer, pi1t);
    const double h = 0.02;
    double worst = 0.0, scale = 0.0;
    for (std::size_t k = 4; k < fx.layer.t_cell.count - 4; k += 9) {
        const double t = fx.layer.t_cell.step * static_cast<double>(k);
        const double v = fx.layer.v1_right(t);
        for (double zeta : {0.5, 1.2, 2.5}) {
            auto f = [&](double z) { return pi2.mean_value(z, t); };
            const double d1 = (f(zeta + h) - f(zeta - h)) / (2 * h);
            const double d2 = (f(zeta + h) - 2 * f(zeta) + f(zeta - h)) / (h * h);
            const double ht = fx.layer.t_cell.step;
            const double dpi1 =
                (pi1_hat_eval(zeta, t + ht, fx.layer) - pi1_hat_eval(zeta, t - ht, fx.layer)) /
                (2 * ht);
            worst = std::max(worst, std::abs(d2 + v * d1 - dpi1));
            scale = std::max(scale, std::abs(dpi1));
        }
    }
    CHECK(worst <= 5e-3 * (1.0 + scale));
}

TEST_CASE("decay_rate reports numerically zero terms") {
    const DecayFit fit = decay_rate([](double) { return 1e-16; }, 1.0, 10.0);
    CHECK(fit.numerically_zero);
}
