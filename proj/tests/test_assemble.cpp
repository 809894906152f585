#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"

using namespace thincyl;

TEST_CASE("cut-off function values and junction smoothness") {
    const double l = 1.0, d1 = 0.1;
    CHECK(cutoff_chi(l, l, d1) == 1.0);
    CHECK(cutoff_chi(l - d1, l, d1) == 0.0);
    CHECK(cutoff_chi(l - 0.75 * d1, l, d1) == doctest::Approx(0.5));
    CHECK(cutoff_chi(0.3, l, d1) == 0.0);
    CHECK(cutoff_chi_d1(l - d1, l, d1) == 0.0);
    CHECK(cutoff_chi_d2(l - d1, l, d1) == 0.0);
    CHECK(std::abs(cutoff_chi_d1(l - 0.5 * d1, l, d1)) < 1e-10);
    CHECK(std::abs(cutoff_chi_d2(l - 0.5 * d1, l, d1)) < 1e-9);
    // strictly monotone in between
    double prev = 0.0;
    for (int i = 1; i <= 20; ++i) {
        const double x = l - d1 + 0.5 * d1 * i / 20.0;
        CHECK(cutoff_chi(x, l, d1) > prev);
        prev = cutoff_chi(x, l, d1);
    }
}

namespace {

struct AssembledFixture {
    fixtures::Pipeline pipe;
    BoundaryLayerTerm pi1t, pi2;
    AssembledFixture()
        : pipe(fixtures::angular_layer_config(), 128, 24, 10),
          pi1t(pi1_tilde_build(pipe.layer)), pi2(pi2_build(pipe.layer, pi1t)) {}
};

AssembledFixture& shared_fixture() {
    static AssembledFixture fx;
    return fx;
}

} // namespace

TEST_CASE("zero data assembles to the zero field") {
    ModelConfig cfg = builtin_scenarios("linear-advection");
    cfg.interaction_ref = {"zero", {}};
    cfg.interaction = make_interaction("zero", {});
    fixtures::Pipeline pipe(cfg, 64, 12, 4, 24);
    const BoundaryLayerTerm pi1t = pi1_tilde_build(pipe.layer);
    const BoundaryLayerTerm pi2 = pi2_build(pipe.layer, pi1t);
    const ApproximationField field = assemble(pipe.cfg, 0.1, ApproxOrder::full,
                                              AssemblyMode::standard, pipe.parts(&pi1t, &pi2));
    for (double x : {0.0, 0.3, 0.95, 1.0})
        for (double r : {0.0, 0.05, 0.1})
            for (double t : {0.0, 0.2, 0.34}) CHECK(field.value_radial(x, r, t) == 0.0);
}

TEST_CASE("cut-off support: interior values carry no layer term") {
    auto& fx = shared_fixture();
    const double eps = 0.1;
    const ApproximationField field =
        assemble(fx.pipe.cfg, eps, ApproxOrder::full, AssemblyMode::standard,
                 fx.pipe.parts(&fx.pi1t, &fx.pi2));
    const double x = 0.5, t = 0.7 * fx.pipe.lim.T1_observed;
    for (int node : {0, 17, 101}) {
        const double direct =
            fx.pipe.lim.w0.value(x, t) +
            eps * (fx.pipe.w1.w1.value(x, t) + fx.pipe.u1.value_node(x, t, node)) +
            eps * eps * fx.pipe.u2.value_node(x, t, node);
        CHECK(field.value_node(x, node, t) == doctest::Approx(direct).epsilon(1e-14));
    }
}

TEST_CASE("full order repairs both end traces and the initial surface") {
    auto& fx = shared_fixture();
    const ApproximationField field =
        assemble(fx.pipe.cfg, 0.05, ApproxOrder::full, AssemblyMode::standard,
                 fx.pipe.parts(&fx.pi1t, &fx.pi2));
    const BoundaryFitReport rep = check_boundary_fit(field, fx.pipe.cfg);
    CHECK(rep.at_initial <= 1e-8);
    CHECK(rep.at_inflow <= 1e-8);
    CHECK(rep.at_right <= 1e-8);
}

TEST_CASE("leading order repairs the right trace; interior mismatch is first order") {
    auto& fx = shared_fixture();
    const double eps = 0.05;
    const ApproximationField leading =
        assemble(fx.pipe.cfg, eps, ApproxOrder::leading, AssemblyMode::standard,
                 fx.pipe.parts(&fx.pi1t, &fx.pi2));
    const BoundaryFitReport rep = check_boundary_fit(leading, fx.pipe.cfg);
    CHECK(rep.at_right <= 1e-8);
    CHECK(rep.at_initial <= 1e-8);
    // interior first-order gap stays O(eps)
    const ApproximationField first =
        assemble(fx.pipe.cfg, eps, ApproxOrder::first, AssemblyMode::standard,
                 fx.pipe.parts(&fx.pi1t, &fx.pi2));
    double gap = 0.0;
    for (double x : {0.2, 0.5, 0.8})
        for (double r : {0.0, 0.03})
            gap = std::max(gap, std::abs(first.value_radial(x, r, 0.3) -
                                         leading.value_radial(x, r, 0.3)));
    CHECK(gap < 10.0 * eps);
    CHECK(gap > 0.0);
}

TEST_CASE("nested consistency between full and first order") {
    auto& fx = shared_fixture();
    const double eps = 0.1;
    const auto parts = fx.pipe.parts(&fx.pi1t, &fx.pi2);
    const ApproximationField full =
        assemble(fx.pipe.cfg, eps, ApproxOrder::full, AssemblyMode::standard, parts);
    const ApproximationField first =
        assemble(fx.pipe.cfg, eps, ApproxOrder::first, AssemblyMode::standard, parts);
    double u2max = fx.pipe.u2.max_abs();
    double pi2max = 0.0;
    for (double z : {0.0, 0.5, 1.0, 2.0}) pi2max = std::max(pi2max, fx.pi2.max_abs(z));
    const double bound = eps * eps * (u2max + pi2max) * (1.0 + 1e-9) + 1e-14;
    for (double x : {0.1, 0.5, 0.93, 1.0})
        for (double r : {0.0, 0.05, 0.1})
            for (double t : {0.1, 0.25, 0.34})
                CHECK(std::abs(full.value_radial(x, r, t) - first.value_radial(x, r, t)) <=
                      bound);
}

TEST_CASE("high-Peclet path coincides bitwise with the standard path at beta = 1") {
    auto& fx = shared_fixture();
    const auto parts = fx.pipe.parts(&fx.pi1t, &fx.pi2);
    const ApproximationField std_path =
        assemble(fx.pipe.cfg, 0.1, ApproxOrder::full, AssemblyMode::standard, parts);
    const ApproximationField hp_path =
        assemble(fx.pipe.cfg, 0.1, ApproxOrder::full, AssemblyMode::high_peclet, parts);
    for (double x : {0.0, 0.37, 0.91, 0.975, 1.0})
        for (double r : {0.0, 0.04, 0.1})
            for (double t : {0.0, 0.17, 0.34})
                CHECK(std_path.value_radial(x, r, t) == hp_path.value_radial(x, r, t));
}

TEST_CASE("gradient matches finite differences of the evaluator") {
    auto& fx = shared_fixture();
    const double eps = 0.1;
    const ApproximationField field =
        assemble(fx.pipe.cfg, eps, ApproxOrder::full, AssemblyMode::standard,
                 fx.pipe.parts(&fx.pi1t, &fx.pi2));
    const double h = 1e-5;
    for (double x : {0.4, 0.93, 0.97})
        for (double r : {0.02, 0.07})
            for (double t : {0.15, 0.3}) {
                const auto g = field.gradient_radial(x, r, t);
                const double fdx =
                    (field.value_radial(x + h, r, t) - field.value_radial(x - h, r, t)) /
                    (2 * h);
                const double fdr =
                    (field.value_radial(x, r + h, t) - field.value_radial(x, r - h, t)) /
                    (2 * h);
                CHECK(g.dx1 == doctest::Approx(fdx).epsilon(5e-4).scale(1.0 + std::abs(fdx)));
                CHECK(g.dr == doctest::Approx(fdr).epsilon(5e-4).scale(1.0 + std::abs(fdr)));
            }
}

TEST_CASE("leading order of a layer-free scenario has zero transversal gradient") {
    ModelConfig cfg = builtin_scenarios("linear-advection");
    fixtures::Pipeline pipe(cfg, 64, 12, 4, 24);
    ApproximationParts parts;
    parts.lim = &pipe.lim;
    const ApproximationField leading =
        assemble(pipe.cfg, 0.1, ApproxOrder::leading, AssemblyMode::standard, parts);
    const auto g = leading.gradient_radial(0.5, 0.05, 0.2);
    CHECK(g.dr == 0.0);
}

TEST_CASE("pure layer gradient follows the chain rule scaling") {
    // at a point where only Pi0 is active (leading order, inside the cut-off
    // zone), d/dx1 = w0_x + chi' Pi0 + chi (v1/eps) Pi0
    auto& fx = shared_fixture();
    const double eps = 0.05;
    ApproximationParts parts;
    parts.lim = &fx.pipe.lim;
    parts.layer = &fx.pipe.layer;
    const ApproximationField leading =
        assemble(fx.pipe.cfg, eps, ApproxOrder::leading, AssemblyMode::standard, parts);
    const double l = fx.pipe.cfg.length, d1 = fx.pipe.cfg.delta1;
    const double x = 0.985, t = 0.3;
    const double zeta = (l - x) / eps;
    const double w0x = fx.pipe.lim.dw0_dx.value(x, t);
    const double pi0 = pi0_eval(zeta, t, fx.pipe.layer);
    const double v = fx.pipe.layer.v1_right(t);
    const double expected = w0x + cutoff_chi_d1(x, l, d1) * pi0 +
                            cutoff_chi(x, l, d1) * v * pi0 / eps;
    CHECK(leading.gradient_radial(x, 0.0, t).dx1 ==
          doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("missing parts and unknown epsilon are rejected") {
    auto& fx = shared_fixture();
    ApproximationParts no_u1 = fx.pipe.parts(&fx.pi1t, &fx.pi2);
    no_u1.u1 = nullptr;
    CHECK_THROWS_AS(assemble(fx.pipe.cfg, 0.1, ApproxOrder::first, AssemblyMode::standard,
                             no_u1),
                    DependencyError);
    CHECK_THROWS_AS(assemble(fx.pipe.cfg, 0.123, ApproxOrder::first, AssemblyMode::standard,
                             fx.pipe.parts(&fx.pi1t, &fx.pi2)),
                    ConfigError);
}

TEST_CASE("intermediate diffusion scalings are refused") {
    ModelConfig cfg = fixtures::angular_layer_config();
    cfg.beta = 2.0;
    auto& fx = shared_fixture();
    CHECK_THROWS_AS(assemble(cfg, 0.1, ApproxOrder::first, AssemblyMode::high_peclet,
                             fx.pipe.parts(&fx.pi1t, &fx.pi2)),
                    ConfigError);
}
