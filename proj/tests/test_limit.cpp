#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "thincyl/limit.hpp"

using namespace thincyl;

namespace {

struct Fixture {
    ModelConfig cfg;
    CrossSectionMesh mesh;
    HomogenizedInteraction hom;
    double wa = 0.0, wb = 0.0, wt0 = 0.0, wk0 = 0.0; // window parameters
    explicit Fixture(const std::string& name, int nxi = 16)
        : cfg(builtin_scenarios(name)), mesh(build_mesh(cfg.cross_section, nxi)),
          hom(cfg.interaction, mesh) {
        const auto& p = cfg.interaction_ref.params;
        wa = p.at("a");
        wb = p.at("b");
        wt0 = p.at("t0");
        wk0 = p.at("k0");
    }
    double keff() const { return mesh.phi_ratio * wk0; }
};

// closed-form characteristic integral for the linear-advection scenario:
// w0(x, t) = k_eff Int_0^t eta(x - (t - s)) tau(s) ds with straight unit-speed
// characteristics
double linadv_w0(const Fixture& fx, double x, double t) {
    return fx.keff() * oracles::integrate(
                           [&](double s) {
                               return bump_window(x - (t - s), fx.wa, fx.wb) *
                                      ramp_cinf(s, fx.wt0);
                           },
                           0.0, t);
}

} // namespace

TEST_CASE("lambda_speed basics") {
    const Fixture fx("linear-advection");
    CHECK(lambda_speed(0.7, 0.4, 0.1, fx.cfg.velocity) == doctest::Approx(1.0)); // v1 constant
    CHECK(lambda_speed(0.0, 0.4, 0.1, fx.cfg.velocity) ==
          doctest::Approx(fx.cfg.velocity.v1(0.0, 0.4, 0.1)));

    const Fixture sat("saturating-flux");
    const double s = 1.0, x = 0.5, t = 0.17;
    // finite-difference oracle on d/ds [s v1(s)]
    const double h = 1e-6;
    auto flux = [&](double z) { return z * sat.cfg.velocity.v1(z, x, t); };
    const double fd = (flux(s + h) - flux(s - h)) / (2.0 * h);
    CHECK(lambda_speed(s, x, t, sat.cfg.velocity) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("forcing term structure") {
    const Fixture fx("linear-advection");
    // inside the left support margin both contributions vanish
    CHECK(forcing(0.4, 0.05, 0.2, fx.cfg.velocity, fx.hom) == 0.0);
    // forcing is s-independent and equals -phi_hat = ratio k0 eta tau
    const double x = 0.45 * fx.cfg.length, t = 0.7 * fx.cfg.horizon;
    const double expected = fx.keff() * bump_window(x, fx.wa, fx.wb) * ramp_cinf(t, fx.wt0);
    CHECK(forcing(0.0, x, t, fx.cfg.velocity, fx.hom) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(forcing(0.8, x, t, fx.cfg.velocity, fx.hom) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("trace_characteristic matches the quadrature oracle on straight lines") {
    const Fixture fx("linear-advection");
    const double dt = fx.cfg.horizon / 512.0;
    const double t0 = 0.05;
    const Characteristic c = trace_characteristic(fx.cfg, fx.hom, 0.0, t0, dt);
    REQUIRE(c.y.size() > 10);
    for (std::size_t s = 8; s < c.y.size(); s += 37) {
        const double t = t0 + dt * static_cast<double>(s);
        CHECK(c.y[s] == doctest::Approx(t - t0).epsilon(1e-12)); // unit speed
        const double w_exact =
            fx.keff() * oracles::integrate(
                            [&](double sig) {
                                return bump_window(sig - t0, fx.wa, fx.wb) *
                                       ramp_cinf(sig, fx.wt0);
                            },
                            t0, t);
        CHECK(std::abs(c.w[s] - w_exact) < 1e-9);
    }
}

TEST_CASE("zero forcing keeps every characteristic at zero") {
    ModelConfig cfg = builtin_scenarios("saturating-flux");
    cfg.interaction = make_interaction("zero", {});
    const CrossSectionMesh mesh = build_mesh(cfg.cross_section, 12);
    const HomogenizedInteraction hom(cfg.interaction, mesh);
    const Characteristic c = trace_characteristic(cfg, hom, 0.3, 0.0, cfg.horizon / 256.0);
    for (double w : c.w) CHECK(w == 0.0);
}

TEST_CASE("characteristic from the support margin stays zero until the window") {
    const Fixture fx("linear-advection");
    const Characteristic c = trace_characteristic(fx.cfg, fx.hom, 0.5 * fx.wa, 0.0,
                                                  fx.cfg.horizon / 512.0);
    for (std::size_t s = 0; s < c.y.size(); ++s) {
        if (c.y[s] <= fx.wa) CHECK(c.w[s] == 0.0);
    }
}

TEST_CASE("blow-up guard rejects runaway characteristics") {
    const Fixture fx("linear-advection");
    // launch at the left window edge so the curve sweeps the whole forcing
    // region; a guard far below the accumulated value must trip
    CHECK_THROWS_AS(
        trace_characteristic(fx.cfg, fx.hom, fx.wa, 0.0, fx.cfg.horizon / 256.0, 0.01),
        NumericError);
}

TEST_CASE("solve_limit: zero interaction gives the zero solution over the full horizon") {
    ModelConfig cfg = builtin_scenarios("saturating-flux");
    cfg.interaction = make_interaction("zero", {});
    cfg.grid.nx = 64;
    cfg.grid.nt = 64;
    const CrossSectionMesh mesh = build_mesh(cfg.cross_section, 12);
    const LimitSolution lim = solve_limit(cfg, cfg.grid, mesh);
    CHECK(lim.T1_observed == doctest::Approx(cfg.horizon));
    CHECK(lim.w0.max_abs() == 0.0);
}

TEST_CASE("solve_limit matches the closed-form characteristic integral") {
    Fixture fx("linear-advection", 16);
    fx.cfg.grid.nx = 512;
    fx.cfg.grid.nt = 512;
    const LimitSolution lim = solve_limit(fx.cfg, fx.cfg.grid, fx.mesh);
    CHECK(lim.T1_observed == doctest::Approx(fx.cfg.horizon));
    double worst = 0.0;
    for (std::size_t k = 0; k < lim.w0.nt(); k += 37)
        for (std::size_t i = 0; i < lim.w0.nx(); i += 19) {
            const double x = lim.w0.xaxis().step * static_cast<double>(i);
            const double t = lim.w0.taxis().step * static_cast<double>(k);
            worst = std::max(worst, std::abs(lim.w0.at(i, k) - linadv_w0(fx, x, t)));
        }
    CHECK(worst <= 1e-6);

    // nonnegativity and vanishing initial rates
    double min_w = 0.0, init_rate = 0.0, init_slope = 0.0, init_curv = 0.0;
    for (std::size_t i = 0; i < lim.w0.nx(); ++i) {
        init_rate = std::max(init_rate, std::abs(lim.dw0_dt.at(i, 0)));
        init_slope = std::max(init_slope, std::abs(lim.dw0_dx.at(i, 0)));
        init_curv = std::max(init_curv, std::abs(lim.d2w0_dxx.at(i, 0)));
        for (std::size_t k = 0; k < lim.w0.nt(); ++k) min_w = std::min(min_w, lim.w0.at(i, k));
    }
    CHECK(min_w >= -1e-12);
    CHECK(init_rate < 1e-8);
    CHECK(init_slope == 0.0);
    CHECK(init_curv == 0.0);
}

TEST_CASE("fan monotonicity holds for the benchmark over the full horizon") {
    Fixture fx("linear-advection");
    fx.cfg.grid.nx = 128;
    fx.cfg.grid.nt = 128;
    const LimitSolution lim = solve_limit(fx.cfg, fx.cfg.grid, fx.mesh);
    const auto& curves = lim.fan.curves;
    for (std::size_t k = 0; k < lim.w0.nt(); ++k) {
        double prev = -1.0;
        for (const auto& c : curves) {
            if (!c.defined_at(k)) continue;
            const double y = c.y_at(k);
            if (y > fx.cfg.length) continue;
            CHECK(y > prev - 1e-14);
            prev = y;
        }
    }
}

TEST_CASE("grid refinement changes w0 at better than cubic order") {
    Fixture fx("saturating-flux");
    auto solve_at = [&](int n) {
        ModelConfig cfg = fx.cfg;
        cfg.grid.nx = n;
        cfg.grid.nt = n;
        return solve_limit(cfg, cfg.grid, fx.mesh);
    };
    const LimitSolution a = solve_at(128), b = solve_at(256), c = solve_at(512);
    auto diff = [&](const LimitSolution& u, const LimitSolution& v) {
        double worst = 0.0;
        for (std::size_t k = 0; k < u.w0.nt(); k += 4)
            for (std::size_t i = 0; i < u.w0.nx(); i += 4) {
                const double x = u.w0.xaxis().step * static_cast<double>(i);
                const double t = u.w0.taxis().step * static_cast<double>(k);
                worst = std::max(worst, std::abs(u.w0.at(i, k) - v.w0.value(x, t)));
            }
        return worst;
    };
    const double d1 = diff(a, b), d2 = diff(b, c);
    CHECK(std::log2(d1 / d2) >= 2.5);
}

TEST_CASE("residual of the Riemann form shrinks under refinement") {
    Fixture fx("saturating-flux");
    auto res_at = [&](int n) {
        ModelConfig cfg = fx.cfg;
        cfg.grid.nx = n;
        cfg.grid.nt = n;
        const LimitSolution lim = solve_limit(cfg, cfg.grid, fx.mesh);
        return limit_residual(cfg, lim, fx.mesh);
    };
    const double r1 = res_at(128), r2 = res_at(256);
    CHECK(std::log2(r1 / r2) >= 1.5);
}

TEST_CASE("strong forcing truncates the classical horizon and is self-consistent") {
    ModelConfig cfg = builtin_scenarios("saturating-flux");
    cfg.interaction =
        make_interaction("window", {{"k0", 6.0}, {"k1", 0.5}, {"a", 0.1}, {"b", 0.6}, {"t0", 0.12}});
    cfg.interaction_ref.params["k0"] = 6.0;
    const CrossSectionMesh mesh = build_mesh(cfg.cross_section, 12);
    auto solve_at = [&](int n) {
        ModelConfig c = cfg;
        c.grid.nx = n;
        c.grid.nt = n;
        return solve_limit(c, c.grid, mesh);
    };
    const LimitSolution coarse = solve_at(256), fine = solve_at(1024);
    CHECK(coarse.T1_observed < cfg.horizon);
    CHECK(fine.T1_observed < cfg.horizon);
    const double tcmp = 0.8 * std::min(coarse.T1_observed, fine.T1_observed);
    double worst = 0.0;
    for (std::size_t i = 0; i < coarse.w0.nx(); i += 3) {
        const double x = coarse.w0.xaxis().step * static_cast<double>(i);
        for (double t = 0.0; t <= tcmp; t += tcmp / 40.0)
            worst = std::max(worst, std::abs(coarse.w0.value(x, t) - fine.w0.value(x, t)));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("w1 transport matches the Duhamel oracle for a manufactured source") {
    // constant-speed scenario with zero interaction: w0 = 0, Lambda = 1;
    // override the curvature field with an analytic source and compare the
    // corrector against the Duhamel integral along straight characteristics
    ModelConfig cfg = builtin_scenarios("linear-advection");
    cfg.interaction = make_interaction("zero", {});
    cfg.grid.nx = 512;
    cfg.grid.nt = 512;
    const CrossSectionMesh mesh = build_mesh(cfg.cross_section, 12);
    LimitSolution lim = solve_limit(cfg, cfg.grid, mesh);
    const double ga = 0.2 * cfg.length, gb = 0.8 * cfg.length;
    auto g = [&](double x, double t) { return bump_window(x, ga, gb) * ramp_cinf(t, 0.3); };
    for (std::size_t k = 0; k < lim.w0.nt(); ++k)
        for (std::size_t i = 0; i < lim.w0.nx(); ++i)
            lim.d2w0_dxx.at(i, k) = g(lim.w0.xaxis().step * static_cast<double>(i),
                                      lim.w0.taxis().step * static_cast<double>(k));
    const W1Solution sol = solve_w1(cfg, lim, GridField2D(), mesh);
    double worst = 0.0;
    for (std::size_t k = 8; k < sol.w1.nt(); k += 41)
        for (std::size_t i = 0; i < sol.w1.nx(); i += 23) {
            const double x = sol.w1.xaxis().step * static_cast<double>(i);
            const double t = sol.w1.taxis().step * static_cast<double>(k);
            const double exact =
                oracles::integrate([&](double s) { return g(x - (t - s), s); }, 0.0, t);
            worst = std::max(worst, std::abs(sol.w1.at(i, k) - exact));
        }
    CHECK(worst <= 1e-6);
    // sources vanish left of the window, so the corrector does too
    for (std::size_t k = 0; k < sol.w1.nt(); ++k)
        for (std::size_t i = 0; i < sol.w1.nx(); ++i)
            if (lim.w0.xaxis().step * static_cast<double>(i) < ga - 0.01)
                CHECK(std::abs(sol.w1.at(i, k)) < 1e-12);
}

TEST_CASE("w1 is zero when the source and data vanish") {
    ModelConfig cfg = builtin_scenarios("linear-advection");
    cfg.interaction = make_interaction("zero", {});
    cfg.grid.nx = 64;
    cfg.grid.nt = 64;
    const CrossSectionMesh mesh = build_mesh(cfg.cross_section, 12);
    const LimitSolution lim = solve_limit(cfg, cfg.grid, mesh);
    const W1Solution sol = solve_w1(cfg, lim, GridField2D(), mesh);
    CHECK(sol.w1.max_abs() == 0.0);
}

TEST_CASE("Cauchy limit: s-independent interaction integrates the ramp") {
    ModelConfig cfg = builtin_scenarios("high-peclet-beta3");
    cfg.grid.nx = 96;
    cfg.grid.nt = 512;
    const CrossSectionMesh mesh = build_mesh(cfg.cross_section, 16);
    const LimitSolution lim = solve_cauchy_limit(cfg, cfg.grid, mesh);
    CHECK(lim.T1_observed == doctest::Approx(cfg.horizon));
    const auto& p = cfg.interaction_ref.params;
    const double keff = mesh.phi_ratio * p.at("k0");
    double worst = 0.0;
    for (std::size_t i = 0; i < lim.w0.nx(); i += 7)
        for (std::size_t k = 0; k < lim.w0.nt(); k += 19) {
            const double x = lim.w0.xaxis().step * static_cast<double>(i);
            const double t = lim.w0.taxis().step * static_cast<double>(k);
            const double exact =
                keff * bump_window(x, p.at("a"), p.at("b")) *
                oracles::integrate([&](double s) { return ramp_cinf(s, p.at("t0")); }, 0.0, t);
            worst = std::max(worst, std::abs(lim.w0.at(i, k) - exact));
        }
    CHECK(worst < 1e-9);
}

TEST_CASE("Cauchy limit: affine interaction matches the exponential formula") {
    ModelConfig cfg = builtin_scenarios("high-peclet-beta3");
    const double k0 = 0.4, k1 = 0.6, t0 = 0.1;
    cfg.interaction = make_interaction("affine", {{"k0", k0}, {"k1", k1}, {"t0", t0}});
    cfg.grid.nx = 16;
    cfg.grid.nt = 512;
    const CrossSectionMesh mesh = build_mesh(cfg.cross_section, 16);
    const LimitSolution lim = solve_cauchy_limit(cfg, cfg.grid, mesh);
    const double ratio = mesh.phi_ratio;
    for (std::size_t k = 0; k < lim.w0.nt(); k += 29) {
        const double t = lim.w0.taxis().step * static_cast<double>(k);
        const double I =
            oracles::integrate([&](double s) { return ramp_cinf(s, t0); }, 0.0, t);
        const double exact = k0 / k1 * (std::exp(k1 * ratio * I) - 1.0);
        CHECK(std::abs(lim.w0.at(5, k) - exact) < 1e-8);
    }
}

TEST_CASE("Cauchy columns are independent scalar integrations") {
    ModelConfig cfg = builtin_scenarios("high-peclet-beta3");
    cfg.grid.nx = 48;
    cfg.grid.nt = 128;
    const CrossSectionMesh mesh = build_mesh(cfg.cross_section, 16);
    const HomogenizedInteraction hom(cfg.interaction, mesh);
    const LimitSolution lim = solve_cauchy_limit(cfg, cfg.grid, mesh);
    const double dt = cfg.horizon / cfg.grid.nt;
    for (std::size_t i : {3u, 17u, 40u}) {
        const double x = lim.w0.xaxis().step * static_cast<double>(i);
        double w = 0.0;
        for (int k = 0; k < cfg.grid.nt; ++k) {
            const double t = dt * k;
            auto rhs = [&](double tt, double ww) { return -hom.hat(ww, x, tt); };
            const double k1 = rhs(t, w);
            const double k2 = rhs(t + 0.5 * dt, w + 0.5 * dt * k1);
            const double k3 = rhs(t + 0.5 * dt, w + 0.5 * dt * k2);
            const double k4 = rhs(t + dt, w + dt * k3);
            w += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        }
        CHECK(lim.w0.at(i, lim.w0.nt() - 1) == w); // bitwise: same arithmetic path
    }
}
