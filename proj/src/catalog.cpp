#include "thincyl/catalog.hpp"

#include <cmath>

namespace thincyl {

namespace {

double get(const Params& p, const std::string& key, double fallback) {
    const auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

double require(const Params& p, const std::string& key, const std::string& owner) {
    const auto it = p.find(key);
    if (it == p.end()) throw ConfigError(owner + ": missing parameter '" + key + "'");
    return it->second;
}

} // namespace

double bump_window(double x, double a, double b) {
    if (x <= a || x >= b) return 0.0;
    const double s = std::sin(M_PI * (x - a) / (b - a));
    const double s2 = s * s;
    return s2 * s2 * s2;
}

double bump_window_d1(double x, double a, double b) {
    if (x <= a || x >= b) return 0.0;
    const double w = M_PI / (b - a), u = w * (x - a);
    const double s = std::sin(u), c = std::cos(u);
    return 6.0 * w * s * s * s * s * s * c;
}

double bump_window_d2(double x, double a, double b) {
    if (x <= a || x >= b) return 0.0;
    const double w = M_PI / (b - a), u = w * (x - a);
    const double s = std::sin(u), c = std::cos(u);
    const double s4 = s * s * s * s;
    return 6.0 * w * w * s4 * (5.0 * c * c - s * s);
}

double ramp_cinf(double t, double t0) {
    if (t <= 0.0) return 0.0;
    const double v = t / t0;
    return -std::expm1(-v * v * v);
}

double ramp_cinf_d1(double t, double t0) {
    if (t <= 0.0) return 0.0;
    const double v = t / t0;
    return 3.0 * v * v / t0 * std::exp(-v * v * v);
}

double ramp_cinf_d2(double t, double t0) {
    if (t <= 0.0) return 0.0;
    const double v = t / t0, v3 = v * v * v;
    return (6.0 * v / (t0 * t0) - 9.0 * v * v3 / (t0 * t0)) * std::exp(-v3);
}

VelocityField make_velocity(const std::string& catalog, const Params& params) {
    VelocityField vf;
    vf.name = catalog;
    vf.vbar = [](double, double, double, double) { return std::array<double, 2>{0.0, 0.0}; };
    vf.div_vbar = [](double, double, double, double) { return 0.0; };
    vf.vbar_zero = true;

    if (catalog == "constant") {
        const double c = get(params, "c", 1.0);
        vf.v1 = [c](double, double, double) { return c; };
        vf.dv1_ds = [](double, double, double) { return 0.0; };
        vf.dv1_dx1 = [](double, double, double) { return 0.0; };
        vf.d2v1_dss = [](double, double, double) { return 0.0; };
    } else if (catalog == "saturating") {
        // v1 = c0 + c s/(1+s) D(x): saturating in s, with the s-dependence
        // ramped off (monotonically) before the right margin so the speed is
        // the constant c0 there; defined for s > -0.9 (solutions stay >= 0)
        const double c = get(params, "c", 1.0);
        const double c0 = require(params, "c0", "velocity.saturating");
        const double xa = get(params, "xa", 0.6);
        const double xb = get(params, "xb", 0.85);
        auto guard = [](double s) { return std::max(s, -0.9); };
        auto D = [xa, xb](double x) { return 1.0 - smoothstep9((x - xa) / (xb - xa)); };
        auto Dd = [xa, xb](double x) { return -smoothstep9_d1((x - xa) / (xb - xa)) / (xb - xa); };
        vf.v1 = [c, c0, D, guard](double s, double x, double) {
            s = guard(s);
            return c0 + c * s / (1.0 + s) * D(x);
        };
        vf.dv1_ds = [c, D, guard](double s, double x, double) {
            s = guard(s);
            const double d = 1.0 + s;
            return c / (d * d) * D(x);
        };
        vf.dv1_dx1 = [c, Dd, guard](double s, double x, double) {
            s = guard(s);
            return c * s / (1.0 + s) * Dd(x);
        };
        vf.d2v1_dss = [c, D, guard](double s, double x, double) {
            s = guard(s);
            const double d = 1.0 + s;
            return -2.0 * c / (d * d * d) * D(x);
        };
    } else if (catalog == "affine") {
        // test-support entry: v1 = a + b s (violates the global bounds,
        // useful for exercising the validators)
        const double a = get(params, "a", 0.0);
        const double b = get(params, "b", 1.0);
        vf.v1 = [a, b](double s, double, double) { return a + b * s; };
        vf.dv1_ds = [b](double, double, double) { return b; };
        vf.dv1_dx1 = [](double, double, double) { return 0.0; };
        vf.d2v1_dss = [](double, double, double) { return 0.0; };
    } else {
        throw ConfigError("velocity: unknown catalog entry '" + catalog + "'");
    }

    if (get(params, "radial_amp", 0.0) != 0.0) {
        // radial inflow rho (1 - rho/r0) e_rho supported in an axial window
        const double amp = params.at("radial_amp");
        const double r0 = get(params, "radial_r0", 1.0);
        const double a = get(params, "radial_a", 0.0);
        const double b = get(params, "radial_b", 1.0);
        const double t0 = get(params, "radial_t0", 0.1);
        vf.vbar = [=](double x1, double xi2, double xi3, double t) {
            const double g = amp * bump_window(x1, a, b) * ramp_cinf(t, t0);
            const double f = 1.0 - std::hypot(xi2, xi3) / r0;
            return std::array<double, 2>{g * f * xi2, g * f * xi3};
        };
        vf.div_vbar = [=](double x1, double xi2, double xi3, double t) {
            const double g = amp * bump_window(x1, a, b) * ramp_cinf(t, t0);
            return g * (2.0 - 3.0 * std::hypot(xi2, xi3) / r0);
        };
        vf.vbar_zero = false;
    }
    return vf;
}

InteractionFunction make_interaction(const std::string& catalog, const Params& params) {
    InteractionFunction f;
    f.name = catalog;

    auto finish_mean_only = [&](auto mean, auto mean_s, auto mean_x, auto mean_t, auto mean_tt) {
        f.phi = [mean](double s, double x1, double, double, double t) { return mean(s, x1, t); };
        f.dphi_ds = [mean_s](double s, double x1, double, double, double t) {
            return mean_s(s, x1, t);
        };
        f.dphi_dx1 = [mean_x](double s, double x1, double, double, double t) {
            return mean_x(s, x1, t);
        };
        f.dphi_dt = [mean_t](double s, double x1, double, double, double t) {
            return mean_t(s, x1, t);
        };
        f.d2phi_dtt = [mean_tt](double s, double x1, double, double, double t) {
            return mean_tt(s, x1, t);
        };
        f.grad_xi_phi = [](double, double, double, double, double) {
            return std::array<double, 2>{0.0, 0.0};
        };
        f.phi_mean_part = [mean](double s, double x1, double t) { return mean(s, x1, t); };
        f.dphi_mean_part_ds = [mean_s](double s, double x1, double t) { return mean_s(s, x1, t); };
        f.xi_independent = true;
    };

    if (catalog == "zero") {
        auto z3 = [](double, double, double) { return 0.0; };
        finish_mean_only(z3, z3, z3, z3, z3);
        return f;
    }

    if (catalog == "window") {
        // phi = -tau(t) eta(x) (k0 + k1 s), eta a sin^6 bump on [a, b]
        const double k0 = require(params, "k0", "interaction.window");
        const double k1 = get(params, "k1", 0.0);
        const double a = require(params, "a", "interaction.window");
        const double b = require(params, "b", "interaction.window");
        const double t0 = require(params, "t0", "interaction.window");
        auto mean = [=](double s, double x1, double t) {
            return -ramp_cinf(t, t0) * bump_window(x1, a, b) * (k0 + k1 * s);
        };
        auto mean_s = [=](double, double x1, double t) {
            return -ramp_cinf(t, t0) * bump_window(x1, a, b) * k1;
        };
        auto mean_x = [=](double s, double x1, double t) {
            return -ramp_cinf(t, t0) * bump_window_d1(x1, a, b) * (k0 + k1 * s);
        };
        auto mean_t = [=](double s, double x1, double t) {
            return -ramp_cinf_d1(t, t0) * bump_window(x1, a, b) * (k0 + k1 * s);
        };
        auto mean_tt = [=](double s, double x1, double t) {
            return -ramp_cinf_d2(t, t0) * bump_window(x1, a, b) * (k0 + k1 * s);
        };
        finish_mean_only(mean, mean_s, mean_x, mean_t, mean_tt);
        return f;
    }

    if (catalog == "affine") {
        // test-support: phi = -(k0 + k1 s) tau(t); x-uniform, so A3's support
        // clause fails validation on purpose
        const double k0 = require(params, "k0", "interaction.affine");
        const double k1 = get(params, "k1", 0.0);
        const double t0 = get(params, "t0", 0.1);
        auto mean = [=](double s, double, double t) { return -(k0 + k1 * s) * ramp_cinf(t, t0); };
        auto mean_s = [=](double, double, double t) { return -k1 * ramp_cinf(t, t0); };
        auto mean_x = [](double, double, double) { return 0.0; };
        auto mean_t = [=](double s, double, double t) {
            return -(k0 + k1 * s) * ramp_cinf_d1(t, t0);
        };
        auto mean_tt = [=](double s, double, double t) {
            return -(k0 + k1 * s) * ramp_cinf_d2(t, t0);
        };
        finish_mean_only(mean, mean_s, mean_x, mean_t, mean_tt);
        return f;
    }

    if (catalog == "right-plateau" || catalog == "right-plateau-angular") {
        // phi = -tau(t) [ P(x) k0 + H(x) m xi2 / r0 ], P a C^4 ramp that is 1
        // on [b, l] (s-independent near the right end as A3 requires)
        const double k0 = require(params, "k0", "interaction." + catalog);
        const double a = require(params, "a", "interaction." + catalog);
        const double b = require(params, "b", "interaction." + catalog);
        const double t0 = require(params, "t0", "interaction." + catalog);
        const double m = catalog == "right-plateau-angular"
                             ? require(params, "m", "interaction." + catalog)
                             : 0.0;
        const double r0 = get(params, "r0", 1.0);
        auto P = [=](double x) { return smoothstep9((x - a) / (b - a)); };
        auto Pd = [=](double x) { return smoothstep9_d1((x - a) / (b - a)) / (b - a); };
        f.phi = [=](double, double x1, double xi2, double, double t) {
            return -ramp_cinf(t, t0) * (P(x1) * k0 + P(x1) * m * xi2 / r0);
        };
        f.dphi_ds = [](double, double, double, double, double) { return 0.0; };
        f.dphi_dx1 = [=](double, double x1, double xi2, double, double t) {
            return -ramp_cinf(t, t0) * Pd(x1) * (k0 + m * xi2 / r0);
        };
        f.dphi_dt = [=](double, double x1, double xi2, double, double t) {
            return -ramp_cinf_d1(t, t0) * P(x1) * (k0 + m * xi2 / r0);
        };
        f.d2phi_dtt = [=](double, double x1, double xi2, double, double t) {
            return -ramp_cinf_d2(t, t0) * P(x1) * (k0 + m * xi2 / r0);
        };
        f.grad_xi_phi = [=](double, double x1, double, double, double t) {
            return std::array<double, 2>{-ramp_cinf(t, t0) * P(x1) * m / r0, 0.0};
        };
        f.phi_mean_part = [=](double, double x1, double t) {
            return -ramp_cinf(t, t0) * P(x1) * k0;
        };
        f.dphi_mean_part_ds = [](double, double, double) { return 0.0; };
        f.xi_independent = (m == 0.0);
        return f;
    }

    if (catalog == "window-angular") {
        // window plus an odd-in-xi2 term with zero boundary average
        const double k0 = require(params, "k0", "interaction.window-angular");
        const double k1 = get(params, "k1", 0.0);
        const double m = require(params, "m", "interaction.window-angular");
        const double a = require(params, "a", "interaction.window-angular");
        const double b = require(params, "b", "interaction.window-angular");
        const double t0 = require(params, "t0", "interaction.window-angular");
        const double r0 = get(params, "r0", 1.0);
        auto eta = [=](double x) { return bump_window(x, a, b); };
        f.phi = [=](double s, double x1, double xi2, double, double t) {
            return -ramp_cinf(t, t0) * eta(x1) * (k0 + k1 * s + m * xi2 / r0);
        };
        f.dphi_ds = [=](double, double x1, double, double, double t) {
            return -ramp_cinf(t, t0) * eta(x1) * k1;
        };
        f.dphi_dx1 = [=](double s, double x1, double xi2, double, double t) {
            return -ramp_cinf(t, t0) * bump_window_d1(x1, a, b) * (k0 + k1 * s + m * xi2 / r0);
        };
        f.dphi_dt = [=](double s, double x1, double xi2, double, double t) {
            return -ramp_cinf_d1(t, t0) * eta(x1) * (k0 + k1 * s + m * xi2 / r0);
        };
        f.d2phi_dtt = [=](double s, double x1, double xi2, double, double t) {
            return -ramp_cinf_d2(t, t0) * eta(x1) * (k0 + k1 * s + m * xi2 / r0);
        };
        f.grad_xi_phi = [=](double, double x1, double, double, double t) {
            return std::array<double, 2>{-ramp_cinf(t, t0) * eta(x1) * m / r0, 0.0};
        };
        f.phi_mean_part = [=](double s, double x1, double t) {
            return -ramp_cinf(t, t0) * eta(x1) * (k0 + k1 * s);
        };
        f.dphi_mean_part_ds = [=](double, double x1, double t) {
            return -ramp_cinf(t, t0) * eta(x1) * k1;
        };
        f.xi_independent = (m == 0.0);
        return f;
    }

    throw ConfigError("interaction: unknown catalog entry '" + catalog + "'");
}

BoundaryData make_boundary(const std::string& catalog, const Params& params) {
    BoundaryData b;
    b.name = catalog;
    if (catalog == "zero") {
        b.q = [](double) { return 0.0; };
        b.dq = [](double) { return 0.0; };
        b.d2q = [](double) { return 0.0; };
    } else if (catalog == "ramp") {
        const double q8 = require(params, "q_inf", "boundary.ramp");
        const double t0 = require(params, "t0", "boundary.ramp");
        b.q = [q8, t0](double t) { return q8 * ramp_cinf(t, t0); };
        b.dq = [q8, t0](double t) { return q8 * ramp_cinf_d1(t, t0); };
        b.d2q = [q8, t0](double t) { return q8 * ramp_cinf_d2(t, t0); };
    } else {
        throw ConfigError("boundary: unknown catalog entry '" + catalog + "'");
    }
    return b;
}

} // namespace thincyl
