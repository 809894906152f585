#include "thincyl/limit.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace thincyl {

double lambda_speed(double s, double x1, double t, const VelocityField& vel) {
    return vel.v1(s, x1, t) + s * vel.dv1_ds(s, x1, t);
}

double forcing(double s, double x1, double t, const VelocityField& vel,
               const HomogenizedInteraction& hom) {
    return -hom.hat(s, x1, t) - s * vel.dv1_dx1(s, x1, t);
}

namespace {

struct Rhs {
    const ModelConfig* cfg;
    const HomogenizedInteraction* hom;
    double clampx(double y) const { return std::clamp(y, 0.0, cfg->length); }
    void eval(double t, double y, double w, double& dy, double& dw) const {
        const double x = clampx(y);
        dy = lambda_speed(w, x, t, cfg->velocity);
        dw = forcing(w, x, t, cfg->velocity, *hom);
    }
};

void rk4_step(const Rhs& rhs, double t, double dt, double& y, double& w) {
    double k1y, k1w, k2y, k2w, k3y, k3w, k4y, k4w;
    rhs.eval(t, y, w, k1y, k1w);
    rhs.eval(t + 0.5 * dt, y + 0.5 * dt * k1y, w + 0.5 * dt * k1w, k2y, k2w);
    rhs.eval(t + 0.5 * dt, y + 0.5 * dt * k2y, w + 0.5 * dt * k2w, k3y, k3w);
    rhs.eval(t + dt, y + dt * k3y, w + dt * k3w, k4y, k4w);
    y += dt / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    w += dt / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w);
}

} // namespace

Characteristic trace_characteristic(const ModelConfig& cfg, const HomogenizedInteraction& hom,
                                    double y0, double t0, double dt, double s_guard) {
    if (!(t0 == 0.0 || y0 == 0.0))
        throw NumericError("trace_characteristic: launch must sit on the initial line or inflow");
    Characteristic c;
    c.y0 = y0;
    c.t0 = t0;
    c.from_boundary = y0 == 0.0 && t0 > 0.0;
    c.first_level = static_cast<std::size_t>(std::llround(t0 / dt));
    const Rhs rhs{&cfg, &hom};
    double y = y0, w = 0.0, t = t0;
    c.y.push_back(y);
    c.w.push_back(w);
    while (t < cfg.horizon - 0.5 * dt && y < cfg.length) {
        rk4_step(rhs, t, dt, y, w);
        t += dt;
        if (std::abs(w) > s_guard)
            throw NumericError("trace_characteristic: |w| exceeded the guard (blow-up?)");
        c.y.push_back(y);
        c.w.push_back(w);
    }
    return c;
}

namespace {

struct FanBuild {
    CharacteristicFan fan;
    std::size_t levels = 0;   // usable levels (monotone)
    double margin = 0.0;
};

FanBuild integrate_fan(const ModelConfig& cfg, const GridSpec& grid,
                       const HomogenizedInteraction& hom, const LimitOptions& opts) {
    const double l = cfg.length, T = cfg.horizon;
    const std::size_t nx = static_cast<std::size_t>(grid.nx);
    const std::size_t nt = static_cast<std::size_t>(grid.nt);
    const double dt = T / static_cast<double>(nt);
    const double hx = l / static_cast<double>(nx);
    FanBuild out;
    out.margin = std::max(0.03 * l, 5.0 * hx);
    const Rhs rhs{&cfg, &hom};

    auto integrate = [&](Characteristic& c) {
        double y = c.y0, w = 0.0;
        c.y.push_back(y);
        c.w.push_back(w);
        for (std::size_t k = c.first_level; k < nt; ++k) {
            if (y > l + out.margin) break;
            rk4_step(rhs, static_cast<double>(k) * dt, dt, y, w);
            if (std::abs(w) > opts.s_guard)
                throw NumericError("solve_limit: |w| exceeded the guard (blow-up?)");
            c.y.push_back(y);
            c.w.push_back(w);
        }
    };

    // inflow launches, latest first, then the initial line left to right
    for (std::size_t k = nt + 1; k-- > 0;) {
        Characteristic c;
        c.y0 = 0.0;
        c.t0 = static_cast<double>(k) * dt;
        c.from_boundary = k > 0;
        c.first_level = k;
        integrate(c);
        out.fan.curves.push_back(std::move(c));
    }
    out.fan.dividing_curve = out.fan.curves.size() - 1;
    for (std::size_t i = 1; i <= nx; ++i) {
        Characteristic c;
        c.y0 = static_cast<double>(i) * hx;
        c.t0 = 0.0;
        c.from_boundary = false;
        c.first_level = 0;
        integrate(c);
        out.fan.curves.push_back(std::move(c));
    }

    // monotonicity monitor: neighbor spacing against its value when the pair
    // first became active
    const auto& curves = out.fan.curves;
    std::unordered_map<std::size_t, double> pair_init;
    std::size_t good = nt;
    for (std::size_t k = 0; k <= nt; ++k) {
        double prev_y = -1.0;
        std::size_t prev_idx = 0;
        bool have_prev = false, violated = false;
        for (std::size_t c = 0; c < curves.size(); ++c) {
            if (!curves[c].defined_at(k)) continue;
            const double y = curves[c].y_at(k);
            if (have_prev) {
                const double gap = y - prev_y;
                const std::size_t key = prev_idx * curves.size() + c;
                auto it = pair_init.find(key);
                if (it == pair_init.end()) {
                    pair_init.emplace(key, std::max(gap, 1e-300));
                } else {
                    if (gap <= opts.crossing_tol * it->second) {
                        violated = true;
                        break;
                    }
                    if (prev_y < l && gap > std::max(2.0 * hx, 3.0 * it->second))
                        throw NumericError("solve_limit: fan coverage gap exceeds tolerance");
                }
            }
            prev_y = y;
            prev_idx = c;
            have_prev = true;
        }
        if (violated) {
            if (k == 0) throw NumericError("solve_limit: fan crosses at t = 0 (invalid data)");
            good = k - 1;
            break;
        }
    }
    out.levels = good + 1;
    return out;
}

GridField2D resample_fan(const CharacteristicFan& fan, std::size_t levels, double l,
                         std::size_t nx, double dt, double margin, bool use_w) {
    UniformAxis ax{0.0, l / static_cast<double>(nx), nx + 1};
    UniformAxis at{0.0, dt, levels};
    GridField2D field(ax, at);
    Vec ys, vs;
    for (std::size_t k = 0; k < levels; ++k) {
        ys.clear();
        vs.clear();
        for (const auto& c : fan.curves) {
            if (!c.defined_at(k)) continue;
            const double y = c.y_at(k);
            if (y > l + margin) continue;
            if (!ys.empty() && y <= ys.back() + 1e-14 * l) continue;
            ys.push_back(y);
            vs.push_back(use_w ? c.w_at(k) : 0.0);
        }
        if (k == 0) {
            for (std::size_t i = 0; i <= nx; ++i) field.at(i, 0) = 0.0;
            continue;
        }
        if (ys.size() < 4 || ys.front() > 1e-12 * l || ys.back() < l)
            throw NumericError("solve_limit: fan does not cover the axis at level " +
                               std::to_string(k));
        CubicSpline s(ys, vs);
        double* row = field.slice(k);
        row[0] = vs.front();
        for (std::size_t i = 1; i <= nx; ++i)
            row[i] = s.value(static_cast<double>(i) * ax.step);
    }
    return field;
}

// fills first/second x-derivatives and the time derivative from the values
void derivative_fields(const GridField2D& w, GridField2D& dx, GridField2D& dt_field,
                       GridField2D& dxx, double hx, double dt) {
    const std::size_t nx = w.nx(), nl = w.nt();
    Vec row(nx), col(nl);
    for (std::size_t k = 0; k < nl; ++k) {
        const double* src = w.slice(k);
        Vec r(src, src + nx);
        Vec d1 = deriv1_uniform(r, hx);
        Vec d2 = deriv2_uniform(r, hx);
        std::copy(d1.begin(), d1.end(), dx.slice(k));
        std::copy(d2.begin(), d2.end(), dxx.slice(k));
    }
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t k = 0; k < nl; ++k) col[k] = w.at(i, k);
        Vec d = deriv1_uniform(col, dt);
        for (std::size_t k = 0; k < nl; ++k) dt_field.at(i, k) = d[k];
    }
}

} // namespace

LimitSolution solve_limit(const ModelConfig& cfg, const GridSpec& grid,
                          const CrossSectionMesh& mesh, const LimitOptions& opts) {
    const HomogenizedInteraction hom(cfg.interaction, mesh);
    const double dt = cfg.horizon / static_cast<double>(grid.nt);
    const double hx = cfg.length / static_cast<double>(grid.nx);
    FanBuild fb = integrate_fan(cfg, grid, hom, opts);
    if (fb.levels < 6)
        throw NumericError("solve_limit: classical horizon shorter than six time levels");

    LimitSolution lim;
    lim.w0 = resample_fan(fb.fan, fb.levels, cfg.length, static_cast<std::size_t>(grid.nx), dt,
                          fb.margin, true);
    lim.T1_observed = static_cast<double>(fb.levels - 1) * dt;
    UniformAxis ax = lim.w0.xaxis(), at = lim.w0.taxis();
    lim.dw0_dx = GridField2D(ax, at);
    lim.dw0_dt = GridField2D(ax, at);
    lim.d2w0_dxx = GridField2D(ax, at);
    derivative_fields(lim.w0, lim.dw0_dx, lim.dw0_dt, lim.d2w0_dxx, hx, dt);
    lim.fan = std::move(fb.fan);
    return lim;
}

namespace {

// assembles Lambda(w0(x,t), x, t) and its total x-derivative on the grid
void lambda_fields(const ModelConfig& cfg, const LimitSolution& lim, GridField2D& lam,
                   GridField2D& dlam_dx) {
    const UniformAxis ax = lim.w0.xaxis(), at = lim.w0.taxis();
    lam = GridField2D(ax, at);
    dlam_dx = GridField2D(ax, at);
    for (std::size_t k = 0; k < at.count; ++k) {
        const double t = at.origin + at.step * static_cast<double>(k);
        for (std::size_t i = 0; i < ax.count; ++i) {
            const double x = ax.origin + ax.step * static_cast<double>(i);
            lam.at(i, k) = lambda_speed(lim.w0.at(i, k), x, t, cfg.velocity);
        }
        const double* src = lam.slice(k);
        Vec row(src, src + ax.count);
        Vec d = deriv1_uniform(row, ax.step);
        std::copy(d.begin(), d.end(), dlam_dx.slice(k));
    }
}

double nonlocal_value(const GridField2D& nonlocal, double x, double t) {
    if (nonlocal.nx() == 0) return 0.0;
    return nonlocal.value(x, t);
}

} // namespace

W1Solution solve_w1(const ModelConfig& cfg, const LimitSolution& lim, const GridField2D& nonlocal,
                    const CrossSectionMesh& mesh) {
    const HomogenizedInteraction hom(cfg.interaction, mesh);
    const UniformAxis ax = lim.w0.xaxis(), at = lim.w0.taxis();
    const double hx = ax.step, dt = at.step;
    W1Solution sol;
    lambda_fields(cfg, lim, sol.lam, sol.dlam_dx);
    sol.f1 = GridField2D(ax, at);
    GridField2D coeff(ax, at);
    for (std::size_t k = 0; k < at.count; ++k) {
        const double t = at.step * static_cast<double>(k);
        for (std::size_t i = 0; i < ax.count; ++i) {
            const double x = ax.step * static_cast<double>(i);
            sol.f1.at(i, k) = lim.d2w0_dxx.at(i, k) - nonlocal_value(nonlocal, x, t);
            coeff.at(i, k) =
                sol.dlam_dx.at(i, k) + hom.hat_ds(lim.w0.at(i, k), x, t);
        }
    }

    // transport dw1/dt = f1 - coeff w1 along the stored fan positions
    const double l = cfg.length;
    const double margin = std::max(0.03 * l, 5.0 * hx);
    CharacteristicFan fan_w1 = lim.fan; // reuse geometry, rewrite the w payload
    for (auto& c : fan_w1.curves) {
        double v = 0.0;
        c.w[0] = 0.0;
        for (std::size_t s = 0; s + 1 < c.y.size(); ++s) {
            const std::size_t k = c.first_level + s;
            const double t = dt * static_cast<double>(k);
            const double ya = std::clamp(c.y[s], 0.0, l);
            const double yb = std::clamp(c.y[s + 1], 0.0, l);
            const double ym = 0.5 * (ya + yb);
            auto rhs = [&](double tt, double yy, double vv) {
                return sol.f1.value(yy, std::min(tt, lim.T1_observed)) -
                       coeff.value(yy, std::min(tt, lim.T1_observed)) * vv;
            };
            const double k1 = rhs(t, ya, v);
            const double k2 = rhs(t + 0.5 * dt, ym, v + 0.5 * dt * k1);
            const double k3 = rhs(t + 0.5 * dt, ym, v + 0.5 * dt * k2);
            const double k4 = rhs(t + dt, yb, v + dt * k3);
            v += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
            c.w[s + 1] = v;
        }
    }
    sol.w1 = resample_fan(fan_w1, at.count, l, ax.count - 1, dt, margin, true);
    return sol;
}

LimitSolution solve_cauchy_limit(const ModelConfig& cfg, const GridSpec& grid,
                                 const CrossSectionMesh& mesh, double s_guard) {
    const HomogenizedInteraction hom(cfg.interaction, mesh);
    const std::size_t nx = static_cast<std::size_t>(grid.nx);
    const std::size_t nt = static_cast<std::size_t>(grid.nt);
    const double hx = cfg.length / static_cast<double>(nx);
    const double dt = cfg.horizon / static_cast<double>(nt);
    UniformAxis ax{0.0, hx, nx + 1};
    UniformAxis at{0.0, dt, nt + 1};
    LimitSolution lim;
    lim.w0 = GridField2D(ax, at);
    for (std::size_t i = 0; i <= nx; ++i) {
        const double x = hx * static_cast<double>(i);
        double w = 0.0;
        lim.w0.at(i, 0) = 0.0;
        for (std::size_t k = 0; k < nt; ++k) {
            const double t = dt * static_cast<double>(k);
            auto rhs = [&](double tt, double ww) { return -hom.hat(ww, x, tt); };
            const double k1 = rhs(t, w);
            const double k2 = rhs(t + 0.5 * dt, w + 0.5 * dt * k1);
            const double k3 = rhs(t + 0.5 * dt, w + 0.5 * dt * k2);
            const double k4 = rhs(t + dt, w + dt * k3);
            w += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
            if (std::abs(w) > s_guard)
                throw NumericError("solve_cauchy_limit: |w| exceeded the guard");
            lim.w0.at(i, k + 1) = w;
        }
    }
    lim.T1_observed = cfg.horizon;
    lim.dw0_dx = GridField2D(ax, at);
    lim.dw0_dt = GridField2D(ax, at);
    lim.d2w0_dxx = GridField2D(ax, at);
    derivative_fields(lim.w0, lim.dw0_dx, lim.dw0_dt, lim.d2w0_dxx, hx, dt);
    return lim;
}

W1Solution solve_cauchy_w1(const ModelConfig& cfg, const LimitSolution& lim,
                           const GridField2D& nonlocal, const CrossSectionMesh& mesh) {
    const HomogenizedInteraction hom(cfg.interaction, mesh);
    const UniformAxis ax = lim.w0.xaxis(), at = lim.w0.taxis();
    const double dt = at.step;
    W1Solution sol;
    lambda_fields(cfg, lim, sol.lam, sol.dlam_dx);
    // flux divergence source: d/dx1 [ v1(w0, x1, t) w0 ]
    GridField2D dflux(ax, at);
    for (std::size_t k = 0; k < at.count; ++k) {
        const double t = dt * static_cast<double>(k);
        Vec row(ax.count);
        for (std::size_t i = 0; i < ax.count; ++i) {
            const double x = ax.step * static_cast<double>(i);
            row[i] = cfg.velocity.v1(lim.w0.at(i, k), x, t) * lim.w0.at(i, k);
        }
        Vec d = deriv1_uniform(row, ax.step);
        std::copy(d.begin(), d.end(), dflux.slice(k));
    }
    sol.f1 = GridField2D(ax, at);
    for (std::size_t k = 0; k < at.count; ++k) {
        const double t = dt * static_cast<double>(k);
        for (std::size_t i = 0; i < ax.count; ++i)
            sol.f1.at(i, k) = -nonlocal_value(nonlocal, ax.step * static_cast<double>(i), t);
    }
    sol.w1 = GridField2D(ax, at);
    for (std::size_t i = 0; i < ax.count; ++i) {
        const double x = ax.step * static_cast<double>(i);
        double v = 0.0;
        sol.w1.at(i, 0) = 0.0;
        for (std::size_t k = 0; k + 1 < at.count; ++k) {
            const double t = dt * static_cast<double>(k);
            auto rhs = [&](double tt, double vv) {
                const double tc = std::min(tt, lim.T1_observed);
                const double w0v = lim.w0.value(x, tc);
                return -hom.hat_ds(w0v, x, tc) * vv - dflux.value(x, tc) + sol.f1.value(x, tc);
            };
            const double k1 = rhs(t, v);
            const double k2 = rhs(t + 0.5 * dt, v + 0.5 * dt * k1);
            const double k3 = rhs(t + 0.5 * dt, v + 0.5 * dt * k2);
            const double k4 = rhs(t + dt, v + dt * k3);
            v += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
            sol.w1.at(i, k + 1) = v;
        }
    }
    return sol;
}

double limit_residual(const ModelConfig& cfg, const LimitSolution& lim,
                      const CrossSectionMesh& mesh) {
    const HomogenizedInteraction hom(cfg.interaction, mesh);
    const UniformAxis ax = lim.w0.xaxis(), at = lim.w0.taxis();
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < at.count; ++k) {
        const double t = at.step * static_cast<double>(k);
        for (std::size_t i = 1; i + 1 < ax.count; ++i) {
            const double x = ax.step * static_cast<double>(i);
            const double w = lim.w0.at(i, k);
            const double r = lim.dw0_dt.at(i, k) +
                             lambda_speed(w, x, t, cfg.velocity) * lim.dw0_dx.at(i, k) -
                             forcing(w, x, t, cfg.velocity, hom);
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

double w1_residual(const ModelConfig& cfg, const LimitSolution& lim, const W1Solution& sol,
                   const CrossSectionMesh& mesh) {
    const HomogenizedInteraction hom(cfg.interaction, mesh);
    const UniformAxis ax = lim.w0.xaxis(), at = lim.w0.taxis();
    const double dt = at.step, hx = ax.step;
    // time derivative of w1 and x-derivative of w1 from the stored grid
    GridField2D dw1dt(ax, at), dw1dx(ax, at);
    {
        Vec col(at.count);
        for (std::size_t i = 0; i < ax.count; ++i) {
            for (std::size_t k = 0; k < at.count; ++k) col[k] = sol.w1.at(i, k);
            Vec d = deriv1_uniform(col, dt);
            for (std::size_t k = 0; k < at.count; ++k) dw1dt.at(i, k) = d[k];
        }
        for (std::size_t k = 0; k < at.count; ++k) {
            const double* src = sol.w1.slice(k);
            Vec row(src, src + ax.count);
            Vec d = deriv1_uniform(row, hx);
            std::copy(d.begin(), d.end(), dw1dx.slice(k));
        }
    }
    double worst = 0.0;
    const bool advective = cfg.beta < 3.0;
    for (std::size_t k = 1; k + 1 < at.count; ++k) {
        const double t = at.step * static_cast<double>(k);
        for (std::size_t i = 1; i + 1 < ax.count; ++i) {
            const double x = ax.step * static_cast<double>(i);
            const double w0v = lim.w0.at(i, k);
            double r = dw1dt.at(i, k) + hom.hat_ds(w0v, x, t) * sol.w1.at(i, k) -
                       sol.f1.at(i, k);
            if (advective)
                r += sol.lam.at(i, k) * dw1dx.at(i, k) + sol.dlam_dx.at(i, k) * sol.w1.at(i, k);
            else
                r += cfg.velocity.v1(w0v, x, t) * lim.dw0_dx.at(i, k) +
                     w0v * cfg.velocity.dv1_dx1(w0v, x, t) +
                     lim.dw0_dx.at(i, k) * w0v * cfg.velocity.dv1_ds(w0v, x, t);
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

} // namespace thincyl
