#include "thincyl/refsolve.hpp"

#include <algorithm>
#include <cmath>

#include "thincyl/mesh.hpp"

namespace thincyl {

AxisymmetryCheck require_axisymmetric(const ModelConfig& cfg) {
    AxisymmetryCheck out;
    if (cfg.cross_section.kind != CrossSectionSpec::Kind::disk) {
        out.pass = false;
        out.what = "cross-section is not a disk";
        return out;
    }
    const double r0 = cfg.cross_section.radius;
    const double tol = 1e-10;
    const int na = 24, ns = 5, nx = 9, ntt = 7, nrho = 4;
    for (int is = 0; is < ns && out.pass; ++is)
        for (int ix = 0; ix < nx && out.pass; ++ix)
            for (int it = 0; it < ntt && out.pass; ++it) {
                const double s = 2.0 * is / double(ns - 1);
                const double x = cfg.length * ix / double(nx - 1);
                const double t = cfg.horizon * it / double(ntt - 1);
                for (int irho = 1; irho <= nrho && out.pass; ++irho) {
                    const double rho = r0 * irho / double(nrho);
                    const double ref = cfg.interaction.phi(s, x, rho, 0.0, t);
                    const auto vref = cfg.velocity.vbar(x, rho, 0.0, t);
                    for (int ia = 1; ia < na; ++ia) {
                        const double th = 2.0 * M_PI * ia / na;
                        const double c = std::cos(th), sn = std::sin(th);
                        const double xi2 = rho * c, xi3 = rho * sn;
                        const double dphi =
                            std::abs(cfg.interaction.phi(s, x, xi2, xi3, t) - ref);
                        if (dphi > tol) {
                            out.pass = false;
                            out.worst = dphi;
                            out.what = "interaction depends on the angular variable";
                            break;
                        }
                        const auto v = cfg.velocity.vbar(x, xi2, xi3, t);
                        // radial field: components rotate with the point
                        const double er2 = v[0] * c + v[1] * sn;   // radial part
                        const double et = -v[0] * sn + v[1] * c;   // tangential part
                        const double dv = std::abs(et) + std::abs(er2 - vref[0]);
                        if (dv > tol) {
                            out.pass = false;
                            out.worst = dv;
                            out.what = "transversal velocity is not a radial field";
                            break;
                        }
                    }
                }
            }
    return out;
}

namespace {

double estimate_max_speed(const ModelConfig& cfg, double adv_scale) {
    double m = 1e-6;
    for (int is = 0; is <= 12; ++is)
        for (int ix = 0; ix <= 12; ++ix)
            for (int it = 0; it <= 12; ++it) {
                const double s = 3.0 * is / 12.0;
                const double x = cfg.length * ix / 12.0;
                const double t = cfg.horizon * it / 12.0;
                const double lam =
                    cfg.velocity.v1(s, x, t) + s * cfg.velocity.dv1_ds(s, x, t);
                m = std::max(m, adv_scale * std::abs(lam));
            }
    return m;
}

} // namespace

ReferenceSolver::ReferenceSolver(const ModelConfig& cfg, double eps, ReferenceGrid grid,
                                 TimeScheme scheme, Source source, int picard_sweeps)
    : cfg_(&cfg), eps_(eps), scheme_(scheme), source_(std::move(source)),
      picard_(picard_sweeps) {
    if (cfg.cross_section.kind != CrossSectionSpec::Kind::disk)
        throw NumericError("ReferenceSolver: axisymmetric solver requires a disk section");
    if (grid.nr < 8) throw NumericError("ReferenceSolver: nr must be at least 8");
    nx_ = static_cast<std::size_t>(grid.nx);
    nr_ = static_cast<std::size_t>(grid.nr);
    eps_x_ = cfg.beta == 1.0 ? eps : std::pow(eps, cfg.beta);
    adv_scale_ = cfg.beta == 1.0 ? 1.0 : std::pow(eps, 0.5 * (cfg.beta - 1.0));
    hx_ = cfg.length / static_cast<double>(nx_);
    const double R = eps * cfg.cross_section.radius;
    hr_ = R / static_cast<double>(nr_);
    const double vmax = estimate_max_speed(cfg, adv_scale_);
    if (grid.nt > 0) {
        nt_ = grid.nt;
    } else {
        nt_ = std::max<int>(64, static_cast<int>(std::ceil(cfg.horizon * vmax / (grid.cfl * hx_))));
    }
    dt_ = cfg.horizon / static_cast<double>(nt_);
    // the AB3 + second-order-upwind pair tolerates courant numbers up to
    // about 6/(11*4); forward-Euler advection under backward Euler leans on
    // the implicit diffusion and allows more
    max_courant_ = scheme == TimeScheme::crank_nicolson ? 0.135 : 0.45;
    if (vmax * dt_ / hx_ > max_courant_)
        throw NumericError("ReferenceSolver: CFL violation; max admissible dt = " +
                           std::to_string(max_courant_ * hx_ / vmax));
    theta_ = scheme == TimeScheme::backward_euler ? 1.0 : 0.5;

    xs_.resize(nx_ + 1);
    for (std::size_t i = 0; i <= nx_; ++i) xs_[i] = hx_ * static_cast<double>(i);
    rs_.resize(nr_ + 1);
    rhalf_.resize(nr_ + 1);
    for (std::size_t j = 0; j <= nr_; ++j) {
        rs_[j] = hr_ * static_cast<double>(j);
        rhalf_[j] = hr_ * (static_cast<double>(j) + 0.5);
    }
    wr_.assign(nr_ + 1, 0.0);
    wr_[0] = hr_ * hr_ / 8.0;
    for (std::size_t j = 1; j < nr_; ++j) wr_[j] = rs_[j] * hr_;
    wr_[nr_] = (R - 0.25 * hr_) * 0.5 * hr_;
    wx_.assign(nx_ + 1, hx_);
    wx_[0] = wx_[nx_] = 0.5 * hx_;

    const std::size_t n = (nx_ + 1) * (nr_ + 1);
    u_.assign(n, 0.0);
    adv_.assign(n, 0.0);
    adv_prev_.assign(n, 0.0);
    adv_prev2_.assign(n, 0.0);
    drn_.assign(n, 0.0);
    dxn_.assign(n, 0.0);
    stage_.assign(n, 0.0);
    mass_residuals_.reserve(static_cast<std::size_t>(nt_));
}

double ReferenceSolver::lateral_phi(double s, double x, double t) const {
    const double r0 = cfg_->cross_section.radius;
    return cfg_->interaction.phi(s, x, r0, 0.0, t);
}

double ReferenceSolver::lateral_vr(double x, double t) const {
    if (cfg_->velocity.vbar_zero) return 0.0;
    const double r0 = cfg_->cross_section.radius;
    return cfg_->velocity.vbar(x, r0, 0.0, t)[0];
}

void ReferenceSolver::advection(const Vec& u, double t, Vec& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    const auto& vel = cfg_->velocity;
    double speed_max = 0.0;
    Vec flux(nx_); // face i+1/2 for i=0..nx-1
    for (std::size_t j = 0; j < nr_; ++j) {
        for (std::size_t i = 0; i < nx_; ++i) {
            const double ul = i == 0 ? u[index(0, j)]
                                     : 1.5 * u[index(i, j)] - 0.5 * u[index(i - 1, j)];
            const double xf = hx_ * (static_cast<double>(i) + 0.5);
            const double v = adv_scale_ * vel.v1(ul, xf, t);
            flux[i] = ul * v;
            speed_max = std::max(
                speed_max, std::abs(v + adv_scale_ * ul * vel.dv1_ds(ul, xf, t)));
        }
        for (std::size_t i = 1; i < nx_; ++i)
            out[index(i, j)] = -(flux[i] - flux[i - 1]) / hx_;
    }
    if (!cfg_->velocity.vbar_zero) {
        for (std::size_t i = 1; i < nx_; ++i) {
            const double x = xs_[i];
            double below = 0.0; // r * radial advective flux at face j-1/2
            for (std::size_t j = 0; j < nr_; ++j) {
                const double rho_face = rhalf_[j] / eps_;
                const double vr = eps_ * cfg_->velocity.vbar(x, rho_face, 0.0, t)[0];
                const double uface = 0.5 * (u[index(i, j)] + u[index(i, j + 1)]);
                const double above = rhalf_[j] * vr * uface;
                const double measure = j == 0 ? hr_ * hr_ / 8.0 : rs_[j] * hr_;
                out[index(i, j)] -= (above - below) / measure;
                below = above;
            }
        }
    }
    if (speed_max * dt_ / hx_ > max_courant_)
        throw NumericError("ReferenceSolver: CFL violation during run; max admissible dt = " +
                           std::to_string(max_courant_ * hx_ / speed_max));
}

void ReferenceSolver::diffusion_x(const Vec& u, Vec& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    const double c = eps_x_ / (hx_ * hx_);
    for (std::size_t j = 0; j < nr_; ++j)
        for (std::size_t i = 1; i < nx_; ++i)
            out[index(i, j)] =
                c * (u[index(i - 1, j)] - 2.0 * u[index(i, j)] + u[index(i + 1, j)]);
}

void ReferenceSolver::diffusion_r(const Vec& u, Vec& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 1; i < nx_; ++i) {
        out[index(i, 0)] = eps_ * 4.0 * (u[index(i, 1)] - u[index(i, 0)]) / (hr_ * hr_);
        for (std::size_t j = 1; j < nr_; ++j) {
            out[index(i, j)] = eps_ *
                               (rhalf_[j] * (u[index(i, j + 1)] - u[index(i, j)]) -
                                rhalf_[j - 1] * (u[index(i, j)] - u[index(i, j - 1)])) /
                               (rs_[j] * hr_ * hr_);
        }
    }
}

void ReferenceSolver::radial_solve(std::size_t i, double t_new, const Vec& rhs_col,
                                   const Vec& phi_arg, Vec& out_col) {
    const std::size_t m = nr_ + 1;
    static thread_local Vec low, diag, up, rhs;
    low.assign(m, 0.0);
    diag.assign(m, 1.0);
    up.assign(m, 0.0);
    rhs.assign(m, 0.0);
    const double c0 = theta_ * dt_ * eps_ * 4.0 / (hr_ * hr_);
    diag[0] = 1.0 + c0;
    up[0] = -c0;
    rhs[0] = rhs_col[0];
    for (std::size_t j = 1; j < nr_; ++j) {
        const double cp = theta_ * dt_ * eps_ * rhalf_[j] / (rs_[j] * hr_ * hr_);
        const double cm = theta_ * dt_ * eps_ * rhalf_[j - 1] / (rs_[j] * hr_ * hr_);
        low[j] = -cm;
        diag[j] = 1.0 + cp + cm;
        up[j] = -cp;
        rhs[j] = rhs_col[j];
    }
    // lateral Robin row, one-sided second order:
    // (u[nr-2] - 4 u[nr-1] + 3 u[nr]) / (2 hr) = vr u[nr] - phi
    const double x = xs_[i];
    const double a = 1.0 / (2.0 * hr_);
    const double b = -4.0 / (2.0 * hr_);
    double c = 3.0 / (2.0 * hr_) - lateral_vr(x, t_new);
    double d = -lateral_phi(phi_arg[i], x, t_new);

    for (std::size_t j = 1; j < nr_; ++j) {
        const double mfac = low[j] / diag[j - 1];
        diag[j] -= mfac * up[j - 1];
        rhs[j] -= mfac * rhs[j - 1];
    }
    // eliminate the Robin row against the two factored rows above it
    double bb = b - a * up[nr_ - 2] / diag[nr_ - 2];
    double dd = d - a * rhs[nr_ - 2] / diag[nr_ - 2];
    c -= bb * up[nr_ - 1] / diag[nr_ - 1];
    dd -= bb * rhs[nr_ - 1] / diag[nr_ - 1];
    out_col[nr_] = dd / c;
    for (std::size_t j = nr_; j-- > 0;)
        out_col[j] = (rhs[j] - up[j] * out_col[j + 1]) / diag[j];
}

void ReferenceSolver::step() {
    const double t_old = time();
    const double t_new = t_old + dt_;
    const double t_src = scheme_ == TimeScheme::crank_nicolson ? t_old + 0.5 * dt_ : t_new;
    const double qv = cfg_->boundary.q(t_new);

    advection(u_, t_old, adv_);
    // Adams-Bashforth weights for the explicit flux (FE/AB2 startup)
    double wa = 1.0, wb = 0.0, wc = 0.0;
    if (scheme_ == TimeScheme::crank_nicolson) {
        if (adv_history_ == 1) {
            wa = 1.5;
            wb = -0.5;
        } else if (adv_history_ >= 2) {
            wa = 23.0 / 12.0;
            wb = -16.0 / 12.0;
            wc = 5.0 / 12.0;
        }
    }
    diffusion_r(u_, drn_);
    diffusion_x(u_, dxn_);

    // stage 1: axial implicit sweep per radial line
    static thread_local Vec tl, td, tu, tr, col_rhs, col_out, phi_arg;
    tl.assign(nx_ + 1, 0.0);
    td.assign(nx_ + 1, 1.0);
    tu.assign(nx_ + 1, 0.0);
    tr.assign(nx_ + 1, 0.0);
    const double cx = theta_ * dt_ * eps_x_ / (hx_ * hx_);
    for (std::size_t j = 0; j < nr_; ++j) {
        td[0] = 1.0;
        tu[0] = 0.0;
        tr[0] = 0.0;
        for (std::size_t i = 1; i < nx_; ++i) {
            tl[i] = -cx;
            td[i] = 1.0 + 2.0 * cx;
            tu[i] = -cx;
            const double ae = wa * adv_[index(i, j)] + wb * adv_prev_[index(i, j)] +
                              wc * adv_prev2_[index(i, j)];
            double rhs = u_[index(i, j)] +
                         dt_ * (ae + (1.0 - theta_) * dxn_[index(i, j)] + drn_[index(i, j)]);
            if (source_) rhs += dt_ * source_(xs_[i], rs_[j], t_src);
            tr[i] = rhs;
        }
        tl[nx_] = 0.0;
        td[nx_] = 1.0;
        tr[nx_] = qv;
        for (std::size_t i = 1; i <= nx_; ++i) {
            const double mfac = tl[i] / td[i - 1];
            td[i] -= mfac * tu[i - 1];
            tr[i] -= mfac * tr[i - 1];
        }
        stage_[index(nx_, j)] = tr[nx_] / td[nx_];
        for (std::size_t i = nx_; i-- > 0;)
            stage_[index(i, j)] =
                (tr[i] - tu[i] * stage_[index(i + 1, j)]) / td[i];
    }

    // stage 2: radial implicit sweep per axial station, Robin row at the wall
    Vec unew(u_.size(), 0.0);
    for (std::size_t j = 0; j <= nr_; ++j) {
        unew[index(0, j)] = 0.0;
        unew[index(nx_, j)] = qv;
    }
    col_rhs.assign(nr_ + 1, 0.0);
    col_out.assign(nr_ + 1, 0.0);
    phi_arg.assign(nx_ + 1, 0.0);
    for (std::size_t i = 0; i <= nx_; ++i) phi_arg[i] = u_[index(i, nr_)];
    for (int sweep = 0; sweep <= picard_; ++sweep) {
        for (std::size_t i = 1; i < nx_; ++i) {
            for (std::size_t j = 0; j < nr_; ++j)
                col_rhs[j] = stage_[index(i, j)] - theta_ * dt_ * drn_[index(i, j)];
            radial_solve(i, t_new, col_rhs, phi_arg, col_out);
            for (std::size_t j = 0; j <= nr_; ++j) unew[index(i, j)] = col_out[j];
        }
        for (std::size_t i = 1; i < nx_; ++i) phi_arg[i] = unew[index(i, nr_)];
    }

    for (double v : unew)
        if (!std::isfinite(v)) throw NumericError("ReferenceSolver: nonfinite value");
    account_mass(unew, u_, t_old, t_new);

    adv_prev2_ = adv_prev_;
    adv_prev_ = adv_;
    ++adv_history_;
    u_ = std::move(unew);
    ++step_;
}

void ReferenceSolver::account_mass(const Vec& unew, const Vec& uold, double t_old,
                                   double t_new) {
    // audit the mass rate against the physical boundary fluxes: advective and
    // diffusive end fluxes plus the lateral Robin datum; the residual is the
    // scheme truncation and must shrink under refinement
    auto mass = [&](const Vec& u) {
        double acc = 0.0;
        for (std::size_t i = 0; i <= nx_; ++i)
            for (std::size_t j = 0; j <= nr_; ++j) acc += wx_[i] * wr_[j] * u[index(i, j)];
        return acc;
    };
    const auto& vel = cfg_->velocity;
    const double R = hr_ * static_cast<double>(nr_);
    auto budget = [&](const Vec& u, double t) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= nr_; ++j) {
            const double uin = u[index(0, j)], uout = u[index(nx_, j)];
            const double fin = uin * adv_scale_ * vel.v1(uin, 0.0, t) -
                               eps_x_ *
                                   (-3.0 * u[index(0, j)] + 4.0 * u[index(1, j)] -
                                    u[index(2, j)]) /
                                   (2.0 * hx_);
            const double fout =
                uout * adv_scale_ * vel.v1(uout, cfg_->length, t) -
                eps_x_ *
                    (3.0 * u[index(nx_, j)] - 4.0 * u[index(nx_ - 1, j)] +
                     u[index(nx_ - 2, j)]) /
                    (2.0 * hx_);
            acc += wr_[j] * (fin - fout);
        }
        // the Robin condition collapses the lateral flux density to -eps phi
        for (std::size_t i = 0; i <= nx_; ++i) {
            const double uw = u[index(i, nr_)];
            acc -= wx_[i] * eps_ * R * lateral_phi(uw, xs_[i], t);
        }
        return acc;
    };
    double src_mass = 0.0;
    if (source_) {
        const double t_src =
            scheme_ == TimeScheme::crank_nicolson ? t_old + 0.5 * dt_ : t_new;
        for (std::size_t i = 0; i <= nx_; ++i)
            for (std::size_t j = 0; j <= nr_; ++j)
                src_mass += wx_[i] * wr_[j] * source_(xs_[i], rs_[j], t_src);
    }
    const double flux =
        theta_ * budget(unew, t_new) + (1.0 - theta_) * budget(uold, t_old);
    const double rate = (mass(unew) - mass(uold)) / dt_;
    mass_residuals_.push_back(std::abs(rate - (flux + src_mass)));
}

double ReferenceSolver::max_mass_residual() const {
    double m = 0.0;
    for (double r : mass_residuals_) m = std::max(m, r);
    return m;
}

double ReferenceSolver::max_abs_u() const {
    double m = 0.0;
    for (double v : u_) m = std::max(m, std::abs(v));
    return m;
}

ReferenceSolution solve_reference(const ModelConfig& cfg, double eps, const ReferenceGrid& grid,
                                  TimeScheme scheme, const std::vector<double>& snapshot_times,
                                  ReferenceSolver::Source source) {
    const AxisymmetryCheck axi = require_axisymmetric(cfg);
    if (!axi.pass) throw NumericError("solve_reference: " + axi.what);
    ReferenceSolver solver(cfg, eps, grid, scheme, std::move(source));
    ReferenceSolution sol;
    sol.xs = solver.xs();
    sol.rs = solver.rs();
    sol.eps = eps;
    sol.dt = solver.dt();
    sol.nx = solver.nx();
    sol.nr = solver.nr();
    std::size_t next_snap = 0;
    auto maybe_snapshot = [&]() {
        while (next_snap < snapshot_times.size() &&
               solver.time() >= snapshot_times[next_snap] - 0.5 * solver.dt()) {
            sol.snapshots.push_back(solver.u());
            sol.snapshot_times.push_back(solver.time());
            ++next_snap;
        }
    };
    maybe_snapshot();
    while (solver.steps_done() < solver.total_steps()) {
        solver.step();
        maybe_snapshot();
    }
    if (snapshot_times.empty()) {
        sol.snapshots.push_back(solver.u());
        sol.snapshot_times.push_back(solver.time());
    }
    sol.steps = solver.steps_done();
    sol.mass_residuals = solver.mass_residuals();
    return sol;
}

Vec flux_balance(const ReferenceSolution& sol) { return sol.mass_residuals; }

MmsReport mms_self_test(const ModelConfig& cfg, double eps) {
    ModelConfig m = cfg;
    m.interaction_ref = {"zero", {}};
    m.boundary_ref = {"zero", {}};
    m.interaction = make_interaction("zero", {});
    m.boundary = make_boundary("zero", {});
    m.velocity.vbar = [](double, double, double, double) {
        return std::array<double, 2>{0.0, 0.0};
    };
    m.velocity.vbar_zero = true;

    const double l = m.length, T = m.horizon;
    const double eps_x = m.beta == 1.0 ? eps : std::pow(eps, m.beta);
    const double adv_scale = m.beta == 1.0 ? 1.0 : std::pow(eps, 0.5 * (m.beta - 1.0));
    auto g = [T](double t) { return ramp_cinf(t, 0.3 * T); };
    auto gd = [T](double t) { return ramp_cinf_d1(t, 0.3 * T); };
    auto ustar = [&](double x, double t) {
        const double s = std::sin(M_PI * x / l);
        return g(t) * s * s;
    };
    auto source = [&](double x, double, double t) {
        const double s = std::sin(M_PI * x / l), c = std::cos(M_PI * x / l);
        const double u = g(t) * s * s;
        const double ux = g(t) * M_PI / l * 2.0 * s * c;
        const double uxx = g(t) * 2.0 * (M_PI / l) * (M_PI / l) * (c * c - s * s);
        const double lam = m.velocity.v1(u, x, t) + u * m.velocity.dv1_ds(u, x, t);
        return gd(t) * s * s + adv_scale * (lam * ux + u * m.velocity.dv1_dx1(u, x, t)) -
               eps_x * uxx;
    };
    auto run = [&](int nx, int nt, TimeScheme scheme) {
        ReferenceGrid grid;
        grid.nx = nx;
        grid.nr = 8;
        grid.nt = nt;
        ReferenceSolver solver(m, eps, grid, scheme, source);
        while (solver.steps_done() < solver.total_steps()) solver.step();
        double err = 0.0;
        for (std::size_t i = 0; i <= solver.nx(); ++i)
            for (std::size_t j = 0; j <= solver.nr(); ++j)
                err = std::max(err, std::abs(solver.u()[solver.index(i, j)] -
                                             ustar(solver.xs()[i], solver.time())));
        struct {
            double err, dt, res;
        } out{err, solver.dt(), solver.max_mass_residual()};
        return out;
    };

    MmsReport rep;
    {
        Vec lh, le, ld;
        for (int nx : {64, 128, 256}) {
            ReferenceGrid probe;
            probe.nx = nx;
            probe.nr = 8;
            const int nt_auto = ReferenceSolver(m, eps, probe).total_steps();
            auto r = run(nx, std::max(nt_auto, nx), TimeScheme::crank_nicolson);
            lh.push_back(std::log(l / nx));
            ld.push_back(std::log(r.dt));
            le.push_back(std::log(r.err));
            rep.spatial_errors.push_back(r.err);
        }
        rep.spatial_slope = fit_line(lh, le).slope;
        rep.temporal_slope_cn = fit_line(ld, le).slope;
    }
    {
        // conservation audit on the configured physics (the manufactured run
        // has no lateral coupling, so its imbalance sits at roundoff)
        auto max_res = [&](int nx, int nr) {
            ReferenceGrid grid;
            grid.nx = nx;
            grid.nr = nr;
            ReferenceSolver solver(cfg, eps, grid, TimeScheme::crank_nicolson);
            while (solver.steps_done() < solver.total_steps()) solver.step();
            return std::max(solver.max_mass_residual(), 1e-300);
        };
        rep.flux_ratio = max_res(96, 8) / max_res(192, 16);
    }
    {
        // backward Euler at fixed fine mesh, dt refined below the CFL bound
        const int nx = 512;
        ReferenceGrid probe;
        probe.nx = nx;
        probe.nr = 8;
        ReferenceSolver tmp(m, eps, probe, TimeScheme::backward_euler, source);
        const int nt0 = tmp.total_steps();
        Vec ld, le;
        for (int f : {1, 2, 4}) {
            auto r = run(nx, nt0 * f, TimeScheme::backward_euler);
            ld.push_back(std::log(r.dt));
            le.push_back(std::log(r.err));
            rep.temporal_errors_be.push_back(r.err);
        }
        rep.temporal_slope_be = fit_line(ld, le).slope;
    }
    return rep;
}

} // namespace thincyl
