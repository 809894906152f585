#include "thincyl/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "thincyl/cell.hpp"

namespace thincyl {

namespace {

Vec cell_centers(const Vec& nodes) {
    Vec c(nodes.size() - 1);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) c[i] = 0.5 * (nodes[i] + nodes[i + 1]);
    return c;
}

} // namespace

ErrorAccumulator::ErrorAccumulator(const ModelConfig& cfg, double eps,
                                   const ApproximationField& first,
                                   const ApproximationField& leading, const Vec& xs,
                                   const Vec& rs, double t1)
    : cfg_(&cfg), eps_(eps), t1_(t1), first_(&first), leading_(&leading), xs_(xs), rs_(rs),
      xc_(cell_centers(xs)), rc_(cell_centers(rs)) {}

void ErrorAccumulator::accumulate(const Vec& u, double t, bool first_level, bool last_level,
                                  double dt) {
    if (t > t1_ + 0.5 * dt) return;
    const std::size_t nr1 = rs_.size();
    first_->sample_slice(xs_, rs_, t, buf_);
    leading_->sample_slice(xs_, rs_, t, bufl_);
    for (std::size_t i = 0; i < xs_.size(); ++i) {
        double mean_num = 0.0, mean_den = 0.0;
        for (std::size_t j = 0; j < nr1; ++j) {
            const double uref = u[i * nr1 + j];
            sup_first_ = std::max(sup_first_, std::abs(buf_[i * nr1 + j] - uref));
            sup_leading_ = std::max(sup_leading_, std::abs(bufl_[i * nr1 + j] - uref));
            const double w =
                (j == 0 || j + 1 == nr1 ? 0.5 : 1.0) * rs_[j];
            mean_num += w * uref;
            mean_den += w;
        }
        if (mean_den > 0.0) {
            const double mean = mean_num / mean_den;
            avg_leading_ =
                std::max(avg_leading_, std::abs(mean - leading_->value_radial(xs_[i], 0.0, t)));
        }
    }
    if (dt > 0.0) {
        const double wt = (first_level || last_level) ? 0.5 * dt : dt;
        first_->sample_gradient_slice(xc_, rc_, t, gxa_, gra_);
        const double hx = xs_[1] - xs_[0], hr = rs_[1] - rs_[0];
        double acc = 0.0;
        for (std::size_t i = 0; i < xc_.size(); ++i)
            for (std::size_t j = 0; j < rc_.size(); ++j) {
                const double u00 = u[i * nr1 + j], u01 = u[i * nr1 + j + 1];
                const double u10 = u[(i + 1) * nr1 + j], u11 = u[(i + 1) * nr1 + j + 1];
                const double gxu = 0.5 * ((u10 - u00) + (u11 - u01)) / hx;
                const double gru = 0.5 * ((u01 - u00) + (u11 - u10)) / hr;
                const double dx = gxa_[i * rc_.size() + j] - gxu;
                const double dr = gra_[i * rc_.size() + j] - gru;
                acc += rc_[j] * (dx * dx + dr * dr);
            }
        energy_sq_ += wt * acc * 2.0 * M_PI * hx * hr;
    }
}

ErrorRow ErrorAccumulator::finalize() const {
    ErrorRow row;
    row.eps = eps_;
    row.t1 = t1_;
    row.sup_first = sup_first_;
    row.sup_leading = sup_leading_;
    row.avg_leading = avg_leading_;
    const double r0 = cfg_->cross_section.radius;
    const double vol = M_PI * (eps_ * r0) * (eps_ * r0) * cfg_->length;
    row.energy_first = std::sqrt(energy_sq_ / vol);
    return row;
}

double sup_error(const ReferenceSolution& ref, const ApproximationField& approx) {
    double worst = 0.0;
    Vec buf;
    const double t1 = approx.horizon();
    for (std::size_t s = 0; s < ref.snapshots.size(); ++s) {
        const double t = ref.snapshot_times[s];
        if (t > t1 + 0.5 * ref.dt) continue;
        approx.sample_slice(ref.xs, ref.rs, t, buf);
        const Vec& u = ref.snapshots[s];
        for (std::size_t idx = 0; idx < u.size(); ++idx)
            worst = std::max(worst, std::abs(buf[idx] - u[idx]));
    }
    return worst;
}

double energy_error(const ReferenceSolution& ref, const ApproximationField& approx,
                    const ModelConfig& cfg, double eps) {
    if (ref.snapshots.size() < 2) throw NumericError("energy_error: need >= 2 snapshots");
    const Vec xc = cell_centers(ref.xs), rc = cell_centers(ref.rs);
    const double hx = ref.xs[1] - ref.xs[0], hr = ref.rs[1] - ref.rs[0];
    const std::size_t nr1 = ref.rs.size();
    double total = 0.0;
    Vec gxa, gra;
    const double t1 = approx.horizon();
    for (std::size_t s = 0; s < ref.snapshots.size(); ++s) {
        const double t = ref.snapshot_times[s];
        if (t > t1 + 0.5 * ref.dt) break;
        const double tprev = s == 0 ? ref.snapshot_times[0] : ref.snapshot_times[s - 1];
        const double tnext =
            s + 1 < ref.snapshot_times.size() ? ref.snapshot_times[s + 1] : ref.snapshot_times[s];
        // trapezoid weight: half the spacing on each side
        const double weight = 0.5 * ((t - tprev) + (std::min(tnext, t1) - t));
        approx.sample_gradient_slice(xc, rc, t, gxa, gra);
        const Vec& u = ref.snapshots[s];
        double acc = 0.0;
        for (std::size_t i = 0; i < xc.size(); ++i)
            for (std::size_t j = 0; j < rc.size(); ++j) {
                const double u00 = u[i * nr1 + j], u01 = u[i * nr1 + j + 1];
                const double u10 = u[(i + 1) * nr1 + j], u11 = u[(i + 1) * nr1 + j + 1];
                const double gxu = 0.5 * ((u10 - u00) + (u11 - u01)) / hx;
                const double gru = 0.5 * ((u01 - u00) + (u11 - u10)) / hr;
                const double dx = gxa[i * rc.size() + j] - gxu;
                const double dr = gra[i * rc.size() + j] - gru;
                acc += rc[j] * (dx * dx + dr * dr);
            }
        total += weight * acc * 2.0 * M_PI * hx * hr;
    }
    const double r0 = cfg.cross_section.radius;
    const double vol = M_PI * (eps * r0) * (eps * r0) * cfg.length;
    return std::sqrt(total / vol);
}

double avg_error(const ReferenceSolution& ref, const ApproximationField& leading,
                 const ModelConfig& cfg, double eps) {
    (void)cfg;
    (void)eps;
    double worst = 0.0;
    const std::size_t nr1 = ref.rs.size();
    const double t1 = leading.horizon();
    for (std::size_t s = 0; s < ref.snapshots.size(); ++s) {
        const double t = ref.snapshot_times[s];
        if (t > t1 + 0.5 * ref.dt) continue;
        const Vec& u = ref.snapshots[s];
        for (std::size_t i = 0; i < ref.xs.size(); ++i) {
            double num = 0.0, den = 0.0;
            for (std::size_t j = 0; j < nr1; ++j) {
                const double w = (j == 0 || j + 1 == nr1 ? 0.5 : 1.0) * ref.rs[j];
                num += w * u[i * nr1 + j];
                den += w;
            }
            worst = std::max(worst,
                             std::abs(num / den - leading.value_radial(ref.xs[i], 0.0, t)));
        }
    }
    return worst;
}

StudyParts build_study_parts(const ModelConfig& cfg, const StudyOptions& opts) {
    StudyParts parts{build_mesh(cfg.cross_section, cfg.grid.nxi),
                     NeumannEigenbasis{},
                     LimitSolution{},
                     W1Solution{},
                     CellField{},
                     LayerData{},
                     BoundaryLayerTerm{}};
    parts.basis = neumann_eigenbasis(parts.mesh, cfg.grid.modes);
    if (cfg.beta == 1.0) {
        parts.lim = solve_limit(cfg, cfg.grid, parts.mesh);
    } else {
        parts.lim = solve_cauchy_limit(cfg, cfg.grid, parts.mesh);
    }
    parts.u1 = build_u1(cfg, parts.lim, parts.mesh, opts.cell);
    const GridField2D nonlocal = nonlocal_interaction(cfg, parts.lim, parts.u1);
    parts.w1 = cfg.beta == 1.0 ? solve_w1(cfg, parts.lim, nonlocal, parts.mesh)
                               : solve_cauchy_w1(cfg, parts.lim, nonlocal, parts.mesh);
    // u2 enters only the full-order assembly; first/leading sweeps skip it,
    // so the layer data carries a zero second corrector trace here
    CellField u2_zero;
    u2_zero.mesh = parts.u1.mesh;
    u2_zero.xparams = parts.u1.xparams;
    u2_zero.tparams = parts.u1.tparams;
    u2_zero.values.assign(parts.u1.values.size(),
                          Vec(parts.mesh.nodes.size(), 0.0));
    parts.layer = make_layer_data(cfg, parts.lim, parts.w1, parts.u1, u2_zero, parts.basis);
    parts.pi1t = pi1_tilde_build(parts.layer);
    return parts;
}

ConvergenceTable convergence_study(const ModelConfig& cfg, const StudyOptions& opts) {
    if (cfg.epsilons.size() < 3)
        throw ConfigError("convergence_study: need at least 3 epsilon values");
    const ValidationReport vr = validate_assumptions(cfg);
    if (!vr.all_pass())
        throw ConfigError("convergence_study: configuration fails validation:\n" +
                          format_report(vr));
    const AxisymmetryCheck axi = require_axisymmetric(cfg);
    if (!axi.pass) throw ConfigError("convergence_study: " + axi.what);

    const StudyParts parts = build_study_parts(cfg, opts);
    const AssemblyMode mode =
        cfg.beta == 1.0 ? AssemblyMode::standard : AssemblyMode::high_peclet;

    ConvergenceTable table;
    table.scenario = cfg.scenario;
    table.beta = cfg.beta;
    table.common_t1 = parts.lim.T1_observed;
    table.rows.resize(cfg.epsilons.size());

    auto run_eps = [&](std::size_t r) {
        const double eps = cfg.epsilons[r];
        ApproximationParts ap;
        ap.lim = &parts.lim;
        ap.w1 = &parts.w1;
        ap.u1 = &parts.u1;
        ap.layer = &parts.layer;
        ap.pi1_tilde = &parts.pi1t;
        const ApproximationField first =
            assemble(cfg, eps, ApproxOrder::first, mode, ap);
        const ApproximationField leading =
            assemble(cfg, eps, ApproxOrder::leading, mode, ap);
        ReferenceGrid grid = opts.ref_grid;
        if (grid.nx <= 0) grid.nx = cfg.grid.nx;
        if (grid.nt == 0) {
            // the advective CFL bound decides the step for beta = 1; in the
            // high-Peclet scalings it barely binds, so keep at least the
            // limit-stage resolution for time accuracy
            const int auto_steps = ReferenceSolver(cfg, eps, grid, opts.scheme).total_steps();
            grid.nt = std::max(auto_steps, cfg.grid.nt);
        }
        ReferenceSolver solver(cfg, eps, grid, opts.scheme);
        ErrorAccumulator acc(cfg, eps, first, leading, solver.xs(), solver.rs(),
                             parts.lim.T1_observed);
        const int stride = std::max(1, opts.energy_stride);
        acc.accumulate(solver.u(), 0.0, true, false, solver.dt() * stride);
        while (solver.steps_done() < solver.total_steps()) {
            solver.step();
            const bool last = solver.steps_done() == solver.total_steps();
            const bool quad = last || (solver.steps_done() % stride == 0);
            acc.accumulate(solver.u(), solver.time(), false, last,
                           quad ? solver.dt() * stride : 0.0);
        }
        table.rows[r] = acc.finalize();
    };

    if (opts.jobs <= 1) {
        for (std::size_t r = 0; r < cfg.epsilons.size(); ++r) run_eps(r);
    } else {
        std::vector<std::thread> pool;
        std::size_t next = 0;
        for (int w = 0; w < opts.jobs && w < static_cast<int>(cfg.epsilons.size()); ++w)
            pool.emplace_back([&, w]() {
                for (std::size_t r = static_cast<std::size_t>(w); r < cfg.epsilons.size();
                     r += static_cast<std::size_t>(opts.jobs))
                    run_eps(r);
            });
        (void)next;
        for (auto& th : pool) th.join();
    }

    auto fit = [&](auto getter) {
        SlopeFit f;
        const std::size_t n = table.rows.size();
        const std::size_t use = std::min<std::size_t>(3, n);
        Vec lx, ly;
        for (std::size_t r = n - use; r < n; ++r) {
            lx.push_back(std::log10(table.rows[r].eps));
            ly.push_back(std::log10(std::max(getter(table.rows[r]), 1e-300)));
        }
        const LineFit lf = fit_line(lx, ly);
        f.slope = lf.slope;
        f.residual = lf.max_residual;
        f.unreliable = lf.max_residual > 0.2;
        return f;
    };
    table.sup_first = fit([](const ErrorRow& r) { return r.sup_first; });
    table.sup_leading = fit([](const ErrorRow& r) { return r.sup_leading; });
    table.energy_first = fit([](const ErrorRow& r) { return r.energy_first; });
    table.avg_leading = fit([](const ErrorRow& r) { return r.avg_leading; });
    return table;
}

void write_report(const ConvergenceTable& table, const std::string& csv_path,
                  const std::string& json_path, bool with_timestamp) {
    if (table.rows.empty()) throw NumericError("write_report: empty table");
    std::ofstream csv(csv_path);
    if (!csv) throw NumericError("write_report: cannot open " + csv_path);
    csv << "epsilon,sup_first,sup_leading,energy_first,avg_leading\n";
    char line[256];
    for (const auto& r : table.rows) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.eps, r.sup_first,
                      r.sup_leading, r.energy_first, r.avg_leading);
        csv << line;
    }
    nlohmann::json j;
    j["scenario"] = table.scenario;
    j["beta"] = table.beta;
    j["t1"] = table.common_t1;
    auto slope = [](const SlopeFit& f) {
        return nlohmann::json{
            {"slope", f.slope}, {"residual", f.residual}, {"unreliable", f.unreliable}};
    };
    j["slopes"] = {{"sup_first", slope(table.sup_first)},
                   {"sup_leading", slope(table.sup_leading)},
                   {"energy_first", slope(table.energy_first)},
                   {"avg_leading", slope(table.avg_leading)}};
    if (with_timestamp) {
        const auto now = std::chrono::system_clock::now().time_since_epoch();
        j["timestamp_ms"] =
            std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    }
    std::ofstream js(json_path);
    if (!js) throw NumericError("write_report: cannot open " + json_path);
    js << j.dump(2) << "\n";
}

} // namespace thincyl
