// Acceptance suite: runs every verification gate at its stated tolerance and
// prints one pass/fail line per criterion. Exit status is nonzero if any
// criterion fails.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "thincyl/io.hpp"
#include "thincyl/study.hpp"

using namespace thincyl;

namespace {

int failures = 0;

void report(int id, const std::string& what, bool pass, const std::string& detail) {
    std::printf("[%2d] %-58s %s  (%s)\n", id, what.c_str(), pass ? "PASS" : "FAIL",
                detail.c_str());
    if (!pass) ++failures;
}

std::string fmt(const char* f, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

ConvergenceTable run_study(double beta) {
    ModelConfig cfg = builtin_scenarios(beta == 1.0 ? "linear-advection" : "high-peclet-beta3");
    cfg.grid.nx = 512;
    cfg.grid.nt = 512;
    cfg.grid.nxi = 24;
    cfg.grid.modes = 12;
    StudyOptions opts;
    opts.cell.nxc = 64;
    opts.cell.ntc = 64;
    opts.ref_grid.nx = 960;
    opts.ref_grid.nr = 16;
    return convergence_study(cfg, opts);
}

void criteria_1_to_4() {
    {
        const ConvergenceTable tab = run_study(1.0);
        report(1, "sup-norm order of the first-order approximation",
               tab.sup_first.slope >= 1.7 && tab.sup_first.residual <= 0.2,
               fmt("slope %.3f >= 1.7, residual %.3f <= 0.2", tab.sup_first.slope,
                   tab.sup_first.residual));
        report(2, "scaled gradient-energy order",
               tab.energy_first.slope >= 0.8 && tab.energy_first.residual <= 0.2,
               fmt("slope %.3f >= 0.8, residual %.3f", tab.energy_first.slope,
                   tab.energy_first.residual));
        report(3, "leading-order sup and section-average orders",
               tab.sup_leading.slope >= 0.8 && tab.avg_leading.slope >= 0.8,
               fmt("sup slope %.3f, avg slope %.3f (both >= 0.8)", tab.sup_leading.slope,
                   tab.avg_leading.slope));
    }
    {
        const ConvergenceTable tab = run_study(3.0);
        const ModelConfig cfg = builtin_scenarios("high-peclet-beta3");
        const bool full_horizon = tab.common_t1 == cfg.horizon;
        report(4, "high-Peclet sweep (beta=3, Cauchy limit): orders with T1 = T",
               full_horizon && tab.sup_first.slope >= 1.7 && tab.energy_first.slope >= 0.8 &&
                   tab.sup_leading.slope >= 0.8 && tab.avg_leading.slope >= 0.8 &&
                   tab.sup_first.residual <= 0.2,
               fmt("T1=%g=T, slopes %.3f/%.3f/%.3f/%.3f", tab.common_t1, tab.sup_first.slope,
                   tab.energy_first.slope, tab.sup_leading.slope, tab.avg_leading.slope));
    }
}

void criterion_5() {
    ModelConfig cfg = builtin_scenarios("linear-advection");
    cfg.grid.nx = 768;
    cfg.grid.nt = 768;
    const CrossSectionMesh mesh = build_mesh(cfg.cross_section, 24);
    const LimitSolution lim = solve_limit(cfg, cfg.grid, mesh);
    const auto& p = cfg.interaction_ref.params;
    const double keff = mesh.phi_ratio * p.at("k0");
    double worst = 0.0;
    for (std::size_t k = 0; k < lim.w0.nt(); k += 11)
        for (std::size_t i = 0; i < lim.w0.nx(); i += 7) {
            const double x = lim.w0.xaxis().step * static_cast<double>(i);
            const double t = lim.w0.taxis().step * static_cast<double>(k);
            const double exact =
                keff * oracles::integrate(
                           [&](double s) {
                               return bump_window(x - (t - s), p.at("a"), p.at("b")) *
                                      ramp_cinf(s, p.at("t0"));
                           },
                           0.0, t);
            worst = std::max(worst, std::abs(lim.w0.at(i, k) - exact));
        }
    bool monotone = lim.T1_observed == cfg.horizon;
    for (std::size_t k = 0; k < lim.w0.nt() && monotone; ++k) {
        double prev = -1.0;
        for (const auto& c : lim.fan.curves) {
            if (!c.defined_at(k)) continue;
            const double y = c.y_at(k);
            if (y > cfg.length) continue;
            if (y <= prev - 1e-14) {
                monotone = false;
                break;
            }
            prev = y;
        }
    }
    report(5, "limit solver vs closed-form characteristic integral",
           worst <= 1e-6 && monotone,
           fmt("max error %.3e <= 1e-6, fan monotone to T: %s", worst,
               monotone ? "yes" : "no"));
}

void criterion_6() {
    // manufactured Neumann convergence
    auto neumann_err = [](int nxi) {
        const CrossSectionMesh m = build_mesh(
            CrossSectionSpec{CrossSectionSpec::Kind::disk, 1.0, {}}, nxi);
        Vec f(m.nodes.size(), 2.0);
        Vec g(m.bedges.size());
        for (std::size_t e = 0; e < m.bedges.size(); ++e)
            g[e] = 2.0 * m.bedges[e].mid[0] * m.bedges[e].normal[0];
        const NeumannSolve ns = solve_neumann(m, f, g, 1e-8);
        double mean = 0.0;
        for (std::size_t j = 0; j < m.nodes.size(); ++j)
            mean += m.node_weight[j] * m.nodes[j][0] * m.nodes[j][0];
        mean /= m.area;
        double err2 = 0.0;
        for (std::size_t j = 0; j < m.nodes.size(); ++j)
            err2 += m.node_weight[j] * std::pow(ns.u[j] - (m.nodes[j][0] * m.nodes[j][0] - mean), 2);
        return std::sqrt(err2);
    };
    const double slope = std::log2(neumann_err(16) / neumann_err(32));

    const double j11 = oracles::bessel_j1_prime_root();
    const NeumannEigenbasis basis =
        neumann_eigenbasis(build_mesh(CrossSectionSpec{CrossSectionSpec::Kind::disk, 1.0, {}}, 32), 4);
    const double lam_err = std::abs(basis.lambda[1] - j11 * j11) / (j11 * j11);

    // benchmark cell stage: zero means and exact solvability
    ModelConfig cfg = builtin_scenarios("linear-advection");
    cfg.grid.nx = 256;
    cfg.grid.nt = 256;
    const CrossSectionMesh mesh = build_mesh(cfg.cross_section, 24);
    const LimitSolution lim = solve_limit(cfg, cfg.grid, mesh);
    CellOptions copts;
    copts.nxc = 48;
    copts.ntc = 48;
    CellDiagnostics d1, d2;
    const CellField u1 = build_u1(cfg, lim, mesh, copts, &d1);
    const GridField2D nl = nonlocal_interaction(cfg, lim, u1);
    const W1Solution w1 = solve_w1(cfg, lim, nl, mesh);
    const CellField u2 = build_u2(cfg, lim, w1, u1, mesh, copts, &d2);
    const double worst_mean = std::max(u1.worst_relative_mean(), u2.worst_relative_mean());
    const double worst_defect = std::max(std::max(d1.max_abs_defect, d2.max_abs_defect),
                                         std::max(d1.max_rel_defect, d2.max_rel_defect));

    report(6, "cell solver: convergence, eigenvalue, means, solvability",
           slope >= 1.8 && lam_err <= 0.02 && worst_mean < 1e-8 && worst_defect <= 1e-6,
           fmt("L2 slope %.2f, lambda1 err %.2f%%, mean %.1e, defect %.1e", slope,
               100.0 * lam_err, worst_mean, worst_defect));
}

void criteria_7_8() {
    const fixtures::Pipeline pipe(fixtures::angular_layer_config(), 192, 32, 16, 56);
    const BoundaryLayerTerm pi1t = pi1_tilde_build(pipe.layer);
    const BoundaryLayerTerm pi2 = pi2_build(pipe.layer, pi1t);
    const auto& layer = pipe.layer;

    // leading layer term against its explicit solution
    double pi0_dev = 0.0;
    const std::size_t iright = pipe.lim.w0.nx() - 1;
    for (std::size_t k = 0; k < pipe.lim.w0.nt(); k += 9) {
        const double t = pipe.lim.w0.taxis().step * static_cast<double>(k);
        const double phi0 = pipe.cfg.boundary.q(t) - pipe.lim.w0.at(iright, k);
        const double v = pipe.cfg.velocity.v1(0.0, pipe.cfg.length, t);
        for (double zeta : {0.0, 0.7, 2.3, 6.0})
            pi0_dev = std::max(pi0_dev, std::abs(pi0_eval(zeta, t, layer) -
                                                 phi0 * std::exp(-v * zeta)));
    }

    // ODE residual of the mean first-order term under finite differences
    double ode_res = 0.0;
    const double h = 0.004;
    for (double zeta : {0.5, 1.5, 3.0})
        for (int k = 2; k <= 8; ++k) {
            const double t = pipe.lim.T1_observed * k / 8.0;
            const double v = layer.v1_right(t);
            auto f = [&](double z) { return pi1_hat_eval(z, t, layer); };
            const double d1 =
                (f(zeta - 2 * h) - 8 * f(zeta - h) + 8 * f(zeta + h) - f(zeta + 2 * h)) /
                (12 * h);
            const double d2 = (-f(zeta - 2 * h) + 16 * f(zeta - h) - 30 * f(zeta) +
                               16 * f(zeta + h) - f(zeta + 2 * h)) /
                              (12 * h * h);
            const double dpi0 = layer.dPhi0(t) * std::exp(-v * zeta) -
                                layer.Phi0(t) * layer.dv1_right(t) * zeta * std::exp(-v * zeta);
            ode_res = std::max(ode_res, std::abs(d2 + v * d1 - dpi0));
        }

    // fluctuating-term decay rate against the certified exponent
    const DecayFit fit = decay_rate([&](double z) { return pi1t.max_abs(z); }, 1.0, 5.0);
    const double j11 = oracles::bessel_j1_prime_root();
    const double kappa0 = 0.5 * layer.sigma0 +
                          std::sqrt(0.25 * layer.sigma0 * layer.sigma0 + j11 * j11);
    const double rate_dev = std::abs(fit.rate - kappa0) / kappa0;

    // vanishing initial traces
    double at_t0 = std::max(std::abs(pi0_eval(0.4, 0.0, layer)),
                            std::abs(pi1_hat_eval(0.4, 0.0, layer)));
    Vec nodal;
    for (double zeta : {0.0, 0.8, 2.0}) {
        pi1t.values_all_nodes(zeta, 0.0, nodal);
        for (double v : nodal) at_t0 = std::max(at_t0, std::abs(v));
        pi2.values_all_nodes(zeta, 0.0, nodal);
        for (double v : nodal) at_t0 = std::max(at_t0, std::abs(v));
    }

    report(7, "boundary-layer formulas, decay rate, initial traces",
           pi0_dev <= 1e-12 && ode_res <= 1e-8 && rate_dev <= 0.05 && at_t0 <= 1e-8,
           fmt("Pi0 dev %.1e, ODE res %.1e, rate dev %.2f%% (kappa0 %.3f), t=0 %.1e",
               pi0_dev, ode_res, 100.0 * rate_dev, kappa0, at_t0));

    const ApproximationField full =
        assemble(pipe.cfg, 0.05, ApproxOrder::full, AssemblyMode::standard,
                 pipe.parts(&pi1t, &pi2));
    const BoundaryFitReport rep = check_boundary_fit(full, pipe.cfg);
    report(8, "boundary and initial repair of the full assembly",
           rep.at_right <= 1e-8 && rep.at_inflow <= 1e-8 && rep.at_initial <= 1e-8,
           fmt("|A-q|_xl %.1e, |A|_x0 %.1e, |A|_t0 %.1e (all <= 1e-8)", rep.at_right,
               rep.at_inflow, rep.at_initial));
}

void criterion_9() {
    const MmsReport rep = mms_self_test(builtin_scenarios("linear-advection"));
    report(9, "reference-solver gate: manufactured slopes and flux audit",
           rep.spatial_slope >= 1.8 && rep.temporal_slope_be >= 0.9 &&
               rep.temporal_slope_cn >= 1.8 && rep.flux_ratio >= 1.8,
           fmt("spatial %.2f, BE %.2f, CN %.2f, flux ratio %.2f", rep.spatial_slope,
               rep.temporal_slope_be, rep.temporal_slope_cn, rep.flux_ratio));
}

void criterion_10() {
    ModelConfig cfg = builtin_scenarios("linear-advection");
    cfg.epsilons = {0.2, 0.1, 0.05};
    cfg.grid.nx = 160;
    cfg.grid.nt = 160;
    cfg.grid.nxi = 16;
    cfg.grid.modes = 6;
    StudyOptions opts;
    opts.cell.nxc = 32;
    opts.cell.ntc = 32;
    opts.ref_grid.nx = 160;
    opts.ref_grid.nr = 8;
    auto run = [&](int jobs, const std::string& tag) {
        StudyOptions o = opts;
        o.jobs = jobs;
        const ConvergenceTable t = convergence_study(cfg, o);
        write_report(t, "acc_det_" + tag + ".csv", "acc_det_" + tag + ".json", false);
        std::ifstream c("acc_det_" + tag + ".csv"), j("acc_det_" + tag + ".json");
        std::stringstream sc, sj;
        sc << c.rdbuf();
        sj << j.rdbuf();
        return sc.str() + "\x01" + sj.str();
    };
    const std::string a = run(1, "a"), b = run(1, "b"), c = run(3, "c");
    report(10, "study determinism across reruns and job counts", a == b && a == c,
           fmt("rerun identical: %s, jobs=3 identical: %s", a == b ? "yes" : "no",
               a == c ? "yes" : "no"));
}

} // namespace

int main() {
    std::printf("acceptance: reduced-model verification gates\n");
    criteria_1_to_4();
    criterion_5();
    criterion_6();
    criteria_7_8();
    criterion_9();
    criterion_10();
    if (failures == 0) {
        std::printf("acceptance: all criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", failures);
    return 1;
}
