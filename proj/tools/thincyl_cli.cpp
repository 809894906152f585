// Command-line front end: validate a configuration, run the reduced-model
// pipeline stage by stage (with cached artifacts), solve the reference
// problem, and produce convergence reports.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "thincyl/assemble.hpp"
#include "thincyl/io.hpp"
#include "thincyl/study.hpp"

using namespace thincyl;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::string order = "first";
    std::string epsilons_csv;
    double beta_override = 0.0;
    int jobs = 1;
    bool no_timestamp = false;
    bool pipeline = false;
};

std::string stem_of(const ModelConfig& cfg) {
    return cfg.scenario.empty() ? std::string("run") : cfg.scenario;
}

std::string stamp(const CommonOpts& o) {
    if (o.no_timestamp) return "";
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    return "_" + std::to_string(
                     std::chrono::duration_cast<std::chrono::milliseconds>(now).count());
}

ModelConfig load_with_overrides(const CommonOpts& o) {
    ModelConfig cfg = load_config_file(o.config_path);
    if (!o.epsilons_csv.empty()) {
        std::vector<double> eps;
        std::stringstream ss(o.epsilons_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) eps.push_back(std::stod(tok));
        cfg.epsilons = eps;
    }
    if (o.beta_override > 0.0) cfg.beta = o.beta_override;
    return cfg;
}

void gate_validation(const ModelConfig& cfg) {
    const ValidationReport rep = validate_assumptions(cfg);
    if (!rep.all_pass())
        throw ConfigError("configuration fails validation:\n" + format_report(rep));
}

std::string artifact_path(const CommonOpts& o, const ModelConfig& cfg, const char* kind) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(config_signature(cfg))));
    return o.out_dir + "/" + kind + "_" + buf + ".bin";
}

LimitSolution stage_limit(const CommonOpts& o, const ModelConfig& cfg,
                          const CrossSectionMesh& mesh, bool allow_compute) {
    const std::string path = artifact_path(o, cfg, "limit");
    if (file_exists(path)) return load_limit_artifact(path, cfg);
    if (!allow_compute)
        throw DependencyError("missing limit artifact " + path +
                              " (run `limit` first or pass --pipeline)");
    gate_validation(cfg);
    LimitSolution lim = cfg.beta == 1.0 ? solve_limit(cfg, cfg.grid, mesh)
                                        : solve_cauchy_limit(cfg, cfg.grid, mesh);
    save_limit_artifact(path, cfg, lim);
    return lim;
}

CellArtifact stage_cell(const CommonOpts& o, const ModelConfig& cfg,
                        const CrossSectionMesh& mesh, const LimitSolution& lim,
                        bool allow_compute) {
    const std::string path = artifact_path(o, cfg, "cell");
    if (file_exists(path)) return load_cell_artifact(path, cfg, mesh);
    if (!allow_compute)
        throw DependencyError("missing cell artifact " + path +
                              " (run `cell` first or pass --pipeline)");
    CellArtifact art;
    CellOptions copts;
    art.u1 = build_u1(cfg, lim, mesh, copts);
    const GridField2D nonlocal = nonlocal_interaction(cfg, lim, art.u1);
    art.w1 = cfg.beta == 1.0 ? solve_w1(cfg, lim, nonlocal, mesh)
                             : solve_cauchy_w1(cfg, lim, nonlocal, mesh);
    art.u2 = build_u2(cfg, lim, art.w1, art.u1, mesh, copts);
    save_cell_artifact(path, cfg, art.w1, art.u1, art.u2);
    return art;
}

int cmd_validate(const CommonOpts& o) {
    const ModelConfig cfg = load_with_overrides(o);
    const ValidationReport rep = validate_assumptions(cfg);
    std::cout << format_report(rep);
    nlohmann::json j;
    for (const auto& c : rep.checks)
        j["checks"][c.name] = {{"pass", c.pass},
                               {"worst_value", c.worst_value},
                               {"worst_sample", c.worst_sample},
                               {"note", c.note}};
    j["constants"] = {{"C0", rep.C0}, {"C1", rep.C1}, {"C2", rep.C2},
                      {"C3", rep.C3}, {"C4", rep.C4}, {"sigma0", rep.sigma0}};
    std::ofstream(o.out_dir + "/" + stem_of(cfg) + "_validate" + stamp(o) + ".json")
        << j.dump(2) << "\n";
    if (!rep.all_pass()) {
        std::cerr << "error: configuration fails validation\n";
        return 2;
    }
    return 0;
}

int cmd_limit(const CommonOpts& o) {
    const ModelConfig cfg = load_with_overrides(o);
    const CrossSectionMesh mesh = build_mesh(cfg.cross_section, cfg.grid.nxi);
    const LimitSolution lim = stage_limit(o, cfg, mesh, true);
    const std::string stem = o.out_dir + "/" + stem_of(cfg);
    write_field_csv(stem + "_w0" + stamp(o) + ".csv", lim.w0);
    write_field_csv(stem + "_w0_dx" + stamp(o) + ".csv", lim.dw0_dx);
    write_field_csv(stem + "_w0_dt" + stamp(o) + ".csv", lim.dw0_dt);
    write_field_csv(stem + "_w0_dxx" + stamp(o) + ".csv", lim.d2w0_dxx);
    std::printf("limit: T1_observed = %.12g (horizon %.12g), grid %zux%zu\n", lim.T1_observed,
                cfg.horizon, lim.w0.nx(), lim.w0.nt());
    return 0;
}

int cmd_cell(const CommonOpts& o) {
    const ModelConfig cfg = load_with_overrides(o);
    const CrossSectionMesh mesh = build_mesh(cfg.cross_section, cfg.grid.nxi);
    const LimitSolution lim = stage_limit(o, cfg, mesh, o.pipeline);
    const CellArtifact art = stage_cell(o, cfg, mesh, lim, true);
    const NeumannEigenbasis basis = neumann_eigenbasis(mesh, cfg.grid.modes);
    const std::string stem = o.out_dir + "/" + stem_of(cfg);
    write_eigen_csv(stem + "_eigen" + stamp(o) + ".csv", basis);
    write_field_csv(stem + "_w1" + stamp(o) + ".csv", art.w1.w1);
    write_cell_csv(stem + "_u1" + stamp(o) + ".csv", art.u1,
                   std::max<int>(1, int(art.u1.xparams.count / 8)),
                   std::max<int>(1, int(art.u1.tparams.count / 8)));
    std::printf("cell: u1 max %.6g, u2 max %.6g, worst relative mean %.3e / %.3e\n",
                art.u1.max_abs(), art.u2.max_abs(), art.u1.worst_relative_mean(),
                art.u2.worst_relative_mean());
    return 0;
}

int cmd_layers(const CommonOpts& o) {
    const ModelConfig cfg = load_with_overrides(o);
    const CrossSectionMesh mesh = build_mesh(cfg.cross_section, cfg.grid.nxi);
    const LimitSolution lim = stage_limit(o, cfg, mesh, o.pipeline);
    const CellArtifact art = stage_cell(o, cfg, mesh, lim, o.pipeline);
    const NeumannEigenbasis basis = neumann_eigenbasis(mesh, cfg.grid.modes);
    const LayerData layer = make_layer_data(cfg, lim, art.w1, art.u1, art.u2, basis);
    const BoundaryLayerTerm pi1t = pi1_tilde_build(layer);
    const BoundaryLayerTerm pi2 = pi2_build(layer, pi1t);

    auto amp0 = [&](double z) {
        double m = 0.0;
        for (std::size_t k = 0; k < layer.t_limit.count; ++k)
            m = std::max(m, std::abs(pi0_eval(z, layer.t_limit.step * double(k), layer)));
        return m;
    };
    const DecayFit f0 = decay_rate(amp0, 1.0, std::min(25.0, cfg.grid.lzeta));
    const DecayFit f1 = decay_rate([&](double z) { return pi1t.max_abs(z); }, 1.0,
                                   std::min(12.0, cfg.grid.lzeta));
    const DecayFit f2 = decay_rate([&](double z) { return pi2.max_abs(z); }, 1.0,
                                   std::min(12.0, cfg.grid.lzeta));
    nlohmann::json j;
    j["sigma0"] = layer.sigma0;
    j["kappa0"] = layer.kappa0();
    j["pi0_rate"] = {{"rate", f0.rate}, {"numerically_zero", f0.numerically_zero}};
    j["pi1_tilde_rate"] = {{"rate", f1.rate},
                           {"numerically_zero", f1.numerically_zero},
                           {"certified", pi1t.certified_rate()},
                           {"tail_bound", pi1t.tail_coefficient_bound()}};
    j["pi2_rate"] = {{"rate", f2.rate}, {"numerically_zero", f2.numerically_zero}};
    const std::string stem = o.out_dir + "/" + stem_of(cfg);
    std::ofstream(stem + "_layers" + stamp(o) + ".json") << j.dump(2) << "\n";
    // cross-section max of the first-order fluctuating term on a zeta grid
    Vec zetas, times, values;
    for (int i = 0; i <= 60; ++i) zetas.push_back(cfg.grid.lzeta * i / 60.0);
    for (std::size_t k = 0; k < layer.t_cell.count; k += 8)
        times.push_back(layer.t_cell.step * double(k));
    for (double t : times)
        for (double z : zetas) {
            Vec nodal;
            pi1t.values_all_nodes(z, t, nodal);
            double m = 0.0;
            for (double v : nodal) m = std::max(m, std::abs(v));
            values.push_back(m);
        }
    write_layer_csv(stem + "_pi1_tilde" + stamp(o) + ".csv", zetas, times, values);
    if (!f2.numerically_zero && f2.rate <= 0.0) {
        std::cerr << "error: layer decay certification failed\n";
        return 3;
    }
    std::printf("layers: pi0 rate %.4g, pi1~ rate %.4g (kappa0 %.4g), pi2 rate %.4g\n", f0.rate,
                f1.rate, layer.kappa0(), f2.rate);
    return 0;
}

int cmd_assemble(const CommonOpts& o) {
    const ModelConfig cfg = load_with_overrides(o);
    const CrossSectionMesh mesh = build_mesh(cfg.cross_section, cfg.grid.nxi);
    const LimitSolution lim = stage_limit(o, cfg, mesh, o.pipeline);
    const CellArtifact art = stage_cell(o, cfg, mesh, lim, o.pipeline);
    const NeumannEigenbasis basis = neumann_eigenbasis(mesh, cfg.grid.modes);
    const LayerData layer = make_layer_data(cfg, lim, art.w1, art.u1, art.u2, basis);
    const BoundaryLayerTerm pi1t = pi1_tilde_build(layer);
    const BoundaryLayerTerm pi2 = pi2_build(layer, pi1t);
    ApproxOrder order = ApproxOrder::first;
    if (o.order == "leading") order = ApproxOrder::leading;
    else if (o.order == "full") order = ApproxOrder::full;
    else if (o.order != "first") throw ConfigError("unknown order '" + o.order + "'");
    ApproximationParts parts;
    parts.lim = &lim;
    parts.w1 = &art.w1;
    parts.u1 = &art.u1;
    parts.u2 = &art.u2;
    parts.layer = &layer;
    parts.pi1_tilde = &pi1t;
    parts.pi2 = &pi2;
    const AssemblyMode mode =
        cfg.beta == 1.0 ? AssemblyMode::standard : AssemblyMode::high_peclet;
    const std::string stem = o.out_dir + "/" + stem_of(cfg);
    for (double eps : cfg.epsilons) {
        const ApproximationField field = assemble(cfg, eps, order, mode, parts);
        const BoundaryFitReport fit = check_boundary_fit(field, cfg);
        std::printf("assemble eps=%g order=%s: |A|_t0=%.3e |A|_x0=%.3e |A-q|_xl=%.3e\n", eps,
                    o.order.c_str(), fit.at_initial, fit.at_inflow, fit.at_right);
        // field samples on the reference grid for direct differencing
        std::ofstream out(stem + "_field_eps" + std::to_string(eps) + stamp(o) + ".csv");
        out << "x1,r,t,value\n";
        char buf[160];
        const int nxs = 64, nrs = 8, nts = 8;
        for (int k = 0; k <= nts; ++k)
            for (int i = 0; i <= nxs; ++i)
                for (int j = 0; j <= nrs; ++j) {
                    const double t = lim.T1_observed * k / double(nts);
                    const double x = cfg.length * i / double(nxs);
                    const double r = eps * cfg.cross_section.radius * j / double(nrs);
                    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", x, r, t,
                                  field.value_radial(x, r, t));
                    out << buf;
                }
    }
    return 0;
}

int cmd_reference(const CommonOpts& o) {
    const ModelConfig cfg = load_with_overrides(o);
    gate_validation(cfg);
    const std::string stem = o.out_dir + "/" + stem_of(cfg);
    for (double eps : cfg.epsilons) {
        ReferenceGrid grid;
        grid.nx = cfg.grid.nx;
        std::vector<double> snaps;
        for (int k = 0; k <= 8; ++k) snaps.push_back(cfg.horizon * k / 8.0);
        const ReferenceSolution sol = solve_reference(cfg, eps, grid,
                                                      TimeScheme::crank_nicolson, snaps);
        write_reference_csv(stem + "_ref_eps" + std::to_string(eps) + stamp(o) + ".csv", sol);
        nlohmann::json j;
        j["eps"] = eps;
        j["dt"] = sol.dt;
        j["steps"] = sol.steps;
        j["nx"] = sol.nx;
        j["nr"] = sol.nr;
        j["scheme"] = "crank-nicolson";
        double mr = 0.0;
        for (double v : sol.mass_residuals) mr = std::max(mr, v);
        j["max_mass_residual"] = mr;
        std::ofstream(stem + "_ref_eps" + std::to_string(eps) + stamp(o) + ".json")
            << j.dump(2) << "\n";
        std::printf("reference eps=%g: %d steps, dt=%.3e, mass residual %.3e\n", eps, sol.steps,
                    sol.dt, mr);
    }
    return 0;
}

int cmd_study(const CommonOpts& o) {
    const ModelConfig cfg = load_with_overrides(o);
    StudyOptions opts;
    opts.jobs = o.jobs;
    const ConvergenceTable table = convergence_study(cfg, opts);
    const std::string stem = o.out_dir + "/" + stem_of(cfg) + "_study" + stamp(o);
    write_report(table, stem + ".csv", stem + ".json", !o.no_timestamp);
    std::printf("study: slopes sup_first=%.3f sup_leading=%.3f energy_first=%.3f "
                "avg_leading=%.3f (T1=%.6g)\n",
                table.sup_first.slope, table.sup_leading.slope, table.energy_first.slope,
                table.avg_leading.slope, table.common_t1);
    return 0;
}

int cmd_mms(const CommonOpts& o) {
    const ModelConfig cfg = load_with_overrides(o);
    const MmsReport rep = mms_self_test(cfg);
    std::printf("mms: spatial slope %.3f, temporal BE %.3f, temporal CN %.3f, flux ratio %.2f\n",
                rep.spatial_slope, rep.temporal_slope_be, rep.temporal_slope_cn, rep.flux_ratio);
    if (!rep.pass()) {
        std::cerr << "error: reference-solver self test below required slopes\n";
        return 3;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"thincyl: reduced-order transport in a thin cylinder"};
    app.require_subcommand(1);
    CommonOpts o;

    auto add_common = [&](CLI::App* sub, bool needs_config = true) {
        auto* opt = sub->add_option("--config", o.config_path, "configuration file (JSON)");
        if (needs_config) opt->required();
        sub->add_option("--out", o.out_dir, "output directory");
        sub->add_option("--epsilons", o.epsilons_csv, "comma-separated epsilon override");
        sub->add_option("--beta", o.beta_override, "beta override");
        sub->add_option("--order", o.order, "approximation order: leading|first|full");
        sub->add_option("--jobs", o.jobs, "parallel epsilon cases");
        sub->add_flag("--no-timestamp", o.no_timestamp, "suppress timestamps in outputs");
        sub->add_flag("--pipeline", o.pipeline, "compute missing artifacts in-process");
    };

    std::map<std::string, int (*)(const CommonOpts&)> handlers = {
        {"validate", cmd_validate}, {"limit", cmd_limit},     {"cell", cmd_cell},
        {"layers", cmd_layers},     {"assemble", cmd_assemble}, {"reference", cmd_reference},
        {"study", cmd_study},       {"mms", cmd_mms}};
    std::map<std::string, std::string> blurbs = {
        {"validate", "machine-check the structural assumptions"},
        {"limit", "solve the reduced limit problem"},
        {"cell", "solve the cross-section correctors"},
        {"layers", "build and certify the boundary-layer terms"},
        {"assemble", "assemble the approximation and check the trace repairs"},
        {"reference", "solve the original problem on the scaled cylinder"},
        {"study", "run the epsilon sweep and fit convergence slopes"},
        {"mms", "manufactured-solution gate for the reference solver"}};
    for (auto& [name, fn] : handlers) add_common(app.add_subcommand(name, blurbs[name]));

    CLI11_PARSE(app, argc, argv);
    const std::string sub = app.get_subcommands().front()->get_name();
    try {
        return handlers[sub](o);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DependencyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const ArtifactError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
