#include "thincyl/cell.hpp"

#include <algorithm>
#include <cmath>

namespace thincyl {

double reduce_interaction(double s, double x1, double t, const InteractionFunction& phi,
                          const CrossSectionMesh& mesh) {
    double acc = 0.0;
    for (const auto& be : mesh.bedges)
        acc += be.length * phi.phi(s, x1, be.mid[0], be.mid[1], t);
    return acc * mesh.bquad_scale / mesh.area;
}

double CellField::worst_relative_mean() const {
    double worst = 0.0;
    for (const auto& u : values) {
        double mx = 0.0;
        for (double v : u) mx = std::max(mx, std::abs(v));
        const double mean = mesh->integrate(u);
        worst = std::max(worst, std::abs(mean) / (1.0 + mx));
    }
    return worst;
}

double CellField::max_abs() const {
    double mx = 0.0;
    for (const auto& u : values)
        for (double v : u) mx = std::max(mx, std::abs(v));
    return mx;
}

Vec CellField::interpolate(double x1, double t) const {
    const std::size_t n = mesh->nodes.size();
    Vec out(n, 0.0);
    // cubic weights in both parameters, applied nodewise
    Vec weights_x(xparams.count, 0.0), weights_t(tparams.count, 0.0);
    {
        Vec unit(xparams.count, 0.0);
        for (std::size_t i = 0; i < xparams.count; ++i) {
            unit[i] = 1.0;
            weights_x[i] = interp_cubic(xparams, unit.data(), x1);
            unit[i] = 0.0;
        }
        Vec unitt(tparams.count, 0.0);
        for (std::size_t k = 0; k < tparams.count; ++k) {
            unitt[k] = 1.0;
            weights_t[k] = interp_cubic(tparams, unitt.data(), t);
            unitt[k] = 0.0;
        }
    }
    for (std::size_t k = 0; k < tparams.count; ++k) {
        if (weights_t[k] == 0.0) continue;
        for (std::size_t i = 0; i < xparams.count; ++i) {
            const double w = weights_t[k] * weights_x[i];
            if (w == 0.0) continue;
            const Vec& u = at(i, k);
            for (std::size_t j = 0; j < n; ++j) out[j] += w * u[j];
        }
    }
    return out;
}

Vec CellField::ring_profile(std::size_t i, std::size_t k) const {
    return mesh->ring_average(at(i, k));
}

double CellField::value_node(double x1, double t, std::size_t node) const {
    // cubic-in-x1 rows combined cubically in t
    Vec unit(xparams.count, 0.0), rows(tparams.count);
    Vec wx(xparams.count, 0.0);
    for (std::size_t i = 0; i < xparams.count; ++i) {
        unit[i] = 1.0;
        wx[i] = interp_cubic(xparams, unit.data(), x1);
        unit[i] = 0.0;
    }
    for (std::size_t k = 0; k < tparams.count; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < xparams.count; ++i) {
            if (wx[i] == 0.0) continue;
            acc += wx[i] * at(i, k)[node];
        }
        rows[k] = acc;
    }
    return interp_cubic(tparams, rows.data(),
                        std::clamp(t, 0.0, tparams.step * double(tparams.count - 1)));
}

Vec cell_param_derivative(const CellField& f, std::size_t i, std::size_t k, int axis,
                          bool pin_initial) {
    const std::size_t n = f.mesh->nodes.size();
    Vec out(n, 0.0);
    if (axis == 1 && k == 0 && pin_initial) return out; // vanishing initial rate
    const std::size_t idx = axis == 0 ? i : k;
    const std::size_t count = axis == 0 ? f.xparams.count : f.tparams.count;
    const double h = axis == 0 ? f.xparams.step : f.tparams.step;
    for (const auto& term : deriv1_stencil(idx, count, h)) {
        const std::size_t ii = axis == 0 ? static_cast<std::size_t>(static_cast<long>(i) + term.offset) : i;
        const std::size_t kk = axis == 1 ? static_cast<std::size_t>(static_cast<long>(k) + term.offset) : k;
        const Vec& u = f.at(ii, kk);
        for (std::size_t j = 0; j < n; ++j) out[j] += term.weight * u[j];
    }
    return out;
}

namespace {

bool all_tiny(const Vec& v, double tol = 1e-300) {
    for (double x : v)
        if (std::abs(x) > tol) return false;
    return true;
}

// area-weighted nodal gradient recovery for P1 fields
void nodal_gradient(const CrossSectionMesh& mesh, const Vec& u, Vec& gx, Vec& gy) {
    const std::size_t n = mesh.nodes.size();
    gx.assign(n, 0.0);
    gy.assign(n, 0.0);
    Vec wsum(n, 0.0);
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        const auto& tr = mesh.tris[t];
        const double A = mesh.tri_area[t];
        const auto& p0 = mesh.nodes[tr[0]];
        const auto& p1 = mesh.nodes[tr[1]];
        const auto& p2 = mesh.nodes[tr[2]];
        const double bx[3] = {p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]};
        const double by[3] = {p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]};
        double gxe = 0.0, gye = 0.0;
        for (int a = 0; a < 3; ++a) {
            gxe += u[tr[a]] * bx[a] / (2.0 * A);
            gye += u[tr[a]] * by[a] / (2.0 * A);
        }
        for (int a = 0; a < 3; ++a) {
            gx[tr[a]] += A * gxe;
            gy[tr[a]] += A * gye;
            wsum[tr[a]] += A;
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        gx[j] /= wsum[j];
        gy[j] /= wsum[j];
    }
}

UniformAxis make_axis(double length, int n) {
    return UniformAxis{0.0, length / static_cast<double>(n), static_cast<std::size_t>(n) + 1};
}

void note_defect(CellDiagnostics* diag, const NeumannSolve& ns, double x1, double t) {
    if (!diag) return;
    if (ns.rel_defect > diag->max_rel_defect) {
        diag->max_rel_defect = ns.rel_defect;
        diag->worst_defect = ns.defect;
        diag->worst_param = {x1, t};
    }
    diag->max_abs_defect = std::max(diag->max_abs_defect, std::abs(ns.defect));
    diag->max_iterations = std::max(diag->max_iterations, ns.iterations);
}

} // namespace

CellField build_u1(const ModelConfig& cfg, const LimitSolution& lim,
                   const CrossSectionMesh& mesh, const CellOptions& opts,
                   CellDiagnostics* diag) {
    const HomogenizedInteraction hom(cfg.interaction, mesh);
    const FemContext fem(mesh);
    const std::size_t n = mesh.nodes.size();
    CellField out;
    out.mesh = &mesh;
    out.xparams = make_axis(cfg.length, opts.nxc);
    out.tparams = UniformAxis{0.0, lim.T1_observed / static_cast<double>(opts.ntc),
                              static_cast<std::size_t>(opts.ntc) + 1};
    out.values.assign(out.xparams.count * out.tparams.count, Vec());

    const auto& phi = cfg.interaction;
    const auto& vel = cfg.velocity;
    Vec f(n), g(mesh.bedges.size()), warm;
    for (std::size_t k = 0; k < out.tparams.count; ++k) {
        const double t = out.tparams.step * static_cast<double>(k);
        for (std::size_t i = 0; i < out.xparams.count; ++i) {
            const double x1 = out.xparams.step * static_cast<double>(i);
            const double w0v = lim.w0.value(x1, std::min(t, lim.T1_observed));
            const double source_const = -hom.hat(w0v, x1, t);
            if (vel.vbar_zero) {
                f.assign(n, source_const);
            } else {
                for (std::size_t j = 0; j < n; ++j)
                    f[j] = source_const +
                           w0v * vel.div_vbar(x1, mesh.nodes[j][0], mesh.nodes[j][1], t);
            }
            for (std::size_t e = 0; e < mesh.bedges.size(); ++e) {
                const auto& be = mesh.bedges[e];
                double flux = -mesh.bquad_scale * phi.phi(w0v, x1, be.mid[0], be.mid[1], t);
                if (!vel.vbar_zero) {
                    const auto v = vel.vbar(x1, be.mid[0], be.mid[1], t);
                    flux += w0v * (v[0] * be.normal[0] + v[1] * be.normal[1]);
                }
                g[e] = flux;
            }
            if (all_tiny(f) && all_tiny(g)) {
                out.at(i, k).assign(n, 0.0);
                continue;
            }
            try {
                NeumannSolve ns =
                    fem.solve_neumann(f, g, opts.compat_tol, warm.empty() ? nullptr : &warm);
                note_defect(diag, ns, x1, t);
                warm = ns.u;
                out.at(i, k) = std::move(ns.u);
            } catch (const NumericError& err) {
                throw NumericError("build_u1 at (x1=" + std::to_string(x1) +
                                   ", t=" + std::to_string(t) + "): " + err.what());
            }
        }
    }
    return out;
}

GridField2D nonlocal_interaction(const ModelConfig& cfg, const LimitSolution& lim,
                                 const CellField& u1) {
    const CrossSectionMesh& mesh = *u1.mesh;
    GridField2D out(u1.xparams, u1.tparams);
    for (std::size_t k = 0; k < u1.tparams.count; ++k) {
        const double t = u1.tparams.step * static_cast<double>(k);
        for (std::size_t i = 0; i < u1.xparams.count; ++i) {
            const double x1 = u1.xparams.step * static_cast<double>(i);
            const double w0v = lim.w0.value(x1, std::min(t, lim.T1_observed));
            const Vec& u = u1.at(i, k);
            double acc = 0.0;
            for (const auto& be : mesh.bedges) {
                const double umid = 0.5 * (u[be.a] + u[be.b]);
                acc += be.length * cfg.interaction.dphi_ds(w0v, x1, be.mid[0], be.mid[1], t) * umid;
            }
            out.at(i, k) = acc * mesh.bquad_scale / mesh.area;
        }
    }
    return out;
}

CellField build_u2(const ModelConfig& cfg, const LimitSolution& lim, const W1Solution& w1sol,
                   const CellField& u1, const CrossSectionMesh& mesh, const CellOptions& opts,
                   CellDiagnostics* diag) {
    const HomogenizedInteraction hom(cfg.interaction, mesh);
    const FemContext fem(mesh);
    const std::size_t n = mesh.nodes.size();
    const bool advective = cfg.beta < 3.0;
    const GridField2D nonlocal = nonlocal_interaction(cfg, lim, u1);

    CellField out;
    out.mesh = &mesh;
    out.xparams = u1.xparams;
    out.tparams = u1.tparams;
    out.values.assign(out.xparams.count * out.tparams.count, Vec());

    const auto& phi = cfg.interaction;
    const auto& vel = cfg.velocity;
    Vec f(n), g(mesh.bedges.size()), warm, gxu, gyu;
    for (std::size_t k = 0; k < out.tparams.count; ++k) {
        const double t = out.tparams.step * static_cast<double>(k);
        const double tc = std::min(t, lim.T1_observed);
        for (std::size_t i = 0; i < out.xparams.count; ++i) {
            const double x1 = out.xparams.step * static_cast<double>(i);
            const double w0v = lim.w0.value(x1, tc);
            const double w1v = w1sol.w1.value(x1, tc);
            const double hat_ds = hom.hat_ds(w0v, x1, t);
            const double nl = nonlocal.at(i, k);
            const Vec& u1n = u1.at(i, k);
            const Vec dtu1 = cell_param_derivative(u1, i, k, 1, opts.pin_initial_rates);
            const double base = -hat_ds * w1v - nl;
            if (advective) {
                const Vec dxu1 = cell_param_derivative(u1, i, k, 0, false);
                const double lam = w1sol.lam.value(x1, tc);
                const double dlam = w1sol.dlam_dx.value(x1, tc);
                for (std::size_t j = 0; j < n; ++j)
                    f[j] = base + dtu1[j] + lam * dxu1[j] + dlam * u1n[j];
            } else {
                for (std::size_t j = 0; j < n; ++j) f[j] = base + dtu1[j];
            }
            if (!vel.vbar_zero) {
                nodal_gradient(mesh, u1n, gxu, gyu);
                for (std::size_t j = 0; j < n; ++j) {
                    const auto& nd = mesh.nodes[j];
                    const auto v = vel.vbar(x1, nd[0], nd[1], t);
                    const double dv = vel.div_vbar(x1, nd[0], nd[1], t);
                    f[j] += w1v * dv + u1n[j] * dv + v[0] * gxu[j] + v[1] * gyu[j];
                }
            }
            for (std::size_t e = 0; e < mesh.bedges.size(); ++e) {
                const auto& be = mesh.bedges[e];
                const double u1mid = 0.5 * (u1n[be.a] + u1n[be.b]);
                double flux = -mesh.bquad_scale * (w1v + u1mid) *
                              phi.dphi_ds(w0v, x1, be.mid[0], be.mid[1], t);
                if (!vel.vbar_zero) {
                    const auto v = vel.vbar(x1, be.mid[0], be.mid[1], t);
                    flux += (w1v + u1mid) * (v[0] * be.normal[0] + v[1] * be.normal[1]);
                }
                g[e] = flux;
            }
            if (all_tiny(f) && all_tiny(g)) {
                out.at(i, k).assign(n, 0.0);
                continue;
            }
            try {
                NeumannSolve ns =
                    fem.solve_neumann(f, g, opts.compat_tol, warm.empty() ? nullptr : &warm);
                note_defect(diag, ns, x1, t);
                warm = ns.u;
                out.at(i, k) = std::move(ns.u);
            } catch (const NumericError& err) {
                throw NumericError("build_u2 at (x1=" + std::to_string(x1) +
                                   ", t=" + std::to_string(t) + "): " + err.what());
            }
        }
    }
    return out;
}

} // namespace thincyl
