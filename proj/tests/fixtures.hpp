// Shared end-to-end pipeline state for tests: limit solve, cell correctors,
// corrector transport, and boundary-layer data for a named scenario.
#pragma once

#include "thincyl/assemble.hpp"

namespace fixtures {

using namespace thincyl;

struct Pipeline {
    ModelConfig cfg;
    CrossSectionMesh mesh;
    NeumannEigenbasis basis;
    LimitSolution lim;
    W1Solution w1;
    CellField u1, u2;
    LayerData layer;

    explicit Pipeline(ModelConfig config, int n = 160, int nxi = 24, int modes = 12,
                      int cell_n = 48)
        : cfg(std::move(config)) {
        cfg.grid.nx = n;
        cfg.grid.nt = n;
        cfg.grid.nxi = nxi;
        cfg.grid.modes = modes;
        mesh = build_mesh(cfg.cross_section, cfg.grid.nxi);
        basis = neumann_eigenbasis(mesh, cfg.grid.modes);
        lim = cfg.beta == 1.0 ? solve_limit(cfg, cfg.grid, mesh)
                              : solve_cauchy_limit(cfg, cfg.grid, mesh);
        CellOptions copts;
        copts.nxc = cell_n;
        copts.ntc = cell_n;
        u1 = build_u1(cfg, lim, mesh, copts);
        const GridField2D nl = nonlocal_interaction(cfg, lim, u1);
        w1 = cfg.beta == 1.0 ? solve_w1(cfg, lim, nl, mesh)
                             : solve_cauchy_w1(cfg, lim, nl, mesh);
        u2 = build_u2(cfg, lim, w1, u1, mesh, copts);
        layer = make_layer_data(cfg, lim, w1, u1, u2, basis);
    }

    ApproximationParts parts(const BoundaryLayerTerm* pi1t,
                             const BoundaryLayerTerm* pi2) const {
        ApproximationParts p;
        p.lim = &lim;
        p.w1 = &w1;
        p.u1 = &u1;
        p.u2 = &u2;
        p.layer = &layer;
        p.pi1_tilde = pi1t;
        p.pi2 = pi2;
        return p;
    }
};

inline ModelConfig angular_layer_config() {
    ModelConfig cfg = builtin_scenarios("axisym-robin");
    cfg.interaction_ref = {"right-plateau-angular",
                           {{"k0", 1.0}, {"m", 0.6}, {"a", 0.2}, {"b", 0.8},
                            {"t0", 0.12}, {"r0", 1.0}}};
    cfg.interaction = make_interaction(cfg.interaction_ref.catalog, cfg.interaction_ref.params);
    return cfg;
}

} // namespace fixtures
