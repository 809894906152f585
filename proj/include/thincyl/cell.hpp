#pragma once

#include "thincyl/fem.hpp"
#include "thincyl/limit.hpp"

namespace thincyl {

// Cross-section corrector sampled on a (x1, t) parameter grid; one nodal
// field per parameter pair.
struct CellField {
    UniformAxis xparams, tparams;
    const CrossSectionMesh* mesh = nullptr;
    std::vector<Vec> values; // index k * xparams.count + i

    const Vec& at(std::size_t i, std::size_t k) const { return values[k * xparams.count + i]; }
    Vec& at(std::size_t i, std::size_t k) { return values[k * xparams.count + i]; }

    // worst |mean| / (1 + max|u|) over all parameters
    double worst_relative_mean() const;
    double max_abs() const;

    // nodal field interpolated to arbitrary parameters (cubic in x1 and t)
    Vec interpolate(double x1, double t) const;
    double value_node(double x1, double t, std::size_t node) const;
    // ring-averaged radial profile (disk meshes) at a parameter grid point
    Vec ring_profile(std::size_t i, std::size_t k) const;
};

struct CellOptions {
    int nxc = 96;             // parameter resolution in x1
    int ntc = 96;             // parameter resolution in t
    double compat_tol = 1e-8; // relative solvability tolerance
    bool pin_initial_rates = true; // use the vanishing t = 0 parameter rates
};

struct CellDiagnostics {
    double max_rel_defect = 0.0; // worst solvability defect across parameters
    double max_abs_defect = 0.0;
    double worst_defect = 0.0;
    std::array<double, 2> worst_param{}; // (x1, t)
    int max_iterations = 0;
};

CellField build_u1(const ModelConfig& cfg, const LimitSolution& lim,
                   const CrossSectionMesh& mesh, const CellOptions& opts = {},
                   CellDiagnostics* diag = nullptr);

// Boundary coupling (1/|section|) contour-integral of dphi/ds * u1 on the u1
// parameter grid; feeds f1 in the corrector equation.
GridField2D nonlocal_interaction(const ModelConfig& cfg, const LimitSolution& lim,
                                 const CellField& u1);

CellField build_u2(const ModelConfig& cfg, const LimitSolution& lim, const W1Solution& w1,
                   const CellField& u1, const CrossSectionMesh& mesh,
                   const CellOptions& opts = {}, CellDiagnostics* diag = nullptr);

// Parameter-grid derivative of a cell field in the time (axis=1) or axial
// (axis=0) direction; fourth-order stencils, optional exact zero initial rate.
Vec cell_param_derivative(const CellField& f, std::size_t i, std::size_t k, int axis,
                          bool pin_initial);

} // namespace thincyl
