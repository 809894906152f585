#pragma once

#include "thincyl/homogenize.hpp"

namespace thincyl {

// Characteristic speed of the Riemann-invariant form: v1 + s dv1/ds.
double lambda_speed(double s, double x1, double t, const VelocityField& vel);

// Right-hand side along characteristics: -phi_hat - s dv1/dx1.
double forcing(double s, double x1, double t, const VelocityField& vel,
               const HomogenizedInteraction& hom);

struct Characteristic {
    double y0 = 0.0, t0 = 0.0;   // launch point (exactly one of t0 = 0 / y0 = 0)
    bool from_boundary = false;
    std::size_t first_level = 0; // time level of the launch
    Vec y, w;                    // samples at consecutive time levels
    bool defined_at(std::size_t level) const {
        return level >= first_level && level - first_level < y.size();
    }
    double y_at(std::size_t level) const { return y[level - first_level]; }
    double w_at(std::size_t level) const { return w[level - first_level]; }
};

struct CharacteristicFan {
    // fan order: inflow-boundary launches by decreasing launch time, then
    // initial-line launches by increasing y0; positions are nondecreasing in
    // this order while the solution stays classical
    std::vector<Characteristic> curves;
    std::size_t dividing_curve = 0; // the curve launched at (0, 0)
};

struct LimitSolution {
    GridField2D w0, dw0_dx, dw0_dt, d2w0_dxx;
    double T1_observed = 0.0;
    CharacteristicFan fan;
    double horizon() const { return T1_observed; }
};

struct W1Solution {
    GridField2D w1;
    GridField2D f1;      // assembled source
    GridField2D lam;     // Lambda(w0(x,t), x, t)
    GridField2D dlam_dx; // x-derivative of the above (total derivative)
};

// Integrates the coupled system dy/dt = Lambda, dw/dt = F from (y0, t0) with
// w(t0) = 0 by fixed-step RK4; stops once y >= length or t >= horizon.
Characteristic trace_characteristic(const ModelConfig& cfg, const HomogenizedInteraction& hom,
                                    double y0, double t0, double dt, double s_guard = 10.0);

struct LimitOptions {
    double crossing_tol = 1e-3; // neighbor-spacing collapse threshold
    double s_guard = 10.0;      // blow-up guard on |w|
};

// Method-of-characteristics solve of the quasilinear limit problem; fan from
// the initial line and the inflow boundary, monotonicity-monitored horizon,
// spline resampling onto the tensor grid, fourth-order derivative fields.
LimitSolution solve_limit(const ModelConfig& cfg, const GridSpec& grid,
                          const CrossSectionMesh& mesh, const LimitOptions& opts = {});

// Linear corrector transported along the frozen fan. `nonlocal` is the
// boundary-integral coupling term sampled on its own parameter grid (pass an
// empty field for none); `mesh` supplies the homogenized interaction.
W1Solution solve_w1(const ModelConfig& cfg, const LimitSolution& lim,
                    const GridField2D& nonlocal, const CrossSectionMesh& mesh);

// High-Peclet variants: x1 is a parameter, every column is an independent ODE.
LimitSolution solve_cauchy_limit(const ModelConfig& cfg, const GridSpec& grid,
                                 const CrossSectionMesh& mesh, double s_guard = 10.0);
W1Solution solve_cauchy_w1(const ModelConfig& cfg, const LimitSolution& lim,
                           const GridField2D& nonlocal, const CrossSectionMesh& mesh);

// Max-norm residual of the Riemann-invariant equation evaluated with the
// stored derivative fields over interior grid points.
double limit_residual(const ModelConfig& cfg, const LimitSolution& lim,
                      const CrossSectionMesh& mesh);
double w1_residual(const ModelConfig& cfg, const LimitSolution& lim, const W1Solution& w1,
                   const CrossSectionMesh& mesh);

} // namespace thincyl
