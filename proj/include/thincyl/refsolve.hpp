#pragma once

#include <functional>

#include "thincyl/config.hpp"
#include "thincyl/numerics.hpp"

namespace thincyl {

struct ReferenceGrid {
    int nx = 512; // axial cells
    int nr = 16;  // radial cells (>= 8)
    int nt = 0;   // time steps; 0 selects from the advective CFL bound
    double cfl = 0.12; // AB3 x second-order upwind needs courant <= ~0.13
};

enum class TimeScheme { backward_euler, crank_nicolson };

struct AxisymmetryCheck {
    bool pass = true;
    double worst = 0.0;
    std::string what;
};

// The reference discretization is axisymmetric (x1, r); configs with angular
// structure in phi or a non-radial transversal field are refused.
AxisymmetryCheck require_axisymmetric(const ModelConfig& cfg);

// Douglas-ADI IMEX stepper for the original problem on the scaled cylinder:
// implicit axial/radial diffusion (theta scheme), explicit second-order
// upwind axial flux (Adams-Bashforth 3 when Crank-Nicolson is selected; the
// AB3 region covers the near-imaginary advective spectrum), lateral Robin
// row with one-sided second-order differences and Picard refresh of phi(u).
class ReferenceSolver {
public:
    using Source = std::function<double(double x, double r, double t)>;

    ReferenceSolver(const ModelConfig& cfg, double eps, ReferenceGrid grid,
                    TimeScheme scheme = TimeScheme::crank_nicolson, Source source = nullptr,
                    int picard_sweeps = 1);

    void step();
    bool done() const { return step_ % 1 == 0 && time() >= cfg_->horizon - 0.25 * dt_; }
    double time() const { return dt_ * static_cast<double>(step_); }
    int steps_done() const { return step_; }
    int total_steps() const { return nt_; }
    double dt() const { return dt_; }

    const Vec& u() const { return u_; }
    std::size_t index(std::size_t i, std::size_t j) const { return i * (nr_ + 1) + j; }
    const Vec& xs() const { return xs_; }
    const Vec& rs() const { return rs_; }
    std::size_t nx() const { return nx_; }
    std::size_t nr() const { return nr_; }

    const Vec& mass_residuals() const { return mass_residuals_; }
    double max_mass_residual() const;
    double max_abs_u() const;

private:
    const ModelConfig* cfg_;
    double eps_, eps_x_, adv_scale_;
    std::size_t nx_, nr_;
    int nt_ = 0, step_ = 0, picard_ = 1;
    double hx_, hr_, dt_, theta_, max_courant_ = 0.45;
    TimeScheme scheme_;
    Source source_;
    Vec xs_, rs_, rhalf_, wr_, wx_;
    Vec u_, adv_, adv_prev_, adv_prev2_, drn_, dxn_, stage_;
    Vec mass_residuals_;
    int adv_history_ = 0;

    void advection(const Vec& u, double t, Vec& out) const;
    void diffusion_x(const Vec& u, Vec& out) const;
    void diffusion_r(const Vec& u, Vec& out) const;
    void radial_solve(std::size_t i, double t_new, const Vec& rhs_col, const Vec& phi_arg,
                      Vec& out_col);
    double lateral_phi(double s, double x, double t) const;
    double lateral_vr(double x, double t) const;
    void account_mass(const Vec& unew, const Vec& uold, double t_old, double t_new);
};

struct ReferenceSolution {
    Vec xs, rs;
    std::vector<Vec> snapshots;
    Vec snapshot_times;
    Vec mass_residuals;
    double eps = 0.0, dt = 0.0;
    int steps = 0;
    std::size_t nx = 0, nr = 0;
    std::size_t index(std::size_t i, std::size_t j) const { return i * (nr + 1) + j; }
};

ReferenceSolution solve_reference(const ModelConfig& cfg, double eps, const ReferenceGrid& grid,
                                  TimeScheme scheme = TimeScheme::crank_nicolson,
                                  const std::vector<double>& snapshot_times = {},
                                  ReferenceSolver::Source source = nullptr);

// Discrete conservation audit: per-step imbalance of the scheme's own fluxes.
Vec flux_balance(const ReferenceSolution& sol);

struct MmsReport {
    double spatial_slope = 0.0;     // Crank-Nicolson, joint (h, dt) refinement
    double temporal_slope_be = 0.0; // backward Euler, dt refinement below CFL
    double temporal_slope_cn = 0.0; // Crank-Nicolson along the (h, dt) diagonal
    double flux_ratio = 0.0;        // mass-residual shrink factor per refinement
    Vec spatial_errors, temporal_errors_be;
    bool pass(double spatial_min = 1.5) const {
        return spatial_slope >= spatial_min && temporal_slope_be >= 0.9 &&
               temporal_slope_cn >= 1.8 && flux_ratio >= 1.5;
    }
};

// Manufactured-solution gate for the reference solver.
MmsReport mms_self_test(const ModelConfig& cfg, double eps = 0.1);

} // namespace thincyl
