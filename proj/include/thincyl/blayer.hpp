#pragma once

#include <functional>

#include "thincyl/cell.hpp"
#include "thincyl/fem.hpp"

namespace thincyl {

// Boundary traces feeding the layer problems at the right end:
//   Phi0 = q - w0(l, .), hat Phi1 = -w1(l, .),
//   tilde Phi1 = -u1(l, ., .), Phi2 = -u2(l, ., .).
struct LayerData {
    const ModelConfig* cfg = nullptr;
    const CrossSectionMesh* mesh = nullptr;
    const NeumannEigenbasis* basis = nullptr;

    UniformAxis t_limit;           // limit-stage time grid
    Vec phi0, dphi0, hat_phi1;     // sampled on t_limit
    UniformAxis t_cell;            // cell-stage time grid
    std::vector<Vec> phi1_tilde;   // nodal slices on t_cell
    std::vector<Vec> phi2;
    double sigma0 = 0.0;           // min right-end speed over the horizon
    bool matched = true;           // matching conditions hold: initial rates vanish

    double v1_right(double t) const;
    double dv1_right(double t) const;
    double Phi0(double t) const;
    double dPhi0(double t) const;
    double hatPhi1(double t) const;
    double kappa0() const; // sigma0/2 + sqrt(sigma0^2/4 + lambda1)
};

LayerData make_layer_data(const ModelConfig& cfg, const LimitSolution& lim,
                          const W1Solution& w1, const CellField& u1, const CellField& u2,
                          const NeumannEigenbasis& basis);

// Leading layer term Phi0(t) exp(-v1(t) zeta) and the explicit mean part of
// the first-order term.
double pi0_eval(double zeta, double t, const LayerData& data);
double pi1_hat_eval(double zeta, double t, const LayerData& data);

// Cross-section-dependent layer terms in modal form. Mode p decays at rate
// v1/2 + sqrt(v1^2/4 + lambda_p); the part of the boundary datum beyond the
// truncation is carried at the mode-P rate so the zeta = 0 trace reproduces
// the datum exactly.
class BoundaryLayerTerm {
public:
    // modal coefficient of Theta_p at (zeta, t); p = 0 is the mean component
    double mean_value(double zeta, double t) const;
    double value_node(double zeta, int node, double t) const;
    void values_all_nodes(double zeta, double t, Vec& out) const;
    Vec ring_values(double zeta, double t) const;    // disk meshes
    Vec ring_values_dz(double zeta, double t) const; // d/dzeta of the above
    double max_abs(double zeta) const;               // max over nodes and times

    double certified_rate() const { return kappa_certified_; }
    double tail_coefficient_bound() const { return tail_bound_; }

private:
    friend BoundaryLayerTerm pi1_tilde_build(const LayerData& data);
    friend BoundaryLayerTerm pi2_build(const LayerData& data, const BoundaryLayerTerm& pi1t);

    const LayerData* data_ = nullptr;
    bool analytic_ = true;            // analytic exponentials vs gridded profiles
    std::vector<Vec> a_;              // analytic: coefficient curves on t_cell
    std::vector<GridField2D> modes_;  // gridded: profile per mode, x-axis = zeta
    GridField2D mean_;                // gridded mean part
    std::vector<Vec> tail_;           // nodal remainder per t_cell level
    std::vector<Vec> theta_ring_;     // ring-averaged eigenfunctions (disk)
    std::vector<Vec> tail_ring_;      // ring-averaged remainder per level
    double tail_lambda_ = 0.0;        // decay eigenvalue for the remainder
    double kappa_certified_ = 0.0;
    double tail_bound_ = 0.0;
    double lzeta_ = 0.0;

    void build_ring_views();
    double mode_coef(std::size_t p, double zeta, double t) const;
    double mode_coef_dz(std::size_t p, double zeta, double t) const;
    double tail_shape(double zeta, double t) const;
    double tail_at(int node, double t) const;
};

BoundaryLayerTerm pi1_tilde_build(const LayerData& data);
BoundaryLayerTerm pi2_build(const LayerData& data, const BoundaryLayerTerm& pi1t);

struct DecayFit {
    double rate = 0.0;
    bool numerically_zero = false;
    int samples_used = 0;
    double fit_residual = 0.0;
};

// Least-squares slope of log amplitude against zeta over [lo, hi]; samples
// below 1e-14 are dropped, and an all-tiny window is reported as zero.
DecayFit decay_rate(const std::function<double(double)>& amplitude, double lo, double hi,
                    int samples = 40);

} // namespace thincyl
