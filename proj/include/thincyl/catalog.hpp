#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>

#include "thincyl/numerics.hpp"

namespace thincyl {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

using Params = std::map<std::string, double>;

// Axial velocity v1(s, x1, t) with the partials the reduced model consumes,
// plus the transversal pair (v2, v3)(x1, xi, t) and its xi-divergence.
struct VelocityField {
    std::string name;
    std::function<double(double s, double x1, double t)> v1;
    std::function<double(double s, double x1, double t)> dv1_ds;
    std::function<double(double s, double x1, double t)> dv1_dx1;
    std::function<double(double s, double x1, double t)> d2v1_dss;
    // transversal components as a function of (x1, xi2, xi3, t)
    std::function<std::array<double, 2>(double x1, double xi2, double xi3, double t)> vbar;
    std::function<double(double x1, double xi2, double xi3, double t)> div_vbar;
    bool vbar_zero = true; // catalog-level knowledge: vbar identically zero
};

// Interaction phi(s, x1, xi, t). Catalog entries are split into a
// cross-section-independent part and a zero-boundary-average remainder, so
// the homogenized phi-hat can be evaluated without quadrature in inner loops.
struct InteractionFunction {
    std::string name;
    std::function<double(double s, double x1, double xi2, double xi3, double t)> phi;
    std::function<double(double s, double x1, double xi2, double xi3, double t)> dphi_ds;
    std::function<double(double s, double x1, double xi2, double xi3, double t)> dphi_dx1;
    std::function<double(double s, double x1, double xi2, double xi3, double t)> dphi_dt;
    std::function<double(double s, double x1, double xi2, double xi3, double t)> d2phi_dtt;
    std::function<std::array<double, 2>(double s, double x1, double xi2, double xi3, double t)>
        grad_xi_phi;
    // xi-independent component; phi minus this has zero boundary average
    std::function<double(double s, double x1, double t)> phi_mean_part;
    std::function<double(double s, double x1, double t)> dphi_mean_part_ds;
    bool xi_independent = true;
};

struct BoundaryData {
    std::string name;
    std::function<double(double t)> q;
    std::function<double(double t)> dq;
    std::function<double(double t)> d2q;
};

VelocityField make_velocity(const std::string& catalog, const Params& params);
InteractionFunction make_interaction(const std::string& catalog, const Params& params);
BoundaryData make_boundary(const std::string& catalog, const Params& params);

// Smooth compactly supported bump sin^6(pi (x-a)/(b-a)) on [a, b].
double bump_window(double x, double a, double b);
double bump_window_d1(double x, double a, double b);
double bump_window_d2(double x, double a, double b);

// C-infinity ramp 1 - exp(-(t/t0)^3); vanishes to second order at t = 0.
double ramp_cinf(double t, double t0);
double ramp_cinf_d1(double t, double t0);
double ramp_cinf_d2(double t, double t0);

} // namespace thincyl
