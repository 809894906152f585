#pragma once

#include "thincyl/blayer.hpp"

namespace thincyl {

struct DependencyError : std::runtime_error {
    explicit DependencyError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class ApproxOrder { leading, first, full };
enum class AssemblyMode { standard, high_peclet };

// Smooth cut-off localizing the layer to the right end: 0 for
// x1 <= l - delta1, 1 for x1 >= l - delta1/2, quintic in between.
double cutoff_chi(double x1, double l, double delta1);
double cutoff_chi_d1(double x1, double l, double delta1);
double cutoff_chi_d2(double x1, double l, double delta1);

struct ApproximationParts {
    const LimitSolution* lim = nullptr;
    const W1Solution* w1 = nullptr;
    const CellField* u1 = nullptr;
    const CellField* u2 = nullptr;
    const LayerData* layer = nullptr;
    const BoundaryLayerTerm* pi1_tilde = nullptr;
    const BoundaryLayerTerm* pi2 = nullptr;
};

// Evaluator for the assembled approximation at a given epsilon and order.
// Internal variables: xi = transversal/eps, zeta = (l - x1)/eps^((1+beta)/2).
class ApproximationField {
public:
    ApproximationField(const ModelConfig& cfg, double eps, ApproxOrder order,
                       AssemblyMode mode, ApproximationParts parts);

    double eps() const { return eps_; }
    ApproxOrder order() const { return order_; }
    double horizon() const;
    const UniformAxis& time_axis() const;
    const CrossSectionMesh* section_mesh() const {
        return parts_.u1 ? parts_.u1->mesh : nullptr;
    }

    // axisymmetric evaluation at physical radius r (disk sections)
    double value_radial(double x1, double r, double t) const;
    struct GradRz {
        double dx1 = 0.0, dr = 0.0;
    };
    GradRz gradient_radial(double x1, double r, double t) const;

    // evaluation at a cross-section mesh node (any section)
    double value_node(double x1, int node, double t) const;

    // dense slice evaluation on tensor (xs, rs) at fixed t; out has
    // xs.size()*rs.size() entries, r fastest
    void sample_slice(const Vec& xs, const Vec& rs, double t, Vec& out) const;
    void sample_gradient_slice(const Vec& xs, const Vec& rs, double t, Vec& gx, Vec& gr) const;

private:
    const ModelConfig* cfg_;
    double eps_;
    ApproxOrder order_;
    AssemblyMode mode_;
    ApproximationParts parts_;
    double stretch_ = 1.0; // eps^((1+beta)/2)
    double lzeta_ = 0.0;

    // ring-profile views of the cell fields over the parameter grid (disk)
    std::vector<GridField2D> u1_rings_, u2_rings_;

    struct XContext {
        double w0 = 0, w0x = 0, w1 = 0, w1x = 0, chi = 0, chi1 = 0, zeta = 0;
        bool layer_active = false;
        Vec prof1, prof1x, prof2, prof2x;       // cell ring profiles and x-derivatives
        Vec lay1, lay1z, lay2, lay2z;           // layer ring profiles and zeta-derivatives
        double pi0 = 0, pi0z = 0, pi1h = 0, pi1hz = 0;
    };
    void fill_context(double x1, double t, bool want_grad, XContext& c) const;
    double combine_value(const XContext& c, double rho) const;
    void combine_gradient(const XContext& c, double rho, double& gx, double& gr) const;
};

ApproximationField assemble(const ModelConfig& cfg, double eps, ApproxOrder order,
                            AssemblyMode mode, ApproximationParts parts);

struct BoundaryFitReport {
    double at_initial = 0.0; // max |field| at t = 0
    double at_inflow = 0.0;  // max |field| at x1 = 0
    double at_right = 0.0;   // max |field - q| at x1 = l
};

BoundaryFitReport check_boundary_fit(const ApproximationField& field, const ModelConfig& cfg);

} // namespace thincyl
