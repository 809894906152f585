#pragma once

#include "thincyl/config.hpp"
#include "thincyl/mesh.hpp"

namespace thincyl {

// Boundary average (1/|section|) * contour integral of phi over the section
// boundary, by edge-midpoint quadrature.
double reduce_interaction(double s, double x1, double t, const InteractionFunction& phi,
                          const CrossSectionMesh& mesh);

// Fast evaluator for the homogenized interaction. Catalog entries expose a
// cross-section-independent component whose remainder has zero boundary
// average, so the average reduces to (|boundary|/|section|) * mean part;
// this matches the scaled boundary quadrature exactly (checked by tests).
class HomogenizedInteraction {
public:
    HomogenizedInteraction(const InteractionFunction& phi, const CrossSectionMesh& mesh)
        : phi_(&phi), ratio_(mesh.phi_ratio) {}

    double hat(double s, double x1, double t) const {
        return ratio_ * phi_->phi_mean_part(s, x1, t);
    }
    double hat_ds(double s, double x1, double t) const {
        return ratio_ * phi_->dphi_mean_part_ds(s, x1, t);
    }
    double ratio() const { return ratio_; }

private:
    const InteractionFunction* phi_;
    double ratio_;
};

} // namespace thincyl
