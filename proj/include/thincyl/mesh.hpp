#pragma once

#include <array>
#include <vector>

#include "thincyl/config.hpp"
#include "thincyl/numerics.hpp"

namespace thincyl {

struct BoundaryEdge {
    int a = 0, b = 0;              // endpoint node ids, CCW order
    double length = 0.0;
    std::array<double, 2> mid{};
    std::array<double, 2> normal{}; // outward unit normal
};

// P1 triangulation of the rescaled cross-section. Disk meshes are structured
// spiderwebs (concentric rings), which keeps boundary nodes exactly on the
// circle and gives an exact ring decomposition for radial profiles.
struct CrossSectionMesh {
    std::vector<std::array<double, 2>> nodes;
    std::vector<std::array<int, 3>> tris;
    Vec tri_area;
    std::vector<BoundaryEdge> bedges;
    Vec node_weight; // integral of the P1 hat function; sums to area
    double area = 0.0;
    double perimeter = 0.0;
    double max_edge = 0.0;
    // homogenization constant |boundary|/|section| of the true geometry
    // (2/r0 for disks, polygon ratio otherwise) and the matching scale on
    // boundary quadratures so discrete solvability stays exact
    double phi_ratio = 0.0;
    double bquad_scale = 1.0;

    bool is_disk = false;
    double disk_radius = 0.0;
    std::vector<int> ring_of_node;          // disk only
    Vec ring_radius;                        // disk only; ring 0 is the center
    std::vector<std::vector<int>> ring_nodes;
    std::vector<int> boundary_nodes;

    double integrate(const Vec& nodal) const;
    // boundary quadrature with edge-midpoint sampling
    double boundary_integral(const Vec& edge_mid_values) const;
    double boundary_integral_nodal(const Vec& nodal) const;
    // angular average over each ring (disk); element 0 is the center value
    Vec ring_average(const Vec& nodal) const;
};

CrossSectionMesh build_mesh(const CrossSectionSpec& spec, int nxi);

} // namespace thincyl
