#pragma once

#include "thincyl/mesh.hpp"

namespace thincyl {

struct SparseCSR {
    std::size_t n = 0;
    std::vector<int> ptr, col;
    Vec val;
    void multiply(const double* x, double* y) const;
};

SparseCSR assemble_stiffness(const CrossSectionMesh& mesh);
SparseCSR assemble_mass(const CrossSectionMesh& mesh);

struct NeumannSolve {
    Vec u;                  // zero-mean nodal solution
    double defect = 0.0;     // boundary integral of g minus interior integral of f
    double rel_defect = 0.0; // defect scaled by the data magnitude
    int iterations = 0;
};

// FEM context for repeated Neumann solves on one mesh. The singular Neumann
// system is solved with plain CG; the constant nullspace is projected out of
// the residual every iteration and the solution is returned with zero
// cross-section mean.
class FemContext {
public:
    explicit FemContext(const CrossSectionMesh& mesh);

    const CrossSectionMesh& mesh() const { return *mesh_; }
    const SparseCSR& stiffness() const { return K_; }

    // Solves  Laplace(u) = f in the section, du/dnu = g on the boundary.
    // f is nodal, g is sampled at boundary edge midpoints.
    NeumannSolve solve_neumann(const Vec& f_nodes, const Vec& g_edges,
                               double compat_tol = 1e-8, const Vec* warm_start = nullptr) const;

    double mean(const Vec& u) const; // integral over the section / area

private:
    const CrossSectionMesh* mesh_;
    SparseCSR K_;
};

// Convenience one-shot form mirroring the operation contract.
NeumannSolve solve_neumann(const CrossSectionMesh& mesh, const Vec& f_nodes, const Vec& g_edges,
                           double compat_tol = 1e-8);

struct NeumannEigenbasis {
    Vec lambda;               // nondecreasing, lambda[0] = 0
    std::vector<Vec> theta;   // L2(section)-orthonormal nodal eigenfunctions
    const CrossSectionMesh* mesh = nullptr;

    // consistent-mass inner products against the basis
    double project(const Vec& nodal, int p) const;
};

// Lowest P+1 Neumann eigenpairs of -Laplace via shift-inverted block
// iteration with Rayleigh-Ritz extraction; the constant mode is pinned
// analytically. Sign convention: first nodal entry above threshold positive.
NeumannEigenbasis neumann_eigenbasis(const CrossSectionMesh& mesh, int P);

double inner_l2(const CrossSectionMesh& mesh, const Vec& a, const Vec& b);

} // namespace thincyl
