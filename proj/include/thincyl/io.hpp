#pragma once

#include <string>

#include "thincyl/cell.hpp"
#include "thincyl/fem.hpp"
#include "thincyl/limit.hpp"
#include "thincyl/refsolve.hpp"

namespace thincyl {

// Plot-ready CSV dumps (deterministic %.17g formatting).
void write_field_csv(const std::string& path, const GridField2D& field);      // x1,t,value
void write_cell_csv(const std::string& path, const CellField& field,
                    int x_stride, int t_stride);                              // x1,t,xi2,xi3,value
void write_eigen_csv(const std::string& path, const NeumannEigenbasis& basis); // p,lambda
void write_reference_csv(const std::string& path, const ReferenceSolution& sol); // x1,r,t,u
void write_layer_csv(const std::string& path, const Vec& zetas, const Vec& times,
                     const Vec& values); // zeta1,t,value (cross-section max)

// Binary artifacts for staged CLI runs, keyed by the config signature; a
// loader rejects artifacts whose key does not match the live config.
struct ArtifactError : std::runtime_error {
    explicit ArtifactError(const std::string& msg) : std::runtime_error(msg) {}
};

void save_limit_artifact(const std::string& path, const ModelConfig& cfg,
                         const LimitSolution& lim);
LimitSolution load_limit_artifact(const std::string& path, const ModelConfig& cfg);

void save_cell_artifact(const std::string& path, const ModelConfig& cfg, const W1Solution& w1,
                        const CellField& u1, const CellField& u2);
struct CellArtifact {
    W1Solution w1;
    CellField u1, u2;
};
CellArtifact load_cell_artifact(const std::string& path, const ModelConfig& cfg,
                                const CrossSectionMesh& mesh);

bool file_exists(const std::string& path);

} // namespace thincyl
