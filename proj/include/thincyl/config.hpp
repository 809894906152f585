#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thincyl/catalog.hpp"

namespace thincyl {

struct CrossSectionSpec {
    enum class Kind { disk, polygon };
    Kind kind = Kind::disk;
    double radius = 1.0;                              // disk
    std::vector<std::array<double, 2>> vertices;      // polygon, CCW, origin inside
};

struct GridSpec {
    int nx = 256;      // axial cells for the limit stage
    int nt = 256;      // time steps / levels
    int nxi = 32;      // cross-section mesh resolution (max edge ~ diameter/nxi)
    int modes = 24;    // eigenmode truncation P
    double lzeta = 40; // boundary-layer domain length in the stretched variable
};

struct CatalogRef {
    std::string catalog;
    Params params;
};

struct ModelConfig {
    std::string scenario; // optional label
    double length = 1.0;
    double horizon = 1.0;
    double delta1 = 0.1;
    CrossSectionSpec cross_section;
    CatalogRef velocity_ref, interaction_ref, boundary_ref;
    VelocityField velocity;
    InteractionFunction interaction;
    BoundaryData boundary;
    std::vector<double> epsilons;
    double beta = 1.0;
    GridSpec grid;

    bool high_peclet() const { return beta > 1.0; }
    // boundary-layer stretch exponent: zeta = (l - x1) / eps^((1+beta)/2)
    double layer_exponent() const { return 0.5 * (1.0 + beta); }
};

// Parse a config document (JSON text). A "scenario" key loads a builtin and
// the remaining keys override it; otherwise the full schema is required.
ModelConfig load_config(const std::string& json_text);
ModelConfig load_config_file(const std::string& path);

ModelConfig builtin_scenarios(const std::string& name);
std::vector<std::string> builtin_scenario_names();

// Stable serialization of everything a solver stage depends on; used for
// artifact cache keys.
std::string config_signature(const ModelConfig& cfg);
std::uint64_t fnv1a(const std::string& bytes);

} // namespace thincyl
