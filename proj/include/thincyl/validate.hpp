#pragma once

#include "thincyl/config.hpp"
#include "thincyl/mesh.hpp"

namespace thincyl {

struct ConditionCheck {
    std::string name;
    bool pass = true;
    double worst_value = 0.0;            // signed margin or violation magnitude
    std::array<double, 3> worst_sample{}; // (s, x1, t)
    std::string note;
};

struct ValidationReport {
    std::vector<ConditionCheck> checks;
    // empirical constants recorded from the sample grid
    double C0 = 0.0;        // max v1
    double C1 = 0.0;        // max |s dv1/ds| + |s d2v1/ds2|
    double C2 = 0.0;        // slope of the interaction growth bound
    double C3 = 0.0;        // offset of the interaction growth bound
    double C4 = 0.0;        // max |dphi/ds|
    double sigma0 = 0.0;    // min right-end speed
    bool all_pass() const;
    const ConditionCheck* find(const std::string& name) const;
};

// Samples every structural assumption on a deterministic tensor grid
// (necessary-condition check, not a proof). s ranges over [0, s_max].
ValidationReport validate_assumptions(const ModelConfig& cfg, int samples_per_axis = 64,
                                      double s_max = 10.0);

std::string format_report(const ValidationReport& report);

} // namespace thincyl
