#pragma once

#include "thincyl/assemble.hpp"
#include "thincyl/refsolve.hpp"
#include "thincyl/validate.hpp"

namespace thincyl {

struct ErrorRow {
    double eps = 0.0;
    double sup_first = 0.0;    // max |A_1,eps - u_eps| over the reference grid
    double sup_leading = 0.0;  // max |A_0,eps - u_eps|
    double energy_first = 0.0; // scaled gradient L2 norm of the first-order error
    double avg_leading = 0.0;  // max |section mean of u_eps - A_0,eps|
    double t1 = 0.0;
};

struct SlopeFit {
    double slope = 0.0;
    double residual = 0.0; // max-abs deviation in log10 units
    bool unreliable = false;
};

struct ConvergenceTable {
    std::vector<ErrorRow> rows;
    SlopeFit sup_first, sup_leading, energy_first, avg_leading;
    double common_t1 = 0.0;
    std::string scenario;
    double beta = 1.0;
};

// Max-norm, scaled-energy, and section-average error functionals between a
// reference snapshot sequence and an assembled approximation.
double sup_error(const ReferenceSolution& ref, const ApproximationField& approx);
double energy_error(const ReferenceSolution& ref, const ApproximationField& approx,
                    const ModelConfig& cfg, double eps);
double avg_error(const ReferenceSolution& ref, const ApproximationField& leading,
                 const ModelConfig& cfg, double eps);

// Streaming accumulator used by the sweep (identical formulas, no snapshot
// storage).
class ErrorAccumulator {
public:
    ErrorAccumulator(const ModelConfig& cfg, double eps, const ApproximationField& first,
                     const ApproximationField& leading, const Vec& xs, const Vec& rs,
                     double t1);
    void accumulate(const Vec& u, double t, bool first_level, bool last_level, double dt);
    ErrorRow finalize() const;

private:
    const ModelConfig* cfg_;
    double eps_, t1_;
    const ApproximationField *first_, *leading_;
    Vec xs_, rs_, xc_, rc_;
    double sup_first_ = 0.0, sup_leading_ = 0.0, avg_leading_ = 0.0;
    double energy_sq_ = 0.0;
    mutable Vec buf_, bufl_, gxa_, gra_;
};

struct StudyOptions {
    ReferenceGrid ref_grid;   // nx defaulted from the config grid
    TimeScheme scheme = TimeScheme::crank_nicolson;
    CellOptions cell;
    int jobs = 1;
    int energy_stride = 2;    // time subsampling for the energy quadrature
};

// Shared eps-independent parts of the pipeline.
struct StudyParts {
    CrossSectionMesh mesh;
    NeumannEigenbasis basis;
    LimitSolution lim;
    W1Solution w1;
    CellField u1;
    LayerData layer;
    BoundaryLayerTerm pi1t;
};

StudyParts build_study_parts(const ModelConfig& cfg, const StudyOptions& opts);

ConvergenceTable convergence_study(const ModelConfig& cfg, const StudyOptions& opts = {});

// CSV (epsilon,sup_first,sup_leading,energy_first,avg_leading) plus a JSON
// sidecar with slopes and metadata; byte-stable when the timestamp is off.
void write_report(const ConvergenceTable& table, const std::string& csv_path,
                  const std::string& json_path, bool with_timestamp);

} // namespace thincyl
