#pragma once

#include <complex>
#include <string>
#include <vector>

#include "mfsi/integrate.hpp"
#include "mfsi/model.hpp"

namespace mfsi {

enum class StabilityClass {
    stable_node,
    unstable_node,
    saddle,
    stable_spiral,
    unstable_spiral,
    center_degenerate,
};

const char* to_string(StabilityClass c);

struct Equilibrium {
    State point;
    double residual_norm;
    std::complex<double> eigenvalues[2];
    StabilityClass classification;
    double trace;
    double det;
};

struct Region {
    double s_lo, s_hi;
    double i_lo, i_hi;
};

// Classification from the trace/determinant closed form alone. Rule order:
// saddle (det < 0) first, then center_degenerate (a real part within
// class_tol of zero), then spiral vs node by the discriminant with stability
// from the trace sign.
StabilityClass classify_linear(double trace, double det);

// Polishes the point with up to 5 Newton steps, then classifies; rejects
// points that do not satisfy the residual gate.
Equilibrium classify(const ModelParams& p, State point,
                     double newton_tol = 1e-9);

std::vector<Equilibrium> find_equilibria(const ModelParams& p,
                                         const Region& region,
                                         int grid_density = 21);

inline Region default_region() { return {-1e5, 1e5, -1e5, 1e5}; }

enum class OutcomeTag {
    diverged,
    collapse_to_origin,
    s_dominant,
    i_dominant,
    mixed,
    invalid, // per-cell parameter validation failure
};

const char* to_string(OutcomeTag t);

struct OutcomeClass {
    OutcomeTag tag;
    State endpoint;    // last sample; meaningless when tag == invalid
    bool has_endpoint;
};

// Endpoint-to-tag rules, applied in order: diverged status wins; then
// collapse_to_origin when the endpoint norm is under one borrower;
// s_dominant when s > 10*max(i,1); i_dominant mirrored; else mixed.
OutcomeClass classify_outcome(const Trajectory& traj);

struct AxisSpec {
    std::string name; // one of alpha, sigma, beta1, beta2, mu1, mu2
    double lo;
    double hi;
    int count;
};

struct SweepCell {
    OutcomeClass outcome;
    double v1;
    double v2;
};

struct SweepMap {
    AxisSpec axis1;
    AxisSpec axis2;
    std::vector<SweepCell> cells; // row-major: axis1 index slow, axis2 fast
};

struct SweepBase {
    ModelParams params;
    State x0;
    double t0;
    double t1;
    SolverConfig solver;
    bool checked_rates = true;
};

SweepMap sweep(const SweepBase& base, const AxisSpec& axis1,
               const AxisSpec& axis2, int threads = 1);

} // namespace mfsi
