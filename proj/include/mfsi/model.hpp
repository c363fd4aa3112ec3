#pragma once

#include <array>

#include "mfsi/error.hpp"

namespace mfsi {

// The six model coefficients. k = (1-alpha)/alpha is derived once at
// validation time and reused everywhere, so every consumer sees the same
// rounding of it.
struct ModelParams {
    double alpha;
    double sigma;
    double beta1;
    double beta2;
    double mu1;
    double mu2;
    double k;

    static ModelParams validate(double alpha, double sigma, double beta1,
                                double beta2, double mu1, double mu2,
                                bool checked_rates = true);
};

struct State {
    double s;
    double i;
};

struct VectorFieldValue {
    double ds;
    double di;
};

using Jacobian = std::array<std::array<double, 2>, 2>;

VectorFieldValue vector_field(const ModelParams& p, const State& x);
Jacobian jacobian(const ModelParams& p, const State& x);

double population(const ModelParams& p, const State& x);
double portfolio_at_risk(const State& x);

// Mirror image of a parameter set / state: exchanging the roles of the two
// pools maps (alpha, sigma, b1, b2, m1, m2) to (alpha, 1-sigma, b2, b1, m2, m1)
// and (s, i) to (i, s). Used by symmetry tests and the analysis layer.
ModelParams swap_roles(const ModelParams& p);
State swap_roles(const State& x);

} // namespace mfsi
