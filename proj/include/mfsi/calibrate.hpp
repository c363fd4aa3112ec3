#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mfsi/integrate.hpp"
#include "mfsi/model.hpp"

namespace mfsi {

struct Observation {
    double t;
    double s;
    double i;
    double w = 1.0;
};

struct ObservationSet {
    std::vector<Observation> rows;
    void validate() const; // >= 3 rows, strictly increasing t, finite, w >= 0
};

enum class X0Policy { first_observation, free_x0 };

struct FitSpec {
    std::vector<std::string> free;                  // parameter names to fit
    ModelParams frozen;                             // values for the rest
    std::vector<std::pair<double, double>> bounds;  // per free parameter
    std::vector<double> initial_guess;              // per free parameter
    X0Policy x0_policy = X0Policy::first_observation;
    std::pair<double, double> s0_bounds{0.0, 1e9};  // used when x0 is free
    std::pair<double, double> i0_bounds{0.0, 1e9};
    std::pair<double, double> x0_guess{0.0, 0.0};
    bool checked_rates = true;
};

struct FitResult {
    ModelParams params;
    State x0;           // fitted when x0 is free, else the first observation
    double residual;
    int evaluations;
    bool converged;
    std::vector<std::pair<int, double>> trace; // (iteration, best residual)
};

inline constexpr double kDivergenceSentinel = 1e300;

// Weighted least squares against the forward simulation anchored at the
// first observation; early-stopped runs return the sentinel so optimizers
// steer away from divergent parameter regions.
double objective(const ModelParams& p, const ObservationSet& obs,
                 const SolverConfig& solver);
double objective_from(const ModelParams& p, const State& x0,
                      const ObservationSet& obs, const SolverConfig& solver);

FitResult fit(const FitSpec& spec, const ObservationSet& obs,
              const SolverConfig& solver, int budget);

} // namespace mfsi
