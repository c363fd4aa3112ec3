#pragma once

#include <cstdint>
#include <vector>

#include "mfsi/model.hpp"

namespace mfsi {

enum class SolverMethod { rk4_fixed, rk4_adaptive };

struct SolverConfig {
    SolverMethod method = SolverMethod::rk4_fixed;
    double step = 1e-3;             // fixed step, or initial step when adaptive
    double rel_tol = 1e-8;          // adaptive only
    std::int64_t max_step_count = 10'000'000;
    double blowup_threshold = 1e12;

    void validate() const;
};

enum class TrajectoryStatus { completed, diverged, step_limit };

enum class EventKind { s_zero_crossing, i_zero_crossing, blowup };

struct Event {
    EventKind kind;
    double t;
};

struct Sample {
    double t;
    State x;
};

struct Trajectory {
    std::vector<Sample> samples;
    std::vector<Event> events;
    TrajectoryStatus status = TrajectoryStatus::completed;
};

Trajectory integrate(const ModelParams& p, const State& x0, double t0,
                     double t1, const SolverConfig& cfg);

// Sign-change scan over consecutive samples with linear interpolation of the
// crossing time; appends a blowup event when the trajectory diverged.
std::vector<Event> detect_events(const Trajectory& traj);

} // namespace mfsi
