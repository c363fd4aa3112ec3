#include "mfsi/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace mfsi {

namespace {

bool finite_state(const State& x) {
    return std::isfinite(x.s) && std::isfinite(x.i);
}

double max_abs(const State& x) {
    return std::max(std::abs(x.s), std::abs(x.i));
}

State rk4_step(const ModelParams& p, const State& y, double h) {
    const VectorFieldValue k1 = vector_field(p, y);
    const VectorFieldValue k2 =
        vector_field(p, {y.s + 0.5 * h * k1.ds, y.i + 0.5 * h * k1.di});
    const VectorFieldValue k3 =
        vector_field(p, {y.s + 0.5 * h * k2.ds, y.i + 0.5 * h * k2.di});
    const VectorFieldValue k4 =
        vector_field(p, {y.s + h * k3.ds, y.i + h * k3.di});
    return {y.s + h / 6.0 * (k1.ds + 2.0 * k2.ds + 2.0 * k3.ds + k4.ds),
            y.i + h / 6.0 * (k1.di + 2.0 * k2.di + 2.0 * k3.di + k4.di)};
}

void run_fixed(const ModelParams& p, double t0, double t1,
               const SolverConfig& cfg, Trajectory& out) {
    // Planned step count from the span; the small slack keeps an exact
    // multiple of the step from gaining a spurious extra step.
    const double span = t1 - t0;
    const std::int64_t planned =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(
            std::ceil(span / cfg.step - 1e-9)));
    const std::int64_t n = std::min(planned, cfg.max_step_count);

    State y = out.samples.front().x;
    for (std::int64_t j = 1; j <= n; ++j) {
        // Sample times come from the index, not accumulation, so they are
        // reproducible and drift-free; the last step lands exactly on t1.
        const double t_prev = t0 + static_cast<double>(j - 1) * cfg.step;
        const double t_next = (j < planned) ? t0 + static_cast<double>(j) * cfg.step : t1;
        const double h = (j < planned) ? cfg.step : t_next - t_prev;

        const State next = rk4_step(p, y, h);
        if (!finite_state(next)) {
            out.status = TrajectoryStatus::diverged;
            return;
        }
        y = next;
        out.samples.push_back({t_next, y});
        if (max_abs(y) >= cfg.blowup_threshold) {
            out.status = TrajectoryStatus::diverged;
            return;
        }
    }
    out.status = (n == planned) ? TrajectoryStatus::completed
                                : TrajectoryStatus::step_limit;
}

void run_adaptive(const ModelParams& p, double t0, double t1,
                  const SolverConfig& cfg, Trajectory& out) {
    const double min_step = 1e-14 * (t1 - t0);
    double t = t0;
    double h = cfg.step;
    State y = out.samples.front().x;
    std::int64_t attempts = 0;

    while (t < t1) {
        if (attempts >= cfg.max_step_count) {
            out.status = TrajectoryStatus::step_limit;
            return;
        }
        ++attempts;

        const bool clipped = h >= t1 - t;
        const double h_use = clipped ? t1 - t : h;

        const State full = rk4_step(p, y, h_use);
        const State half_mid = rk4_step(p, y, 0.5 * h_use);
        const State half = rk4_step(p, half_mid, 0.5 * h_use);

        if (!finite_state(full) || !finite_state(half)) {
            if (h_use <= min_step) {
                out.status = TrajectoryStatus::diverged;
                return;
            }
            h = 0.1 * h_use;
            continue;
        }

        // Step-halving Richardson estimate: the h/2 pair is one order more
        // accurate, so |half - full|/15 estimates its local error. Relative
        // control with an absolute floor of one borrower.
        const double err = std::max(
            std::abs(half.s - full.s) / 15.0 / std::max(std::abs(half.s), 1.0),
            std::abs(half.i - full.i) / 15.0 / std::max(std::abs(half.i), 1.0));

        const double factor =
            (err == 0.0) ? 4.0
                         : std::clamp(0.9 * std::pow(cfg.rel_tol / err, 0.2),
                                      0.1, 4.0);

        if (err <= cfg.rel_tol) {
            y = half;
            t = clipped ? t1 : t + h_use;
            out.samples.push_back({t, y});
            if (max_abs(y) >= cfg.blowup_threshold) {
                out.status = TrajectoryStatus::diverged;
                return;
            }
            h = h_use * factor;
        } else {
            if (h_use <= min_step) {
                out.status = TrajectoryStatus::diverged;
                return;
            }
            h = h_use * factor;
        }
    }
    out.status = TrajectoryStatus::completed;
}

} // namespace

void SolverConfig::validate() const {
    if (!(step > 0.0) || !std::isfinite(step))
        throw Error(ErrorCode::FieldOutOfRange, "solver step must be > 0");
    if (!(rel_tol > 0.0) || !std::isfinite(rel_tol))
        throw Error(ErrorCode::FieldOutOfRange, "solver rel_tol must be > 0");
    if (max_step_count <= 0)
        throw Error(ErrorCode::FieldOutOfRange, "solver max_steps must be > 0");
    if (!(blowup_threshold > 0.0) || !std::isfinite(blowup_threshold))
        throw Error(ErrorCode::FieldOutOfRange, "solver blowup_threshold must be > 0");
}

Trajectory integrate(const ModelParams& p, const State& x0, double t0,
                     double t1, const SolverConfig& cfg) {
    cfg.validate();
    if (!(t1 > t0))
        throw Error(ErrorCode::InvalidSpan, "t1 must be greater than t0");
    if (!finite_state(x0) || !std::isfinite(t0) || !std::isfinite(t1))
        throw Error(ErrorCode::NonFinite, "initial state and span must be finite");

    Trajectory out;
    out.samples.push_back({t0, x0});
    if (max_abs(x0) >= cfg.blowup_threshold) {
        out.status = TrajectoryStatus::diverged;
    } else if (cfg.method == SolverMethod::rk4_fixed) {
        run_fixed(p, t0, t1, cfg, out);
    } else {
        run_adaptive(p, t0, t1, cfg, out);
    }
    out.events = detect_events(out);
    return out;
}

std::vector<Event> detect_events(const Trajectory& traj) {
    std::vector<Event> events;
    const auto& s = traj.samples;
    for (std::size_t j = 1; j < s.size(); ++j) {
        const Sample& a = s[j - 1];
        const Sample& b = s[j];
        if (a.x.s * b.x.s < 0.0)
            events.push_back({EventKind::s_zero_crossing,
                              a.t + (b.t - a.t) * a.x.s / (a.x.s - b.x.s)});
        if (a.x.i * b.x.i < 0.0)
            events.push_back({EventKind::i_zero_crossing,
                              a.t + (b.t - a.t) * a.x.i / (a.x.i - b.x.i)});
    }
    if (traj.status == TrajectoryStatus::diverged && !s.empty())
        events.push_back({EventKind::blowup, s.back().t});
    return events;
}

} // namespace mfsi
