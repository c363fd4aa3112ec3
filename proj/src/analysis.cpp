#include "mfsi/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace mfsi {

namespace {

double residual_norm_at(const ModelParams& p, const State& x) {
    const VectorFieldValue f = vector_field(p, x);
    return std::max(std::abs(f.ds), std::abs(f.di));
}

// One Newton step from the 2x2 linear solve; returns false when the Jacobian
// is singular or anything goes non-finite.
bool newton_step(const ModelParams& p, State& x, double& step_norm) {
    const VectorFieldValue f = vector_field(p, x);
    const Jacobian j = jacobian(p, x);
    const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if (det == 0.0 || !std::isfinite(det))
        return false;
    const double dx = (f.ds * j[1][1] - f.di * j[0][1]) / det;
    const double dy = (f.di * j[0][0] - f.ds * j[1][0]) / det;
    x.s -= dx;
    x.i -= dy;
    if (!std::isfinite(x.s) || !std::isfinite(x.i))
        return false;
    step_norm = std::hypot(dx, dy);
    return true;
}

void set_field(ModelParams& p, const std::string& name, double v) {
    if (name == "alpha") p.alpha = v;
    else if (name == "sigma") p.sigma = v;
    else if (name == "beta1") p.beta1 = v;
    else if (name == "beta2") p.beta2 = v;
    else if (name == "mu1") p.mu1 = v;
    else if (name == "mu2") p.mu2 = v;
    else throw Error(ErrorCode::UsageError, "unknown parameter name: " + name);
}

} // namespace

const char* to_string(StabilityClass c) {
    switch (c) {
        case StabilityClass::stable_node: return "stable_node";
        case StabilityClass::unstable_node: return "unstable_node";
        case StabilityClass::saddle: return "saddle";
        case StabilityClass::stable_spiral: return "stable_spiral";
        case StabilityClass::unstable_spiral: return "unstable_spiral";
        case StabilityClass::center_degenerate: return "center_degenerate";
    }
    return "?";
}

const char* to_string(OutcomeTag t) {
    switch (t) {
        case OutcomeTag::diverged: return "diverged";
        case OutcomeTag::collapse_to_origin: return "collapse_to_origin";
        case OutcomeTag::s_dominant: return "s_dominant";
        case OutcomeTag::i_dominant: return "i_dominant";
        case OutcomeTag::mixed: return "mixed";
        case OutcomeTag::invalid: return "invalid";
    }
    return "?";
}

StabilityClass classify_linear(double trace, double det) {
    if (det < 0.0)
        return StabilityClass::saddle;
    const double class_tol = 1e-9 * (1.0 + std::abs(trace));
    const double disc = trace * trace - 4.0 * det;
    double re_min;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        re_min = std::min(std::abs((trace + r) / 2.0),
                          std::abs((trace - r) / 2.0));
    } else {
        re_min = std::abs(trace / 2.0);
    }
    if (re_min <= class_tol)
        return StabilityClass::center_degenerate;
    if (disc < 0.0)
        return trace < 0.0 ? StabilityClass::stable_spiral
                           : StabilityClass::unstable_spiral;
    return trace < 0.0 ? StabilityClass::stable_node
                       : StabilityClass::unstable_node;
}

Equilibrium classify(const ModelParams& p, State point, double newton_tol) {
    for (int iter = 0; iter < 5; ++iter) {
        if (residual_norm_at(p, point) < newton_tol)
            break;
        State polished = point;
        double step_norm = 0.0;
        if (!newton_step(p, polished, step_norm))
            break; // singular Jacobian: keep the point as-is
        point = polished;
        if (step_norm < 1e-12 * (1.0 + std::hypot(point.s, point.i)))
            break;
    }

    const double residual = residual_norm_at(p, point);
    if (!(residual < newton_tol))
        throw Error(ErrorCode::NotAnEquilibrium,
                    "residual stayed above tolerance after polishing");

    const Jacobian j = jacobian(p, point);
    const double trace = j[0][0] + j[1][1];
    const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    const double disc = trace * trace - 4.0 * det;

    Equilibrium eq;
    eq.point = point;
    eq.residual_norm = residual;
    eq.trace = trace;
    eq.det = det;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        eq.eigenvalues[0] = {(trace - r) / 2.0, 0.0};
        eq.eigenvalues[1] = {(trace + r) / 2.0, 0.0};
    } else {
        const double im = std::sqrt(-disc) / 2.0;
        eq.eigenvalues[0] = {trace / 2.0, -im};
        eq.eigenvalues[1] = {trace / 2.0, im};
    }
    eq.classification = classify_linear(trace, det);
    return eq;
}

std::vector<Equilibrium> find_equilibria(const ModelParams& p,
                                         const Region& region,
                                         int grid_density) {
    if (!(region.s_lo < region.s_hi) || !(region.i_lo < region.i_hi))
        throw Error(ErrorCode::FieldOutOfRange, "region must be non-degenerate");
    if (grid_density < 2)
        throw Error(ErrorCode::FieldOutOfRange, "grid_density must be >= 2");

    const double w_s = region.s_hi - region.s_lo;
    const double w_i = region.i_hi - region.i_lo;
    const double newton_tol = 1e-9 * std::max(w_s, w_i);
    const double dedup_tol = 1e-6 * std::hypot(w_s, w_i);

    // The origin is an exact root of every valid parameter set and is kept
    // unconditionally; Newton cannot reach it when the Jacobian there is
    // singular (mu1 = mu2 = 0 makes det(J(0,0)) = 0).
    std::vector<State> roots;
    roots.push_back({0.0, 0.0});
    if (!(residual_norm_at(p, roots.front()) < newton_tol))
        throw Error(ErrorCode::NonConvergence, "origin failed its residual check");

    for (int a = 0; a < grid_density; ++a) {
        for (int b = 0; b < grid_density; ++b) {
            State x{region.s_lo + w_s * a / (grid_density - 1),
                    region.i_lo + w_i * b / (grid_density - 1)};
            bool converged = false;
            for (int iter = 0; iter < 50; ++iter) {
                double step_norm = 0.0;
                if (!newton_step(p, x, step_norm))
                    break; // singular Jacobian at this seed: skip it
                if (step_norm < 1e-12 * (1.0 + std::hypot(x.s, x.i))) {
                    converged = true;
                    break;
                }
            }
            if (!converged)
                continue;
            if (x.s < region.s_lo || x.s > region.s_hi ||
                x.i < region.i_lo || x.i > region.i_hi)
                continue;
            if (!(residual_norm_at(p, x) < newton_tol))
                continue;
            const bool duplicate =
                std::any_of(roots.begin(), roots.end(), [&](const State& r) {
                    return std::hypot(x.s - r.s, x.i - r.i) < dedup_tol;
                });
            if (!duplicate)
                roots.push_back(x);
        }
    }

    std::sort(roots.begin(), roots.end(), [](const State& a, const State& b) {
        return a.s != b.s ? a.s < b.s : a.i < b.i;
    });

    std::vector<Equilibrium> out;
    out.reserve(roots.size());
    for (const State& r : roots)
        out.push_back(classify(p, r, newton_tol));
    return out;
}

OutcomeClass classify_outcome(const Trajectory& traj) {
    const State end = traj.samples.back().x;
    if (traj.status == TrajectoryStatus::diverged)
        return {OutcomeTag::diverged, end, true};
    if (std::hypot(end.s, end.i) < 1.0)
        return {OutcomeTag::collapse_to_origin, end, true};
    if (end.s > 10.0 * std::max(end.i, 1.0))
        return {OutcomeTag::s_dominant, end, true};
    if (end.i > 10.0 * std::max(end.s, 1.0))
        return {OutcomeTag::i_dominant, end, true};
    return {OutcomeTag::mixed, end, true};
}

SweepMap sweep(const SweepBase& base, const AxisSpec& axis1,
               const AxisSpec& axis2, int threads) {
    static const char* kFields[] = {"alpha", "sigma", "beta1",
                                    "beta2", "mu1",   "mu2"};
    auto known = [](const std::string& n) {
        return std::any_of(std::begin(kFields), std::end(kFields),
                           [&](const char* f) { return n == f; });
    };
    if (!known(axis1.name) || !known(axis2.name))
        throw Error(ErrorCode::UsageError, "axis must name a model parameter");
    if (axis1.name == axis2.name)
        throw Error(ErrorCode::UsageError, "axes must name distinct parameters");
    if (axis1.count < 1 || axis2.count < 1)
        throw Error(ErrorCode::UsageError, "axis count must be >= 1");

    auto grid_value = [](const AxisSpec& ax, int idx) {
        if (ax.count == 1)
            return ax.lo;
        return ax.lo + (ax.hi - ax.lo) * idx / (ax.count - 1);
    };

    SweepMap map;
    map.axis1 = axis1;
    map.axis2 = axis2;
    map.cells.resize(static_cast<std::size_t>(axis1.count) * axis2.count);

    auto run_cell = [&](int a, int b) {
        const double v1 = grid_value(axis1, a);
        const double v2 = grid_value(axis2, b);
        SweepCell& cell = map.cells[static_cast<std::size_t>(a) * axis2.count + b];
        cell.v1 = v1;
        cell.v2 = v2;
        ModelParams raw = base.params;
        set_field(raw, axis1.name, v1);
        set_field(raw, axis2.name, v2);
        try {
            const ModelParams p = ModelParams::validate(
                raw.alpha, raw.sigma, raw.beta1, raw.beta2, raw.mu1, raw.mu2,
                base.checked_rates);
            const Trajectory traj =
                integrate(p, base.x0, base.t0, base.t1, base.solver);
            cell.outcome = classify_outcome(traj);
        } catch (const Error&) {
            cell.outcome = {OutcomeTag::invalid, {0.0, 0.0}, false};
        }
    };

    const std::size_t total = map.cells.size();
    if (threads <= 1) {
        for (int a = 0; a < axis1.count; ++a)
            for (int b = 0; b < axis2.count; ++b)
                run_cell(a, b);
    } else {
        // Cells land in preallocated slots indexed by grid position, so the
        // result cannot depend on scheduling.
        std::vector<std::thread> pool;
        const std::size_t n_threads = std::min<std::size_t>(threads, total);
        for (std::size_t w = 0; w < n_threads; ++w) {
            pool.emplace_back([&, w]() {
                for (std::size_t idx = w; idx < total; idx += n_threads)
                    run_cell(static_cast<int>(idx / axis2.count),
                             static_cast<int>(idx % axis2.count));
            });
        }
        for (auto& th : pool)
            th.join();
    }
    return map;
}

} // namespace mfsi
