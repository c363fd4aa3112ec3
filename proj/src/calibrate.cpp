#include "mfsi/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mfsi {

namespace {

struct FreeVector {
    const FitSpec* spec;
    int n_params; // leading entries are parameter values, trailing x0 if free

    ModelParams params(const std::vector<double>& v) const {
        ModelParams raw = spec->frozen;
        for (int j = 0; j < n_params; ++j) {
            const std::string& name = spec->free[j];
            if (name == "alpha") raw.alpha = v[j];
            else if (name == "sigma") raw.sigma = v[j];
            else if (name == "beta1") raw.beta1 = v[j];
            else if (name == "beta2") raw.beta2 = v[j];
            else if (name == "mu1") raw.mu1 = v[j];
            else if (name == "mu2") raw.mu2 = v[j];
            else throw Error(ErrorCode::UsageError, "unknown free parameter: " + name);
        }
        return ModelParams::validate(raw.alpha, raw.sigma, raw.beta1, raw.beta2,
                                     raw.mu1, raw.mu2, spec->checked_rates);
    }
};

} // namespace

void ObservationSet::validate() const {
    if (rows.size() < 3)
        throw Error(ErrorCode::FieldOutOfRange, "need at least 3 observations");
    for (std::size_t j = 0; j < rows.size(); ++j) {
        const Observation& r = rows[j];
        if (!std::isfinite(r.t) || !std::isfinite(r.s) || !std::isfinite(r.i) ||
            !std::isfinite(r.w))
            throw Error(ErrorCode::NonFinite, "observation row " + std::to_string(j));
        if (r.w < 0.0)
            throw Error(ErrorCode::FieldOutOfRange,
                        "observation weight must be >= 0");
        if (j > 0 && !(r.t > rows[j - 1].t))
            throw Error(ErrorCode::FieldOutOfRange,
                        "observation times must be strictly increasing");
    }
}

double objective_from(const ModelParams& p, const State& x0,
                      const ObservationSet& obs, const SolverConfig& solver) {
    obs.validate();
    const double t0 = obs.rows.front().t;
    const double t1 = obs.rows.back().t;
    const Trajectory traj = integrate(p, x0, t0, t1, solver);
    if (traj.status != TrajectoryStatus::completed)
        return kDivergenceSentinel;

    double total = 0.0;
    std::size_t cursor = 1;
    for (const Observation& row : obs.rows) {
        while (cursor < traj.samples.size() && traj.samples[cursor].t < row.t)
            ++cursor;
        const Sample& b = traj.samples[std::min(cursor, traj.samples.size() - 1)];
        const Sample& a = traj.samples[cursor - 1];
        double s, i;
        if (b.t == row.t) {
            s = b.x.s;
            i = b.x.i;
        } else if (a.t == row.t) {
            s = a.x.s;
            i = a.x.i;
        } else {
            const double f = (row.t - a.t) / (b.t - a.t);
            s = a.x.s + f * (b.x.s - a.x.s);
            i = a.x.i + f * (b.x.i - a.x.i);
        }
        const double es = s - row.s;
        const double ei = i - row.i;
        total += row.w * (es * es + ei * ei);
    }
    if (!std::isfinite(total))
        return kDivergenceSentinel;
    return total;
}

double objective(const ModelParams& p, const ObservationSet& obs,
                 const SolverConfig& solver) {
    obs.validate();
    return objective_from(p, {obs.rows.front().s, obs.rows.front().i}, obs,
                          solver);
}

FitResult fit(const FitSpec& spec, const ObservationSet& obs,
              const SolverConfig& solver, int budget) {
    obs.validate();
    if (spec.free.empty())
        throw Error(ErrorCode::UsageError, "free parameter set must be nonempty");
    if (budget < 10)
        throw Error(ErrorCode::UsageError, "budget must be >= 10");
    if (spec.bounds.size() != spec.free.size() ||
        spec.initial_guess.size() != spec.free.size())
        throw Error(ErrorCode::UsageError,
                    "bounds and initial_guess must match the free set");

    FreeVector fv{&spec, static_cast<int>(spec.free.size())};

    std::vector<std::pair<double, double>> box = spec.bounds;
    std::vector<double> guess = spec.initial_guess;
    if (spec.x0_policy == X0Policy::free_x0) {
        box.push_back(spec.s0_bounds);
        box.push_back(spec.i0_bounds);
        guess.push_back(spec.x0_guess.first);
        guess.push_back(spec.x0_guess.second);
    }
    const int d = static_cast<int>(guess.size());
    for (int j = 0; j < d; ++j) {
        if (!(box[j].first <= box[j].second))
            throw Error(ErrorCode::UsageError, "empty bound interval");
        if (guess[j] < box[j].first || guess[j] > box[j].second)
            throw Error(ErrorCode::UsageError, "initial guess outside bounds");
    }

    auto project = [&](std::vector<double>& v) {
        for (int j = 0; j < d; ++j)
            v[j] = std::clamp(v[j], box[j].first, box[j].second);
    };

    int evaluations = 0;
    auto eval = [&](const std::vector<double>& v) {
        ++evaluations;
        const ModelParams p = fv.params(v);
        if (spec.x0_policy == X0Policy::free_x0) {
            State x0{v[fv.n_params], v[fv.n_params + 1]};
            return objective_from(p, x0, obs, solver);
        }
        return objective(p, obs, solver);
    };

    // Initial simplex: axis offsets of a tenth of each bound interval,
    // flipped inward when they would leave the box.
    std::vector<std::vector<double>> verts;
    verts.push_back(guess);
    for (int j = 0; j < d; ++j) {
        std::vector<double> v = guess;
        double step = 0.1 * (box[j].second - box[j].first);
        if (step == 0.0)
            step = 1e-8;
        v[j] = (v[j] + step <= box[j].second) ? v[j] + step : v[j] - step;
        project(v);
        verts.push_back(v);
    }
    std::vector<double> fvals(d + 1);
    for (int j = 0; j <= d; ++j)
        fvals[j] = eval(verts[j]);

    std::vector<double> best_v = verts[0];
    double best_f = fvals[0];
    for (int j = 1; j <= d; ++j)
        if (fvals[j] < best_f) {
            best_f = fvals[j];
            best_v = verts[j];
        }

    FitResult result;
    result.trace.emplace_back(0, best_f);

    bool converged = false;
    int iteration = 0;
    while (evaluations < budget) {
        ++iteration;

        std::vector<int> order(d + 1);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return fvals[a] < fvals[b]; });
        {
            std::vector<std::vector<double>> tv(d + 1);
            std::vector<double> tf(d + 1);
            for (int j = 0; j <= d; ++j) {
                tv[j] = verts[order[j]];
                tf[j] = fvals[order[j]];
            }
            verts.swap(tv);
            fvals.swap(tf);
        }

        double diameter = 0.0;
        for (int a = 0; a <= d; ++a)
            for (int b = a + 1; b <= d; ++b)
                for (int j = 0; j < d; ++j)
                    diameter = std::max(diameter,
                                        std::abs(verts[a][j] - verts[b][j]));
        if (diameter < 1e-8 || fvals[d] - fvals[0] < 1e-12) {
            converged = true;
            break;
        }

        std::vector<double> centroid(d, 0.0);
        for (int j = 0; j < d; ++j) {
            for (int a = 0; a < d; ++a)
                centroid[j] += verts[a][j];
            centroid[j] /= d;
        }
        auto blend = [&](const std::vector<double>& from, double coeff) {
            std::vector<double> v(d);
            for (int j = 0; j < d; ++j)
                v[j] = centroid[j] + coeff * (from[j] - centroid[j]);
            project(v);
            return v;
        };

        const std::vector<double> reflected = blend(verts[d], -1.0);
        const double fr = eval(reflected);
        if (fr < fvals[0]) {
            if (evaluations < budget) {
                const std::vector<double> expanded = blend(reflected, 2.0);
                const double fe = eval(expanded);
                if (fe < fr) {
                    verts[d] = expanded;
                    fvals[d] = fe;
                } else {
                    verts[d] = reflected;
                    fvals[d] = fr;
                }
            } else {
                verts[d] = reflected;
                fvals[d] = fr;
            }
        } else if (fr < fvals[d - 1]) {
            verts[d] = reflected;
            fvals[d] = fr;
        } else if (evaluations < budget) {
            const bool outside = fr < fvals[d];
            const std::vector<double> contracted =
                outside ? blend(reflected, 0.5) : blend(verts[d], 0.5);
            const double fc = eval(contracted);
            if (fc < std::min(fr, fvals[d])) {
                verts[d] = contracted;
                fvals[d] = fc;
            } else {
                for (int a = 1; a <= d && evaluations < budget; ++a) {
                    for (int j = 0; j < d; ++j)
                        verts[a][j] = verts[0][j] + 0.5 * (verts[a][j] - verts[0][j]);
                    project(verts[a]);
                    fvals[a] = eval(verts[a]);
                }
            }
        }

        for (int j = 0; j <= d; ++j)
            if (fvals[j] < best_f) {
                best_f = fvals[j];
                best_v = verts[j];
            }
        result.trace.emplace_back(iteration, best_f);
    }

    if (best_f >= kDivergenceSentinel)
        throw Error(ErrorCode::AllDiverged,
                    "every sampled point hit the divergence sentinel");

    result.params = fv.params(best_v);
    result.x0 = (spec.x0_policy == X0Policy::free_x0)
                    ? State{best_v[fv.n_params], best_v[fv.n_params + 1]}
                    : State{obs.rows.front().s, obs.rows.front().i};
    result.residual = best_f;
    result.evaluations = evaluations;
    result.converged = converged;
    return result;
}

} // namespace mfsi
