#include "mfsi/cli.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfsi/analysis.hpp"
#include "mfsi/calibrate.hpp"
#include "mfsi/check.hpp"
#include "mfsi/error.hpp"
#include "mfsi/integrate.hpp"
#include "mfsi/io.hpp"
#include "mfsi/model.hpp"
#include "mfsi/scenario.hpp"

namespace mfsi {
namespace {

namespace fs = std::filesystem;

int exit_code_for(const Error& e) {
    switch (e.code()) {
    case ErrorCode::NonConvergence:
    case ErrorCode::NotAnEquilibrium:
    case ErrorCode::AllDiverged:
        return 3;
    default:
        return 1;
    }
}

double parse_number(const std::string& text, const std::string& what) {
    double v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size())
        throw Error(ErrorCode::UsageError, "bad " + what + " '" + text + "'");
    return v;
}

// "name:lo:hi:count"
AxisSpec parse_axis(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        auto c = text.find(':', pos);
        if (c == std::string::npos) { parts.push_back(text.substr(pos)); break; }
        parts.push_back(text.substr(pos, c - pos));
        pos = c + 1;
    }
    if (parts.size() != 4)
        throw Error(ErrorCode::UsageError, "axis '" + text + "' must be name:lo:hi:count");
    AxisSpec a;
    a.name = parts[0];
    a.lo = parse_number(parts[1], "axis bound");
    a.hi = parse_number(parts[2], "axis bound");
    long long n = 0;
    auto [p, ec] = std::from_chars(parts[3].data(), parts[3].data() + parts[3].size(), n);
    if (ec != std::errc{} || p != parts[3].data() + parts[3].size() || n < 1)
        throw Error(ErrorCode::UsageError, "axis count '" + parts[3] + "' must be a positive integer");
    a.count = static_cast<int>(n);
    return a;
}

Scenario load_scenario(const std::string& path, bool checked_rates) {
    return parse_scenario(read_file(path), checked_rates);
}

void report_divergence(const Scenario& sc, const Trajectory& traj) {
    double t_last = traj.samples.empty() ? sc.t0 : traj.samples.back().t;
    std::fprintf(stderr, "note: run halted, state diverged near t = %s (threshold %s)\n",
                 format_double(t_last).c_str(),
                 format_double(sc.solver.blowup_threshold).c_str());
    if (sc.params.mu1 == 0 && sc.params.mu2 == 0) {
        std::fprintf(stderr,
                     "note: with mu1 = mu2 = 0 the total satisfies d(s+i)/dt = k*(s+i) with k = %s, "
                     "so the total grows like exp(k*t) and divergence is expected\n",
                     format_double(sc.params.k).c_str());
    }
}

// Runs one scenario and writes trajectory outputs. Returns the process exit code.
int run_simulation(const Scenario& sc, const std::string& out_dir, bool svg, int max_rows) {
    Trajectory traj = integrate(sc.params, sc.x0, sc.t0, sc.t1, sc.solver);
    fs::create_directories(out_dir);
    write_file((fs::path(out_dir) / "trajectory.csv").string(), trajectory_csv(sc, traj, max_rows));
    if (svg)
        write_file((fs::path(out_dir) / "trajectory.svg").string(), trajectory_svg(traj, max_rows));
    if (sc.assumed)
        std::fprintf(stderr, "note: preset '%s' uses an assumed initial state\n", sc.label.c_str());
    if (traj.status == TrajectoryStatus::diverged) {
        report_divergence(sc, traj);
        return 2;
    }
    if (traj.status == TrajectoryStatus::step_limit) {
        std::fprintf(stderr, "note: step budget exhausted near t = %s; raise solver max_steps\n",
                     format_double(traj.samples.back().t).c_str());
        return 3;
    }
    return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                 bool svg, int max_rows, bool unchecked) {
    Scenario sc = load_scenario(scenario_path, !unchecked);
    return run_simulation(sc, out_dir, svg, max_rows);
}

int cmd_equilibria(const std::string& scenario_path, bool unchecked) {
    Scenario sc = load_scenario(scenario_path, !unchecked);
    Region region = default_region();
    auto eqs = find_equilibria(sc.params, region);
    std::fputs(equilibria_report(region, eqs).c_str(), stdout);
    return 0;
}

int cmd_sweep(const std::string& scenario_path, const std::string& axis1_text,
              const std::string& axis2_text, const std::string& out_dir,
              bool svg, int threads, bool unchecked) {
    Scenario sc = load_scenario(scenario_path, !unchecked);
    SweepBase base;
    base.params = sc.params;
    base.x0 = sc.x0;
    base.t0 = sc.t0;
    base.t1 = sc.t1;
    base.solver = sc.solver;
    base.checked_rates = !unchecked;
    SweepMap map = sweep(base, parse_axis(axis1_text), parse_axis(axis2_text), threads);
    fs::create_directories(out_dir);
    write_file((fs::path(out_dir) / "sweep.csv").string(), sweep_csv(map));
    if (svg)
        write_file((fs::path(out_dir) / "sweep.svg").string(), sweep_svg(map));
    return 0;
}

int cmd_calibrate(const std::string& scenario_path, const std::string& obs_path,
                  const std::string& free_list, const std::string& frozen_list,
                  int budget, bool unchecked) {
    Scenario sc = load_scenario(scenario_path, !unchecked);
    ObservationSet obs = parse_observations_csv(read_file(obs_path));

    FitSpec spec;
    spec.frozen = sc.params;
    spec.checked_rates = !unchecked;
    spec.x0_policy = X0Policy::first_observation;

    std::size_t pos = 0;
    while (pos < free_list.size()) {
        auto c = free_list.find(',', pos);
        if (c == std::string::npos) c = free_list.size();
        std::string name = free_list.substr(pos, c - pos);
        if (!name.empty()) spec.free.push_back(name);
        pos = c + 1;
    }
    if (spec.free.empty())
        throw Error(ErrorCode::UsageError, "--free needs at least one parameter name");

    // Frozen overrides: "name=value,name=value". Applied on top of the template.
    std::map<std::string, double> overrides;
    pos = 0;
    while (pos < frozen_list.size()) {
        auto c = frozen_list.find(',', pos);
        if (c == std::string::npos) c = frozen_list.size();
        std::string item = frozen_list.substr(pos, c - pos);
        pos = c + 1;
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::UsageError, "--frozen item '" + item + "' must be name=value");
        overrides.emplace(item.substr(0, eq), parse_number(item.substr(eq + 1), "frozen value"));
    }
    if (!overrides.empty()) {
        double a = sc.params.alpha, sg = sc.params.sigma;
        double b1 = sc.params.beta1, b2 = sc.params.beta2;
        double m1 = sc.params.mu1, m2 = sc.params.mu2;
        for (const auto& [name, value] : overrides) {
            if (name == "alpha") a = value;
            else if (name == "sigma") sg = value;
            else if (name == "beta1") b1 = value;
            else if (name == "beta2") b2 = value;
            else if (name == "mu1") m1 = value;
            else if (name == "mu2") m2 = value;
            else throw Error(ErrorCode::UsageError, "unknown parameter '" + name + "' in --frozen");
        }
        spec.frozen = ModelParams::validate(a, sg, b1, b2, m1, m2, !unchecked);
    }

    double mu_hi = unchecked ? 1e6 : 1.0;
    for (const auto& name : spec.free) {
        double guess = 0, lo = 0, hi = 1;
        if (name == "alpha") { guess = spec.frozen.alpha; lo = 1e-6; }
        else if (name == "sigma") guess = spec.frozen.sigma;
        else if (name == "beta1") guess = spec.frozen.beta1;
        else if (name == "beta2") guess = spec.frozen.beta2;
        else if (name == "mu1") { guess = spec.frozen.mu1; hi = mu_hi; }
        else if (name == "mu2") { guess = spec.frozen.mu2; hi = mu_hi; }
        else throw Error(ErrorCode::UsageError, "unknown parameter '" + name + "' in --free");
        spec.initial_guess.push_back(guess);
        spec.bounds.push_back({lo, hi});
    }

    FitResult fr = fit(spec, obs, sc.solver, budget);
    std::fputs(fit_report(fr, spec.free).c_str(), stdout);
    return fr.converged ? 0 : 3;
}

int cmd_scenario(const std::string& name, const std::string& out_dir,
                 bool svg, int max_rows, int threads) {
    if (name.size() != 1 || name[0] < 'A' || name[0] > 'D')
        throw Error(ErrorCode::UsageError, "scenario name must be one of A, B, C, D");
    Scenario sc = preset(name[0]);
    if (name[0] == 'D') {
        SweepBase base;
        base.params = sc.params;
        base.x0 = sc.x0;
        base.t0 = sc.t0;
        base.t1 = sc.t1;
        base.solver = sc.solver;
        AxisSpec a1{"beta1", 0.0, 1.0, 11};
        AxisSpec a2{"beta2", 0.0, 1.0, 11};
        SweepMap map = sweep(base, a1, a2, threads);
        fs::create_directories(out_dir);
        write_file((fs::path(out_dir) / "sweep.csv").string(), sweep_csv(map));
        if (svg)
            write_file((fs::path(out_dir) / "sweep.svg").string(), sweep_svg(map));
        return 0;
    }
    return run_simulation(sc, out_dir, svg, max_rows);
}

} // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"microfinance solvency dynamics toolkit"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = ".", obs_path, axis1_text, axis2_text;
    std::string free_list, frozen_list, preset_name;
    bool svg = false, unchecked = false;
    int max_rows = 10001, budget = 2000, threads = 1;

    auto* sim = app.add_subcommand("simulate", "integrate a scenario and write the trajectory");
    sim->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    sim->add_option("--out", out_dir, "output directory");
    sim->add_flag("--svg", svg, "also write an SVG plot");
    sim->add_option("--steps", max_rows, "maximum CSV rows");
    sim->add_flag("--unchecked-rates", unchecked, "allow exit rates above 1");

    auto* eq = app.add_subcommand("equilibria", "locate and classify equilibria");
    eq->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    eq->add_flag("--unchecked-rates", unchecked, "allow exit rates above 1");

    auto* sw = app.add_subcommand("sweep", "classify outcomes over a parameter grid");
    sw->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    sw->add_option("--axis1", axis1_text, "first axis, name:lo:hi:count")->required();
    sw->add_option("--axis2", axis2_text, "second axis, name:lo:hi:count")->required();
    sw->add_option("--out", out_dir, "output directory");
    sw->add_flag("--svg", svg, "also write an SVG map");
    sw->add_option("--threads", threads, "worker threads");
    sw->add_flag("--unchecked-rates", unchecked, "allow exit rates above 1");

    auto* cal = app.add_subcommand("calibrate", "fit parameters to observations");
    cal->add_option("--scenario", scenario_path, "scenario JSON template (initial guess)")->required();
    cal->add_option("--obs", obs_path, "observations CSV")->required();
    cal->add_option("--free", free_list, "comma-separated free parameters")->required();
    cal->add_option("--frozen", frozen_list, "overrides, name=value[,name=value]");
    cal->add_option("--budget", budget, "objective evaluation budget");
    cal->add_flag("--unchecked-rates", unchecked, "allow exit rates above 1");

    auto* pre = app.add_subcommand("scenario", "run a built-in preset (A-D)");
    pre->add_option("name", preset_name, "preset name")->required();
    pre->add_option("--out", out_dir, "output directory");
    pre->add_flag("--svg", svg, "also write SVG output");
    pre->add_option("--steps", max_rows, "maximum CSV rows");
    pre->add_option("--threads", threads, "worker threads for preset D");

    auto* chk = app.add_subcommand("check", "print the built-in consistency report");
    (void)chk;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(scenario_path, out_dir, svg, max_rows, unchecked);
        if (eq->parsed())
            return cmd_equilibria(scenario_path, unchecked);
        if (sw->parsed())
            return cmd_sweep(scenario_path, axis1_text, axis2_text, out_dir, svg, threads, unchecked);
        if (cal->parsed())
            return cmd_calibrate(scenario_path, obs_path, free_list, frozen_list, budget, unchecked);
        if (pre->parsed())
            return cmd_scenario(preset_name, out_dir, svg, max_rows, threads);
        std::fputs(check_report().c_str(), stdout);
        return 0;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

} // namespace mfsi
