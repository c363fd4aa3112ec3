#include "mfsi/scenario.hpp"

#include <json.hpp>

namespace mfsi {

namespace {

using nlohmann::json;

double need_number(const json& j, const std::string& path) {
    if (!j.is_number())
        throw Error(ErrorCode::SchemaError, path + ": expected a number");
    return j.get<double>();
}

SolverConfig parse_solver(const json& j) {
    SolverConfig cfg;
    if (j.is_null())
        return cfg;
    if (!j.is_object())
        throw Error(ErrorCode::SchemaError, "$.solver: expected an object");
    for (const auto& [key, value] : j.items()) {
        if (key == "method") {
            if (!value.is_string())
                throw Error(ErrorCode::SchemaError, "$.solver.method: expected a string");
            const std::string m = value.get<std::string>();
            if (m == "rk4-fixed")
                cfg.method = SolverMethod::rk4_fixed;
            else if (m == "rk4-adaptive")
                cfg.method = SolverMethod::rk4_adaptive;
            else
                throw Error(ErrorCode::SchemaError,
                            "$.solver.method: expected rk4-fixed or rk4-adaptive");
        } else if (key == "step") {
            cfg.step = need_number(value, "$.solver.step");
        } else if (key == "rel_tol") {
            cfg.rel_tol = need_number(value, "$.solver.rel_tol");
        } else if (key == "max_steps") {
            if (!value.is_number_integer())
                throw Error(ErrorCode::SchemaError, "$.solver.max_steps: expected an integer");
            cfg.max_step_count = value.get<std::int64_t>();
        } else if (key == "blowup_threshold") {
            cfg.blowup_threshold = need_number(value, "$.solver.blowup_threshold");
        } else {
            throw Error(ErrorCode::SchemaError, "$.solver." + key + ": unknown key");
        }
    }
    return cfg;
}

} // namespace

Scenario preset(char name) {
    const SolverConfig solver;
    switch (name) {
        case 'A':
            return {ModelParams::validate(0.1, 0.5, 0.1, 0.4, 0.0, 0.0),
                    {10000.0, 2000.0}, 0.0, 10.0, solver, "A", false};
        case 'B':
            // The source material never states B's initial point; it is
            // filled with A's and stamped assumed in every output.
            return {ModelParams::validate(0.34, 0.6, 0.7, 0.2, 0.1, 0.9),
                    {10000.0, 2000.0}, 0.0, 10.0, solver, "B", true};
        case 'C':
            return {ModelParams::validate(0.2, 0.29, 0.67, 0.56, 0.8, 0.41),
                    {10000.0, 1865.0}, 0.0, 10.0, solver, "C", false};
        case 'D':
            return {ModelParams::validate(0.73, 0.21, 0.5, 0.5, 0.4, 0.9),
                    {10000.0, 20000.0}, 0.0, 10.0, solver, "D", false};
        default:
            throw Error(ErrorCode::UsageError, "unknown preset (use A, B, C or D)");
    }
}

Scenario parse_scenario(const std::string& bytes, bool checked_rates) {
    json root;
    try {
        root = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::SyntaxError,
                    "malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!root.is_object())
        throw Error(ErrorCode::SchemaError, "$: expected an object");

    static const char* kRequired[] = {"alpha", "sigma", "beta1", "beta2",
                                      "mu1",   "mu2",   "s0",    "i0",
                                      "t0",    "t1"};
    for (const char* key : kRequired)
        if (!root.contains(key))
            throw Error(ErrorCode::SchemaError, std::string("$.") + key + ": missing");

    double num[10];
    for (int j = 0; j < 10; ++j)
        num[j] = need_number(root.at(kRequired[j]), std::string("$.") + kRequired[j]);

    Scenario sc;
    sc.solver = SolverConfig{};
    for (const auto& [key, value] : root.items()) {
        if (key == "label") {
            if (!value.is_string())
                throw Error(ErrorCode::SchemaError, "$.label: expected a string");
            sc.label = value.get<std::string>();
        } else if (key == "assumed") {
            if (!value.is_boolean())
                throw Error(ErrorCode::SchemaError, "$.assumed: expected a boolean");
            sc.assumed = value.get<bool>();
        } else if (key == "solver") {
            sc.solver = parse_solver(value);
        } else {
            bool required = false;
            for (const char* k : kRequired)
                required = required || key == k;
            if (!required)
                throw Error(ErrorCode::SchemaError, "$." + key + ": unknown key");
        }
    }

    sc.params = ModelParams::validate(num[0], num[1], num[2], num[3], num[4],
                                      num[5], checked_rates);
    sc.x0 = {num[6], num[7]};
    sc.t0 = num[8];
    sc.t1 = num[9];
    if (!std::isfinite(sc.x0.s) || !std::isfinite(sc.x0.i))
        throw Error(ErrorCode::NonFinite, "initial state");
    if (!std::isfinite(sc.t0) || !std::isfinite(sc.t1))
        throw Error(ErrorCode::NonFinite, "time span");
    if (!(sc.t1 > sc.t0))
        throw Error(ErrorCode::InvalidSpan, "t1 must be greater than t0");
    sc.solver.validate();
    return sc;
}

std::string serialize_scenario(const Scenario& sc) {
    json root;
    root["alpha"] = sc.params.alpha;
    root["sigma"] = sc.params.sigma;
    root["beta1"] = sc.params.beta1;
    root["beta2"] = sc.params.beta2;
    root["mu1"] = sc.params.mu1;
    root["mu2"] = sc.params.mu2;
    root["s0"] = sc.x0.s;
    root["i0"] = sc.x0.i;
    root["t0"] = sc.t0;
    root["t1"] = sc.t1;
    root["label"] = sc.label;
    root["assumed"] = sc.assumed;
    root["solver"] = {
        {"method", sc.solver.method == SolverMethod::rk4_fixed ? "rk4-fixed"
                                                               : "rk4-adaptive"},
        {"step", sc.solver.step},
        {"rel_tol", sc.solver.rel_tol},
        {"max_steps", sc.solver.max_step_count},
        {"blowup_threshold", sc.solver.blowup_threshold},
    };
    return root.dump(2) + "\n";
}

} // namespace mfsi
