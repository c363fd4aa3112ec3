#pragma once

#include <string>

#include "mfsi/integrate.hpp"
#include "mfsi/model.hpp"

namespace mfsi {

struct Scenario {
    ModelParams params;
    State x0;
    double t0;
    double t1;
    SolverConfig solver;
    std::string label;
    bool assumed = false; // initial state was filled in, not sourced
};

// Built-in presets A through D. D carries its nominal beta1 = beta2 = 0.5
// point value; the CLI runs D as the 11x11 beta sweep.
Scenario preset(char name);

Scenario parse_scenario(const std::string& bytes, bool checked_rates = true);
std::string serialize_scenario(const Scenario& sc);

} // namespace mfsi
