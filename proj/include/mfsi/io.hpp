#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mfsi/analysis.hpp"
#include "mfsi/calibrate.hpp"
#include "mfsi/integrate.hpp"
#include "mfsi/scenario.hpp"

namespace mfsi {

// Locale-free numeric text. format_double is shortest round-trip (parses
// back to the identical bits); format_fixed is for SVG coordinates.
std::string format_double(double v);
std::string format_fixed(double v, int precision);

// Uniform index selection keeping first and last rows; identity when the
// sample count already fits.
std::vector<std::size_t> thin_indices(std::size_t n, std::size_t max_rows);

std::string trajectory_csv(const Scenario& sc, const Trajectory& traj,
                           std::size_t max_rows = 10001);
std::string sweep_csv(const SweepMap& map);
std::string trajectory_svg(const Trajectory& traj, std::size_t max_rows = 10001);
std::string sweep_svg(const SweepMap& map);

ObservationSet parse_observations_csv(const std::string& bytes);
std::string observations_csv(const ObservationSet& obs);

std::string equilibria_report(const Region& region,
                              const std::vector<Equilibrium>& eqs);
std::string fit_report(const FitResult& fr, const std::vector<std::string>& free);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

} // namespace mfsi
