#pragma once

#include <string>
#include <vector>

#include "crowdsweep/analytic.hpp"
#include "crowdsweep/dynamics.hpp"
#include "crowdsweep/optimality.hpp"
#include "crowdsweep/types.hpp"

namespace crowdsweep {

/// Scenario file schema: top-level keys `horizon`, `agents` (array of
/// {radius, speed, target:[x,y], start:[x,y]}), `obstacles` (array of
/// {center:[x,y], radius}). Validation failures name the offending field.
Scenario parse_scenario(const std::string& path);
Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& sc);

/// %.6g formatting: fixed 6 significant digits, '.' separator, LF endings
/// everywhere below, so emitted artifacts are byte-stable.
std::string format_sig(double v);

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string trajectory_csv(const Trajectory& traj, const Scenario& sc);
std::string analytic_result_json(const ObstacleRunResult& r);
std::string residual_reports_json(const std::vector<ResidualReport>& reports);
std::string projection_result_json(const ConfigProjectionResult& r, double before,
                                   double after);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace crowdsweep
