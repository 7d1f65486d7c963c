// crowdsweep: simulate controlled crowd motion among disk obstacles and
// reproduce/verify the closed-form single-agent, single-obstacle solution.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crowdsweep/analytic.hpp"
#include "crowdsweep/cones.hpp"
#include "crowdsweep/dynamics.hpp"
#include "crowdsweep/geometry.hpp"
#include "crowdsweep/optimality.hpp"
#include "crowdsweep/scenario_io.hpp"

namespace cs = crowdsweep;

namespace {

struct CommonOpts {
  std::string scenario_path;
  double h = 1e-3;
  std::string scheme = "velocity";
  std::string tie_break = "left";
  std::string mode = "paper";
  double tau = 1.0;
  std::string tau_range;
  std::string output;
  double tol = -1.0;
  double a_bar = 1.0;
  std::string config_csv;
};

cs::Scheme parse_scheme(const std::string& s) {
  if (s == "velocity") return cs::Scheme::VelocityProjection;
  if (s == "position") return cs::Scheme::PositionProjection;
  throw cs::ValidationError("unknown scheme: " + s);
}

cs::TieBreak parse_tie(const std::string& s) {
  if (s == "left") return cs::TieBreak::Left;
  if (s == "right") return cs::TieBreak::Right;
  throw cs::ValidationError("unknown tie-break: " + s);
}

cs::PhaseMode parse_mode(const std::string& s) {
  if (s == "paper") return cs::PhaseMode::Paper;
  if (s == "geometric") return cs::PhaseMode::Geometric;
  throw cs::ValidationError("unknown mode: " + s);
}

std::vector<double> parse_tau_range(const std::string& s) {
  double a = 0.0, b = 0.0, step = 0.0;
  if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &a, &b, &step) != 3)
    throw cs::ValidationError("tau range must be A:B:STEP, got '" + s + "'");
  if (!(step > 0.0) || b < a) throw cs::ValidationError("tau range is empty: " + s);
  std::vector<double> taus;
  const int n = static_cast<int>(std::floor((b - a) / step + 1e-9)) + 1;
  for (int k = 0; k < n; ++k) taus.push_back(a + k * step);
  return taus;
}

cs::ObstacleRunParams run_params(const cs::Scenario& sc, const CommonOpts& o) {
  if (sc.agent_count() != 1 || sc.obstacle_count() != 1)
    throw cs::UnsupportedConfigurationError(
        "this subcommand needs exactly one agent and one obstacle");
  cs::ObstacleRunParams p;
  p.x0 = sc.x0.segment<2>(0);
  p.x_obs = sc.obstacles[0].center;
  p.x_tar = sc.agents[0].target;
  p.contact_radius = sc.agents[0].radius + sc.obstacles[0].radius;
  p.speed = sc.agents[0].speed;
  p.horizon = sc.horizon;
  p.tau = o.tau;
  p.mode = parse_mode(o.mode);
  p.side = o.tie_break == "right" ? cs::Side::Right : cs::Side::Left;
  return p;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty())
    std::cout << text;
  else
    cs::write_text_file(path, text);
}

int cmd_simulate(const CommonOpts& o) {
  const cs::Scenario sc = cs::parse_scenario(o.scenario_path);
  const cs::ControlSignal u =
      cs::ControlSignal::constant(o.a_bar, o.h, sc.horizon, sc.agent_count());
  const cs::Trajectory traj =
      cs::simulate(sc, u, parse_scheme(o.scheme), parse_tie(o.tie_break));
  if (!o.output.empty()) cs::write_text_file(o.output, cs::trajectory_csv(traj, sc));

  double min_d = std::numeric_limits<double>::infinity();
  for (const auto& x : traj.states) min_d = std::min(min_d, cs::min_signed_distance(x, sc));
  const double J = cs::cost_functional(traj, u, o.tau, sc);
  std::cout << "steps: " << traj.step_count() << "\n"
            << "min_signed_distance: " << cs::format_sig(min_d) << "\n"
            << "J: " << cs::format_sig(J) << "\n";
  for (const cs::ContactEvent& e : cs::extract_contacts(
           traj, sc, cs::activation_band(traj.h, traj.velocities.front())))
    std::cout << "contact " << cs::label_string(e.pair) << ": ["
              << cs::format_sig(e.t_enter) << ", " << cs::format_sig(e.t_exit) << "]\n";
  return 0;
}

int cmd_analytic(const CommonOpts& o) {
  const cs::Scenario sc = cs::parse_scenario(o.scenario_path);
  const cs::ObstacleRunResult r = cs::optimize_constant_control(run_params(sc, o));
  const std::string text = cs::analytic_result_json(r);
  std::cout << text;
  if (!o.output.empty()) cs::write_text_file(o.output, text);
  return 0;
}

int cmd_sweep(const CommonOpts& o) {
  const cs::Scenario sc = cs::parse_scenario(o.scenario_path);
  CommonOpts base = o;
  base.tau = 0.0;
  const std::vector<double> taus =
      o.tau_range.empty() ? std::vector<double>{o.tau} : parse_tau_range(o.tau_range);
  const std::vector<cs::SweepRow> rows = cs::sweep_table(taus, run_params(sc, base));
  emit(cs::sweep_csv(rows), o.output);
  return 0;
}

int cmd_check(const CommonOpts& o) {
  const cs::Scenario sc = cs::parse_scenario(o.scenario_path);
  CommonOpts geo = o;
  geo.mode = "geometric";  // verification uses the geometry-consistent phase times
  const cs::ObstacleRunParams params = run_params(sc, geo);
  const cs::ObstacleRunResult r = cs::optimize_constant_control(params);

  const int steps = static_cast<int>(std::llround(sc.horizon / o.h));
  if (steps < 2 || std::abs(steps * o.h - sc.horizon) > 1e-9)
    throw cs::ValidationError("check: --h must divide the horizon");
  Eigen::VectorXd times = Eigen::VectorXd::LinSpaced(steps + 1, 0.0, sc.horizon);
  std::vector<cs::Configuration> states;
  Eigen::MatrixXd q_x(steps + 1, 2);
  for (int k = 0; k <= steps; ++k) {
    const cs::PathSample s = cs::piecewise_state(times[k], r.a_bar, params);
    states.push_back((cs::Configuration(2) << s.position.x(), s.position.y()).finished());
    q_x.row(k) = s.velocity.transpose();
  }
  const cs::Trajectory traj = cs::make_trajectory(times, std::move(states), sc);
  const cs::ControlSignal u =
      cs::ControlSignal::constant(r.a_bar, o.h, sc.horizon, 1);

  // Dual certificate along the candidate: q = C xdot with a small positive
  // scale (the dual cone is scale-free), lambda = -C, terminal adjoint built
  // from the terminal condition's right-hand side.
  const double C = -1e-6;
  q_x *= C;
  cs::DualArc dual;
  dual.lambda = -C;
  dual.q_x = q_x;
  dual.p_x = Eigen::MatrixXd::Zero(steps + 1, 2);
  dual.q_a = Eigen::MatrixXd::Zero(steps + 1, 1);
  dual.p_a = Eigen::MatrixXd::Zero(steps + 1, 1);
  dual.eta = cs::recover_eta(traj, u, sc);
  const cs::Configuration x_T = traj.states.back();
  Eigen::VectorXd eta_T(1);
  eta_T[0] = dual.eta(steps, 0);
  cs::Configuration p_T = -dual.lambda * (x_T - sc.agents[0].target);
  if (eta_T[0] != 0.0)
    p_T += 2.0 * sc.agents[0].speed * eta_T[0] * cs::obstacle_gradient(x_T, 0, 0, sc);
  dual.p_terminal = p_T;

  const double eps = o.tol > 0.0 ? o.tol : 10.0 * o.h;
  const Eigen::VectorXd p_a_T = Eigen::VectorXd::Zero(1);
  std::vector<cs::ResidualReport> reports;
  reports.push_back(cs::check_complementarity(traj, dual.eta, sc, eps));
  reports.push_back(cs::check_orthogonality(dual.q_x, traj, dual.eta, sc, eps));
  reports.push_back(cs::check_dynamics(traj, u, dual.eta, sc, eps));
  reports.push_back(
      cs::check_adjoint(dual.lambda, u, dual.q_x, traj, sc, eps, &dual.q_a, &dual.p_a));
  reports.push_back(
      cs::check_transversality(dual.p_terminal, dual.lambda, x_T, eta_T, sc, eps, &p_a_T));

  bool all = true;
  for (const cs::ResidualReport& rep : reports)
    for (const cs::ConditionResidual& e : rep.entries) {
      all = all && e.pass;
      std::cout << (e.pass ? "PASS " : "FAIL ") << e.condition
                << " residual=" << cs::format_sig(e.residual)
                << " tol=" << cs::format_sig(e.tolerance) << "\n";
    }
  if (!o.output.empty()) cs::write_text_file(o.output, cs::residual_reports_json(reports));
  return all ? 0 : 1;
}

int cmd_project(const CommonOpts& o) {
  const cs::Scenario sc = cs::parse_scenario(o.scenario_path);
  cs::Configuration y = sc.x0;
  if (!o.config_csv.empty()) {
    std::vector<double> vals;
    std::string tok;
    std::stringstream ss(o.config_csv);
    while (std::getline(ss, tok, ',')) {
      try {
        vals.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw cs::ValidationError("project: bad number in --config: '" + tok + "'");
      }
    }
    if (static_cast<int>(vals.size()) != sc.dim())
      throw cs::ValidationError("project: --config needs " + std::to_string(sc.dim()) +
                                " numbers");
    y = Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
  }
  const double before = cs::min_signed_distance(y, sc);
  const cs::ConfigProjectionResult r =
      cs::project_configuration(y, sc, o.tol > 0.0 ? o.tol : 1e-10);
  const double after = cs::min_signed_distance(r.x, sc);
  emit(cs::projection_result_json(r, before, after), o.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crowd motion with disk obstacles: projected sweeping dynamics, "
               "closed-form single-obstacle optimum, and optimality-condition checks"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print help");  // keep -h free; --h is the time step
  CommonOpts o;

  auto add_common = [&](CLI::App* cmd, bool needs_scenario = true) {
    cmd->set_help_flag("--help", "Print help");
    cmd->add_option("--scenario", o.scenario_path, "Scenario JSON file")
        ->required(needs_scenario);
    cmd->add_option("--output", o.output, "Output artifact path");
    cmd->add_option("--tol", o.tol, "Tolerance override");
  };

  CLI::App* sim = app.add_subcommand("simulate", "Integrate the controlled dynamics");
  add_common(sim);
  sim->add_option("--h", o.h, "Time step (default 1e-3)");
  sim->add_option("--scheme", o.scheme, "velocity|position (default velocity)");
  sim->add_option("--tie-break", o.tie_break, "left|right (default left)");
  sim->add_option("--a-bar", o.a_bar, "Constant control value (default 1.0)");
  sim->add_option("--tau", o.tau, "Control-energy weight for the reported cost");

  CLI::App* ana = app.add_subcommand("analytic", "Closed-form constant-control optimum");
  add_common(ana);
  ana->add_option("--tau", o.tau, "Control-energy weight (default 1.0)");
  ana->add_option("--mode", o.mode, "paper|geometric (default paper)");
  ana->add_option("--tie-break", o.tie_break, "left|right release side");

  CLI::App* swp = app.add_subcommand("sweep", "Optimum per tau over a range");
  add_common(swp);
  swp->add_option("--tau", o.tau, "Single tau (when no range given)");
  swp->add_option("--tau-range", o.tau_range, "A:B:STEP inclusive");
  swp->add_option("--mode", o.mode, "paper|geometric (default paper)");
  swp->add_option("--tie-break", o.tie_break, "left|right release side");

  CLI::App* chk = app.add_subcommand("check", "Verify the necessary optimality "
                                              "conditions on the closed-form solution");
  add_common(chk);
  chk->add_option("--h", o.h, "Verification grid step (default 1e-3)");
  chk->add_option("--tau", o.tau, "Control-energy weight (default 1.0)");
  chk->add_option("--tie-break", o.tie_break, "left|right release side");

  CLI::App* prj = app.add_subcommand("project", "Project a configuration onto the "
                                                "feasible set");
  add_common(prj);
  prj->add_option("--config", o.config_csv, "Flat x1,y1,x2,y2,... (default: scenario x0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(o);
    if (ana->parsed()) return cmd_analytic(o);
    if (swp->parsed()) return cmd_sweep(o);
    if (chk->parsed()) return cmd_check(o);
    if (prj->parsed()) return cmd_project(o);
    return 2;
  } catch (const cs::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const cs::UnsupportedConfigurationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
