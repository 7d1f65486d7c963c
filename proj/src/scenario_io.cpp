#include "crowdsweep/scenario_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "crowdsweep/geometry.hpp"

namespace crowdsweep {

namespace {

using nlohmann::json;

Vec2 parse_vec2(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ValidationError("scenario: " + where + " must be a [x, y] pair");
  return Vec2(j[0].get<double>(), j[1].get<double>());
}

double require_number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number())
    throw ValidationError("scenario: " + where + " is missing numeric field '" + key + "'");
  return j[key].get<double>();
}

json vec2_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

// Round to 6 significant digits so emitted numbers match format_sig.
double round_sig(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return std::strtod(buf, nullptr);
}

json rounded(const json& j);

json rounded_value(const json& j) {
  if (j.is_number_float()) return round_sig(j.get<double>());
  return rounded(j);
}

json rounded(const json& j) {
  if (j.is_object()) {
    json out = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = rounded_value(it.value());
    return out;
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& e : j) out.push_back(rounded_value(e));
    return out;
  }
  if (j.is_number_float()) return round_sig(j.get<double>());
  return j;
}

std::string dump(const json& j) { return rounded(j).dump(2) + "\n"; }

}  // namespace

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("scenario: top level must be an object");
  if (!j.contains("agents") || !j["agents"].is_array() || j["agents"].empty())
    throw ValidationError("scenario: 'agents' must be a non-empty array");

  Scenario sc;
  sc.horizon = require_number(j, "horizon", "top level");
  const json& agents = j["agents"];
  sc.x0 = Configuration::Zero(2 * static_cast<int>(agents.size()));
  for (size_t i = 0; i < agents.size(); ++i) {
    const std::string where = "agents[" + std::to_string(i) + "]";
    Agent a;
    a.radius = require_number(agents[i], "radius", where);
    a.speed = require_number(agents[i], "speed", where);
    if (!agents[i].contains("target"))
      throw ValidationError("scenario: " + where + " is missing 'target'");
    if (!agents[i].contains("start"))
      throw ValidationError("scenario: " + where + " is missing 'start'");
    a.target = parse_vec2(agents[i]["target"], where + ".target");
    sc.x0.segment<2>(2 * static_cast<int>(i)) =
        parse_vec2(agents[i]["start"], where + ".start");
    sc.agents.push_back(a);
  }
  if (j.contains("obstacles")) {
    if (!j["obstacles"].is_array())
      throw ValidationError("scenario: 'obstacles' must be an array");
    const json& obstacles = j["obstacles"];
    for (size_t k = 0; k < obstacles.size(); ++k) {
      const std::string where = "obstacles[" + std::to_string(k) + "]";
      Obstacle o;
      o.radius = require_number(obstacles[k], "radius", where);
      if (!obstacles[k].contains("center"))
        throw ValidationError("scenario: " + where + " is missing 'center'");
      o.center = parse_vec2(obstacles[k]["center"], where + ".center");
      sc.obstacles.push_back(o);
    }
  }
  validate_scenario(sc);
  return sc;
}

Scenario parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

std::string scenario_to_json(const Scenario& sc) {
  json j;
  j["horizon"] = sc.horizon;
  j["agents"] = json::array();
  for (int i = 0; i < sc.agent_count(); ++i) {
    json a;
    a["radius"] = sc.agents[i].radius;
    a["speed"] = sc.agents[i].speed;
    a["target"] = vec2_json(sc.agents[i].target);
    a["start"] = vec2_json(sc.x0.segment<2>(2 * i));
    j["agents"].push_back(a);
  }
  j["obstacles"] = json::array();
  for (const Obstacle& o : sc.obstacles) {
    json ob;
    ob["center"] = vec2_json(o.center);
    ob["radius"] = o.radius;
    j["obstacles"].push_back(ob);
  }
  return dump(j);
}

std::string format_sig(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "tau,a_bar,t1,theta1,J\n";
  for (const SweepRow& r : rows) {
    out += format_sig(r.tau) + "," + format_sig(r.a_bar) + "," + format_sig(r.t1) + "," +
           format_sig(r.theta1) + "," + format_sig(r.J) + "\n";
  }
  return out;
}

std::string trajectory_csv(const Trajectory& traj, const Scenario& sc) {
  std::string out = "t";
  for (int i = 1; i <= sc.agent_count(); ++i)
    out += ",x" + std::to_string(i) + ",y" + std::to_string(i);
  out += ",min_dist,eta_sum\n";
  for (int k = 0; k < traj.node_count(); ++k) {
    out += format_sig(traj.times[k]);
    for (int i = 0; i < sc.agent_count(); ++i) {
      out += "," + format_sig(traj.states[k][2 * i]);
      out += "," + format_sig(traj.states[k][2 * i + 1]);
    }
    out += "," + format_sig(min_signed_distance(traj.states[k], sc));
    const double eta_sum =
        k < traj.step_count() ? traj.multipliers.row(k).sum() : 0.0;
    out += "," + format_sig(eta_sum) + "\n";
  }
  return out;
}

std::string analytic_result_json(const ObstacleRunResult& r) {
  json j;
  j["a_bar"] = r.a_bar;
  j["t1"] = r.t1;
  j["theta1"] = r.theta1;
  j["theta_deg"] = r.theta_deg;
  j["arc_length"] = r.arc_len;
  j["x_release"] = vec2_json(r.x_release);
  j["terminal_distance"] = r.terminal_dist;
  j["J"] = r.J;
  return dump(j);
}

std::string residual_reports_json(const std::vector<ResidualReport>& reports) {
  json j = json::array();
  for (const ResidualReport& rep : reports)
    for (const ConditionResidual& e : rep.entries) {
      json entry;
      entry["condition"] = e.condition;
      entry["residual"] = e.residual;
      entry["tolerance"] = e.tolerance;
      entry["time"] = e.time;
      entry["pass"] = e.pass;
      j.push_back(entry);
    }
  return dump(j);
}

std::string projection_result_json(const ConfigProjectionResult& r, double before,
                                   double after) {
  json j;
  j["configuration"] = json::array();
  for (int k = 0; k < r.x.size(); ++k) j["configuration"].push_back(r.x[k]);
  j["min_distance_before"] = before;
  j["min_distance_after"] = after;
  j["sweeps"] = r.sweeps;
  j["corrections"] = json::array();
  for (size_t k = 0; k < r.labels.size(); ++k) {
    json c;
    c["pair"] = label_string(r.labels[k]);
    c["value"] = r.corrections[static_cast<int>(k)];
    j["corrections"].push_back(c);
  }
  return dump(j);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

}  // namespace crowdsweep
