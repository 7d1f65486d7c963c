#include "crowdsweep/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "crowdsweep/geometry.hpp"

namespace crowdsweep {

namespace {

constexpr double kPi = 3.14159265358979323846;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Vec2 perp(const Vec2& v) { return Vec2(-v.y(), v.x()); }  // +90 degrees

struct Derived {
  double d0;        // ||x0 - x_obs||
  Vec2 p_entry;     // contact point on the straight approach
  Vec2 p_release;   // tangent point on the chosen side
  double theta_deg;
  double theta_rad;
  double arc;
  double rot_sign;  // +1 ccw, -1 cw from entry to release
  double l_tan;     // tangent length from target to the contact circle
  Vec2 dir3;        // release -> target unit direction
};

void check_params(const ObstacleRunParams& p) {
  const double rho = p.contact_radius;
  if (!(rho > 0.0) || !(p.speed > 0.0) || !(p.horizon > 0.0))
    throw std::invalid_argument("obstacle run: contact radius, speed, horizon must be > 0");
  if (!(p.tau >= 0.0)) throw std::invalid_argument("obstacle run: tau must be >= 0");
  if ((p.x_tar - p.x_obs).norm() <= rho)
    throw DegenerateGeometryError("obstacle run: target inside the contact circle");
  if ((p.x0 - p.x_obs).norm() <= rho)
    throw DegenerateGeometryError("obstacle run: start inside the contact circle");
}

Derived derive(const ObstacleRunParams& p) {
  check_params(p);
  Derived d;
  d.d0 = (p.x0 - p.x_obs).norm();
  d.p_entry = p.x_obs + p.contact_radius * unit_direction(p.x0, p.x_obs);
  auto [pl, pr] = tangent_points(p.x_obs, p.contact_radius, p.x_tar);
  d.p_release = p.side == Side::Left ? pl : pr;
  const Vec2 entry_dir = unit_direction(d.p_entry, p.x_obs);
  d.theta_deg = contact_angle(entry_dir, d.p_release, p.x_obs);
  d.theta_rad = d.theta_deg * kPi / 180.0;
  d.arc = arc_length(d.theta_deg, p.contact_radius);
  const double cr = cross2(d.p_entry - p.x_obs, d.p_release - p.x_obs);
  d.rot_sign = cr >= 0.0 ? 1.0 : -1.0;
  const double dist_ot = (p.x_obs - p.x_tar).norm();
  d.l_tan = std::sqrt(dist_ot * dist_ot - p.contact_radius * p.contact_radius);
  d.dir3 = unit_direction(p.x_tar, d.p_release);
  return d;
}

// A = L_tan + (phase-1 distance) + s * arc; terminal distance = A - s*T*a.
double path_constant(const ObstacleRunParams& p, const Derived& d) {
  const double d1 = p.mode == PhaseMode::Paper ? d.d0 : d.d0 - p.contact_radius;
  return d.l_tan + d1 + p.speed * d.arc;
}

double golden_section_min(double lo, double hi, double tol,
                          const std::function<double(double)>& f) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - gr * (b - a);
  double dpt = a + gr * (b - a);
  double fc = f(c), fd = f(dpt);
  while (b - a > tol) {
    if (fc < fd) {
      b = dpt;
      dpt = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = dpt;
      fc = fd;
      dpt = a + gr * (b - a);
      fd = f(dpt);
    }
  }
  return (a + b) / 2.0;
}

}  // namespace

std::pair<Vec2, Vec2> tangent_points(const Vec2& x_obs, double rho, const Vec2& x_tar) {
  if (!(rho > 0.0)) throw std::invalid_argument("tangent_points: rho <= 0");
  const Vec2 w = x_tar - x_obs;
  const double dist = w.norm();
  if (dist <= rho)
    throw DegenerateGeometryError("tangent_points: target inside or on the contact circle");
  // Foot of the tangent chord plus the half-chord offset.
  const double d2 = dist * dist;
  const double half_chord = rho * std::sqrt(d2 - rho * rho) / d2;
  const Vec2 foot = x_obs + (rho * rho / d2) * w;
  const Vec2 off = half_chord * perp(w);
  const Vec2 pa = foot + off;
  const Vec2 pb = foot - off;
  // Left has positive cross product of (x_obs - x_tar) with (p - x_obs).
  const Vec2 axis = x_obs - x_tar;
  if (cross2(axis, pa - x_obs) >= 0.0) return {pa, pb};
  return {pb, pa};
}

double contact_angle(const Vec2& entry_dir, const Vec2& p_release, const Vec2& x_obs) {
  const double en = entry_dir.norm();
  if (en == 0.0) throw std::invalid_argument("contact_angle: zero entry direction");
  const Vec2 r = p_release - x_obs;
  const double rn = r.norm();
  if (rn == 0.0) throw std::invalid_argument("contact_angle: release at obstacle center");
  const double c = std::clamp(entry_dir.dot(r) / (en * rn), -1.0, 1.0);
  return std::acos(c) * 180.0 / kPi;
}

double arc_length(double theta_deg, double rho) {
  if (theta_deg < 0.0 || theta_deg > 180.0)
    throw std::invalid_argument("arc_length: theta outside [0, 180]");
  if (!(rho > 0.0)) throw std::invalid_argument("arc_length: rho <= 0");
  return kPi * rho * theta_deg / 180.0;
}

std::pair<double, double> phase_times(double a_bar, const ObstacleRunParams& p) {
  if (!(a_bar > 0.0)) throw std::invalid_argument("phase_times: a_bar <= 0");
  const Derived d = derive(p);
  const double dist1 = p.mode == PhaseMode::Paper ? d.d0 : d.d0 - p.contact_radius;
  const double t1 = dist1 / (p.speed * a_bar);
  const double theta1 = t1 + d.arc / a_bar;
  return {t1, theta1};
}

double terminal_distance(double a_bar, const ObstacleRunParams& p) {
  if (!(a_bar > 0.0)) throw std::invalid_argument("terminal_distance: a_bar <= 0");
  const Derived d = derive(p);
  return std::max(0.0, path_constant(p, d) - p.speed * p.horizon * a_bar);
}

double cost_closed_form(double a_bar, const ObstacleRunParams& p) {
  if (!(a_bar > 0.0)) throw std::invalid_argument("cost_closed_form: a_bar <= 0");
  const double term = terminal_distance(a_bar, p);
  return 0.5 * term * term + 0.5 * p.tau * a_bar * a_bar * p.horizon;
}

ObstacleRunResult optimize_constant_control(const ObstacleRunParams& p) {
  const Derived d = derive(p);
  const double A = path_constant(p, d);
  const double s = p.speed, T = p.horizon;
  // Stationary point of (A - s T a)^2 / 2 + (tau/2) T a^2; for tau = 0 this
  // is the earliest control that exactly reaches the target.
  double a_star = s * A / (s * s * T + p.tau);

  const double lo = 1e-3, hi = 10.0 * s;
  if (a_star <= lo || a_star >= hi)
    throw ConvergenceFailure("optimize_constant_control: stationary point outside bracket",
                             a_star);
  const double a_gs = golden_section_min(
      lo, hi, 1e-8, [&](double a) { return cost_closed_form(a, p); });
  const double j_star = cost_closed_form(a_star, p);
  const double j_gs = cost_closed_form(a_gs, p);
  if (j_gs < j_star - 1e-9 * (1.0 + j_star))
    throw ConvergenceFailure("optimize_constant_control: closed form lost to search",
                             std::abs(a_gs - a_star));

  ObstacleRunResult r;
  r.a_bar = a_star;
  auto [t1, theta1] = phase_times(a_star, p);
  r.t1 = t1;
  r.theta1 = theta1;
  r.theta_deg = d.theta_deg;
  r.arc_len = d.arc;
  r.x_release = d.p_release;
  r.terminal_dist = terminal_distance(a_star, p);
  r.J = j_star;
  return r;
}

std::vector<SweepRow> sweep_table(const std::vector<double>& tau_list,
                                  ObstacleRunParams p) {
  std::vector<SweepRow> rows;
  rows.reserve(tau_list.size());
  for (double tau : tau_list) {
    if (tau < 0.0) throw std::invalid_argument("sweep_table: tau < 0");
    p.tau = tau;
    const ObstacleRunResult r = optimize_constant_control(p);
    rows.push_back({tau, r.a_bar, r.t1, r.theta1, r.J});
  }
  return rows;
}

PathSample piecewise_state(double t, double a_bar, const ObstacleRunParams& p) {
  if (!(a_bar > 0.0)) throw std::invalid_argument("piecewise_state: a_bar <= 0");
  const Derived d = derive(p);
  auto [t1, theta1] = phase_times(a_bar, p);
  const double v3 = p.speed * a_bar;
  const double t_arrive = theta1 + d.l_tan / v3;

  PathSample s;
  s.t = t;
  if (t < t1) {
    // Straight approach; in paper mode the implied speed is d0/t1, not s*a.
    const double f = std::max(t, 0.0) / t1;
    s.position = p.x0 + f * (d.p_entry - p.x0);
    s.velocity = (d.p_entry - p.x0) / t1;
  } else if (t <= theta1) {
    const double omega = d.rot_sign * a_bar / p.contact_radius;
    const double alpha = omega * (t - t1);
    const Vec2 r0 = d.p_entry - p.x_obs;
    const double c = std::cos(alpha), sn = std::sin(alpha);
    const Vec2 r(c * r0.x() - sn * r0.y(), sn * r0.x() + c * r0.y());
    s.position = p.x_obs + r;
    s.velocity = omega * perp(r);
  } else if (t < t_arrive) {
    s.position = d.p_release + v3 * (t - theta1) * d.dir3;
    s.velocity = v3 * d.dir3;
  } else {
    s.position = p.x_tar;
    s.velocity = Vec2::Zero();
  }
  return s;
}

std::vector<PathSample> piecewise_trajectory(double a_bar, const ObstacleRunParams& p,
                                             int n_samples) {
  if (n_samples < 1) throw std::invalid_argument("piecewise_trajectory: n_samples < 1");
  std::vector<PathSample> out;
  out.reserve(n_samples + 1);
  for (int k = 0; k <= n_samples; ++k) {
    const double t = p.horizon * static_cast<double>(k) / n_samples;
    out.push_back(piecewise_state(t, a_bar, p));
  }
  return out;
}

}  // namespace crowdsweep
