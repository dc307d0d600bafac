#include "plant.hpp"

#include <cmath>

namespace awekit {

// ---------------------------------------------------------------------------
// Aircraft
// ---------------------------------------------------------------------------

void AircraftParams::validate() const {
  if (!(mass > 0)) throw ConfigError("aircraft.mass_kg: must be > 0");
  if (!(S_w > 0)) throw ConfigError("aircraft.wing_area_m2: must be > 0");
  if (!(rho > 0)) throw ConfigError("aircraft.air_density_kgm3: must be > 0");
  if (!(b_span > 0 && c_chord > 0))
    throw ConfigError("aircraft.span/chord: must be > 0");
  if (!(J_diag.x() > 0 && J_diag.y() > 0 && J_diag.z() > 0))
    throw ConfigError("aircraft.inertia_diag: must be positive definite");
  if (!(v_a_min > 0)) throw ConfigError("aircraft.v_a_min_ms: must be > 0");
  if (C_L_alpha == 0) throw ConfigError("aircraft.C_L_alpha: must be nonzero");
}

Mat3 AircraftParams::inertia() const { return J_diag.asDiagonal(); }

Mat3 AircraftParams::inertia_inverse() const {
  return Vec3(1.0 / J_diag.x(), 1.0 / J_diag.y(), 1.0 / J_diag.z()).asDiagonal();
}

AircraftDerivative aircraft_derivatives(const AircraftState& state,
                                        const AircraftParams& params,
                                        const Vec3& F_a_B, const Vec3& F_g_B,
                                        const Vec3& F_t_B, const Vec3& F_p_B,
                                        const Vec3& M_a_B) {
  AircraftDerivative d;
  Vec3 F_tot = F_a_B + F_g_B + F_t_B + F_p_B;
  d.p_dot = state.q_OB * state.v_B;
  d.v_dot = -state.omega_B.cross(state.v_B) + F_tot / params.mass;
  const Quat& q = state.q_OB;
  Quat omega_q(0.0, state.omega_B.x(), state.omega_B.y(), state.omega_B.z());
  Quat qd = q * omega_q;
  d.q_dot = 0.5 * Eigen::Vector4d(qd.w(), qd.x(), qd.y(), qd.z());
  Vec3 Jw = params.inertia() * state.omega_B;
  d.omega_dot = -params.inertia_inverse() * (state.omega_B.cross(Jw) - M_a_B);
  return d;
}

AeroResult aero_forces(const AircraftState& state, const AircraftParams& params,
                       const Vec3& wind_O, const SurfaceDeflections& defl) {
  AeroResult r;
  Vec3 v_rel_B = state.v_B - state.q_OB.conjugate() * wind_O;
  r.v_a = v_rel_B.norm();
  if (r.v_a <= params.v_a_min) {
    r.degenerate = true;
    return r;
  }
  r.alpha = std::atan2(v_rel_B.z(), v_rel_B.x());
  r.beta = std::asin(clamp(v_rel_B.y() / r.v_a, -1.0, 1.0));

  double qbar = 0.5 * params.rho * r.v_a * r.v_a;
  double C_L = params.C_L0 + params.C_L_alpha * r.alpha;
  double C_D = params.C_D0 + params.k_induced * C_L * C_L;
  double C_Y = params.C_Y_beta * r.beta;
  double L = qbar * params.S_w * C_L;
  double D = qbar * params.S_w * C_D;
  double Y = qbar * params.S_w * C_Y;

  double ca = std::cos(r.alpha), sa = std::sin(r.alpha);
  double cb = std::cos(r.beta), sb = std::sin(r.beta);
  Mat3 R_BA;
  R_BA << ca * cb, -ca * sb, -sa,
          sb,       cb,       0,
          sa * cb, -sa * sb,  ca;
  r.F_B = R_BA * Vec3(-D, Y, -L);

  double p_hat = state.omega_B.x() * params.b_span / (2.0 * r.v_a);
  double q_hat = state.omega_B.y() * params.c_chord / (2.0 * r.v_a);
  double r_hat = state.omega_B.z() * params.b_span / (2.0 * r.v_a);
  double da = deg2rad(defl.aileron_deg);
  double de = deg2rad(defl.elevator_deg);
  double dr = deg2rad(defl.rudder_deg);

  double C_l = params.C_l_beta * r.beta + params.C_l_p * p_hat +
               params.C_l_r * r_hat + params.C_l_delta_a * da;
  double C_m = params.C_m0 + params.C_m_alpha * r.alpha + params.C_m_q * q_hat +
               params.C_m_delta_e * de;
  double C_n = params.C_n_beta * r.beta + params.C_n_p * p_hat +
               params.C_n_r * r_hat + params.C_n_delta_r * dr;
  r.M_B = qbar * params.S_w *
          Vec3(params.b_span * C_l, params.c_chord * C_m, params.b_span * C_n);
  return r;
}

// ---------------------------------------------------------------------------
// Actuators
// ---------------------------------------------------------------------------

void ActuatorParams::validate() const {
  if (!(bandwidth > 0)) throw ConfigError("actuators.bandwidth_rads: must be > 0");
  if (!(aileron_limit_deg > 0 && elevator_limit_deg > 0 && rudder_limit_deg > 0))
    throw ConfigError("actuators.*_limit_deg: must be > 0");
  if (!(rate_limit_deg_s > 0))
    throw ConfigError("actuators.rate_limit_deg_s: must be > 0");
}

namespace {

double surface_step(double pos, double cmd, double bandwidth, double limit,
                    double rate_limit, double dt) {
  cmd = clamp(cmd, -limit, limit);
  double target = cmd + std::exp(-bandwidth * dt) * (pos - cmd);
  double max_move = rate_limit * dt;
  double next = pos + clamp(target - pos, -max_move, max_move);
  return clamp(next, -limit, limit);
}

}  // namespace

ActuatorBank actuator_step(const ActuatorBank& bank, const ActuatorParams& params,
                           const SurfaceDeflections& commands_deg, double dt) {
  ActuatorBank out;
  out.pos.aileron_deg =
      surface_step(bank.pos.aileron_deg, commands_deg.aileron_deg, params.bandwidth,
                   params.aileron_limit_deg, params.rate_limit_deg_s, dt);
  out.pos.elevator_deg =
      surface_step(bank.pos.elevator_deg, commands_deg.elevator_deg, params.bandwidth,
                   params.elevator_limit_deg, params.rate_limit_deg_s, dt);
  out.pos.rudder_deg =
      surface_step(bank.pos.rudder_deg, commands_deg.rudder_deg, params.bandwidth,
                   params.rudder_limit_deg, params.rate_limit_deg_s, dt);
  return out;
}

// ---------------------------------------------------------------------------
// Tether
// ---------------------------------------------------------------------------

void TetherParams::validate() const {
  if (n_particles < 1) throw ConfigError("tether.particles: must be >= 1");
  if (!(stiffness > 0)) throw ConfigError("tether.stiffness_npm: must be > 0");
  if (!(damping >= 0)) throw ConfigError("tether.damping_nspm: must be >= 0");
  if (!(rho_t > 0)) throw ConfigError("tether.mass_density_kgpm: must be > 0");
  if (!(diameter > 0)) throw ConfigError("tether.diameter_m: must be > 0");
  if (!(stiffness_ref_length > 0))
    throw ConfigError("tether.stiffness_ref_length_m: must be > 0");
}

void TetherState::validate(int n_particles) const {
  if (static_cast<int>(node_pos.size()) != n_particles ||
      static_cast<int>(node_vel.size()) != n_particles)
    throw ConfigError("tether state: node count mismatch");
  if (!(l_unstretched > 0)) throw ConfigError("tether state: length must be > 0");
}

TetherForces tether_forces(const TetherState& tether, const TetherParams& params,
                           const WindAtPosition& wind, const Vec3& anchor_O,
                           const Vec3& aircraft_pos_O, const Vec3& aircraft_vel_O) {
  const int n = params.n_particles;
  const double l_seg = tether.l_unstretched / n;
  const double c_seg = params.segment_stiffness(l_seg);
  const double d_seg = params.segment_damping(l_seg);
  const double m_node = params.rho_t * l_seg;

  TetherForces out;
  out.segment_spring.assign(n, 0.0);
  out.free_node_accel.assign(n - 1, Vec3::Zero());

  auto node_p = [&](int i) -> Vec3 {
    if (i < 0) return anchor_O;
    if (i == n - 1) return aircraft_pos_O;
    return tether.node_pos[i];
  };
  auto node_v = [&](int i) -> Vec3 {
    if (i < 0) return Vec3::Zero();
    if (i == n - 1) return aircraft_vel_O;
    return tether.node_vel[i];
  };

  // Segment tensions (tension-only: slack segments transmit nothing).
  std::vector<double> tension(n, 0.0);
  std::vector<Vec3> dir(n, Vec3::Zero());
  for (int i = 0; i < n; ++i) {
    Vec3 d = node_p(i) - node_p(i - 1);
    double dist = d.norm();
    if (dist < 1e-6) {
      out.node_collapse = true;
      continue;
    }
    Vec3 u = d / dist;
    double stretch = dist - l_seg;
    if (stretch <= 0) continue;
    double stretch_rate = u.dot(node_v(i) - node_v(i - 1));
    double spring = c_seg * stretch;
    out.segment_spring[i] = spring;
    tension[i] = std::max(0.0, spring + d_seg * stretch_rate);
    dir[i] = u;
  }

  // Free node accelerations: spring net, gravity, perpendicular drag.
  for (int i = 0; i < n - 1; ++i) {
    Vec3 f = -tension[i] * dir[i] + tension[i + 1] * dir[i + 1];
    f += Vec3(0, 0, m_node * params.gravity);
    Vec3 axis = dir[i] + dir[i + 1];
    double axis_n = axis.norm();
    Vec3 v_rel = node_v(i) - wind(node_p(i));
    Vec3 v_perp = v_rel;
    if (axis_n > 1e-9) {
      Vec3 u = axis / axis_n;
      v_perp -= v_rel.dot(u) * u;
    }
    f += -0.5 * params.rho_air * params.c_d * params.diameter * l_seg *
         v_perp.norm() * v_perp;
    out.free_node_accel[i] = f / m_node;
  }

  out.force_aircraft_O = -tension[n - 1] * dir[n - 1];
  out.tension_aircraft = tension[n - 1];
  out.tension_ground = tension[0];
  return out;
}

// ---------------------------------------------------------------------------
// Winch
// ---------------------------------------------------------------------------

void WinchParams::validate() const {
  if (!(inertia > 0)) throw ConfigError("winch.inertia_kgm2: must be > 0");
  if (!(friction >= 0)) throw ConfigError("winch.friction: must be >= 0");
  if (!(a_max > 0 && a_min < 0)) throw ConfigError("winch.accel limits: sign error");
  if (!(v_max > v_min)) throw ConfigError("winch.speed limits: v_max <= v_min");
  if (!(drum_radius > 0)) throw ConfigError("winch.drum_radius_m: must be > 0");
}

WinchState winch_step(const WinchState& winch, const WinchParams& params,
                      double F_t_ground, double F_t_set, double dt) {
  WinchState out = winch;
  double err = F_t_ground - F_t_set;
  double torque = params.kp * err + params.ki * winch.integrator;
  double a_raw = params.drum_radius * (torque - params.friction * winch.v) /
                 params.inertia;
  double a = clamp(a_raw, params.a_min, params.a_max);
  double v_raw = winch.v + a * dt;
  double v = clamp(v_raw, params.v_min, params.v_max);
  bool clamped = (a != a_raw) || (v != v_raw);
  if (!clamped) out.integrator += err * dt;
  out.v = v;
  out.accel = (v - winch.v) / dt;
  return out;
}

// ---------------------------------------------------------------------------
// Full plant
// ---------------------------------------------------------------------------

void PlantParams::validate() const {
  aircraft.validate();
  actuators.validate();
  tether.validate();
  winch.validate();
}

namespace {

struct DerivFlags {
  bool degenerate = false;
  bool collapse = false;
};

int state_size(int n_particles) { return 13 + 6 * (n_particles - 1) + 1; }

void pack(const PlantState& s, int n, VecX& y) {
  y.segment<3>(0) = s.ac.p_O;
  y.segment<3>(3) = s.ac.v_B;
  y[6] = s.ac.q_OB.w();
  y[7] = s.ac.q_OB.x();
  y[8] = s.ac.q_OB.y();
  y[9] = s.ac.q_OB.z();
  y.segment<3>(10) = s.ac.omega_B;
  for (int i = 0; i < n - 1; ++i) {
    y.segment<3>(13 + 6 * i) = s.tether.node_pos[i];
    y.segment<3>(13 + 6 * i + 3) = s.tether.node_vel[i];
  }
  y[13 + 6 * (n - 1)] = s.tether.l_unstretched;
}

void unpack(const VecX& y, int n, PlantState& s) {
  s.ac.p_O = y.segment<3>(0);
  s.ac.v_B = y.segment<3>(3);
  s.ac.q_OB = Quat(y[6], y[7], y[8], y[9]);
  s.ac.omega_B = y.segment<3>(10);
  for (int i = 0; i < n - 1; ++i) {
    s.tether.node_pos[i] = y.segment<3>(13 + 6 * i);
    s.tether.node_vel[i] = y.segment<3>(13 + 6 * i + 3);
  }
  s.tether.l_unstretched = y[13 + 6 * (n - 1)];
}

// Continuous-state derivative; surface deflections and winch speed are held
// constant over the step.
void derivative(const VecX& y, const PlantParams& params, const PlantInputs& inputs,
                const SurfaceDeflections& defl, double v_winch, int n, VecX& dy,
                DerivFlags& flags) {
  PlantState s;
  s.tether.node_pos.resize(n);
  s.tether.node_vel.resize(n);
  unpack(y, n, s);
  double qn = s.ac.q_OB.norm();
  if (qn > 0) s.ac.q_OB.coeffs() /= qn;

  Vec3 wind_ac = inputs.wind_O(s.ac.p_O);
  AeroResult aero = aero_forces(s.ac, params.aircraft, wind_ac, defl);
  if (aero.degenerate) flags.degenerate = true;

  Vec3 ac_vel_O = s.ac.q_OB * s.ac.v_B;
  TetherForces tf = tether_forces(s.tether, params.tether, inputs.wind_O,
                                  Vec3::Zero(), s.ac.p_O, ac_vel_O);
  if (tf.node_collapse) flags.collapse = true;

  Vec3 F_g_B = s.ac.q_OB.conjugate() *
               Vec3(0, 0, params.aircraft.mass * params.aircraft.gravity);
  Vec3 F_t_B = s.ac.q_OB.conjugate() * tf.force_aircraft_O;
  AircraftDerivative ad = aircraft_derivatives(s.ac, params.aircraft, aero.F_B,
                                               F_g_B, F_t_B, Vec3::Zero(), aero.M_B);
  dy.segment<3>(0) = ad.p_dot;
  dy.segment<3>(3) = ad.v_dot;
  dy.segment<4>(6) = ad.q_dot;
  dy.segment<3>(10) = ad.omega_dot;
  for (int i = 0; i < n - 1; ++i) {
    dy.segment<3>(13 + 6 * i) = s.tether.node_vel[i];
    dy.segment<3>(13 + 6 * i + 3) = tf.free_node_accel[i];
  }
  dy[13 + 6 * (n - 1)] = v_winch;
}

}  // namespace

PlantOutputs evaluate_plant(const PlantState& state, const PlantParams& params,
                            const PlantInputs& inputs) {
  PlantOutputs out;
  Vec3 wind_ac = inputs.wind_O(state.ac.p_O);
  out.aero = aero_forces(state.ac, params.aircraft, wind_ac, state.act.pos);
  Vec3 ac_vel_O = state.ac.v_O();
  out.tether = tether_forces(state.tether, params.tether, inputs.wind_O,
                             Vec3::Zero(), state.ac.p_O, ac_vel_O);
  Vec3 F_g_B = state.ac.q_OB.conjugate() *
               Vec3(0, 0, params.aircraft.mass * params.aircraft.gravity);
  Vec3 F_t_B = state.ac.q_OB.conjugate() * out.tether.force_aircraft_O;
  AircraftDerivative ad =
      aircraft_derivatives(state.ac, params.aircraft, out.aero.F_B, F_g_B, F_t_B,
                           Vec3::Zero(), out.aero.M_B);
  out.accel_O = state.ac.q_OB * (ad.v_dot + state.ac.omega_B.cross(state.ac.v_B));
  return out;
}

PlantState integrate_step(const PlantState& state, const PlantParams& params,
                          const PlantInputs& inputs, double dt) {
  const int n = params.tether.n_particles;
  PlantState next = state;

  // Winch and actuators advance with their discrete laws first; their outputs
  // are held over the RK4 step.
  PlantOutputs now = evaluate_plant(state, params, inputs);
  next.winch = winch_step(state.winch, params.winch, now.tether.tension_ground,
                          inputs.F_t_set, dt);
  next.act = actuator_step(state.act, params.actuators, inputs.commands_deg, dt);

  const int m = state_size(n);
  VecX y0(m), k1(m), k2(m), k3(m), k4(m), tmp(m);
  pack(next, n, y0);
  DerivFlags flags;
  derivative(y0, params, inputs, next.act.pos, next.winch.v, n, k1, flags);
  tmp = y0 + 0.5 * dt * k1;
  derivative(tmp, params, inputs, next.act.pos, next.winch.v, n, k2, flags);
  tmp = y0 + 0.5 * dt * k2;
  derivative(tmp, params, inputs, next.act.pos, next.winch.v, n, k3, flags);
  tmp = y0 + dt * k3;
  derivative(tmp, params, inputs, next.act.pos, next.winch.v, n, k4, flags);
  tmp = y0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  unpack(tmp, n, next);
  double qn = next.ac.q_OB.norm();
  if (qn > 1e-12) next.ac.q_OB.coeffs() /= qn;

  next.tether.node_pos[n - 1] = next.ac.p_O;
  next.tether.node_vel[n - 1] = next.ac.v_O();
  next.tether.reel_rate = next.winch.v;
  next.t = state.t + dt;
  if (flags.degenerate) next.degenerate_airflow = true;
  if (flags.collapse || !all_finite(tmp)) next.numerical_failure = true;
  return next;
}

}  // namespace awekit
