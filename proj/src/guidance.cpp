#include "guidance.hpp"

#include <cmath>

namespace awekit {

// ---------------------------------------------------------------------------
// Path geometry
// ---------------------------------------------------------------------------

void PathShape::validate() const {
  if (!(a > 0 && b > 0)) throw ConfigError("guidance.path.a/b: must be > 0");
  if (!(phi_set > 0 && phi_set < phi_0 && phi_0 < kPi / 2))
    throw ConfigError("guidance.path: need 0 < phi_set < phi_0 < 90 deg");
  if (!(omega0_r > 0)) throw ConfigError("guidance.path.omega0_r: must be > 0");
  if (!(freeze_threshold > 0))
    throw ConfigError("guidance.path.freeze_deg: must be > 0");
}

LatLon lemniscate_point(double s, double a, double b) {
  double c = std::cos(s), sn = std::sin(s);
  double denom = 1.0 + (a / b * c) * (a / b * c);
  return {b * sn / denom, a * sn * c / denom};
}

LatLon lemniscate_deriv(double s, double a, double b) {
  double c = std::cos(s), sn = std::sin(s);
  double r2 = (a / b) * (a / b);
  double denom = 1.0 + r2 * c * c;
  double ddenom = -2.0 * r2 * sn * c;
  LatLon d;
  d.lambda = (b * c * denom - b * sn * ddenom) / (denom * denom);
  d.phi = (a * (c * c - sn * sn) * denom - a * sn * c * ddenom) / (denom * denom);
  return d;
}

Mat3 rotation_WP(double phi_r) {
  double c = std::cos(phi_r), s = std::sin(phi_r);
  Mat3 R;
  R << c, 0, -s,
       0, 1,  0,
       s, 0,  c;
  return R;
}

Vec3 path_point_P(double s, const PathShape& shape) {
  LatLon ll = lemniscate_point(s, shape.a, shape.b);
  double cl = std::cos(ll.lambda), sl = std::sin(ll.lambda);
  double cp = std::cos(ll.phi), sp = std::sin(ll.phi);
  return Vec3(cl * cp, sl * cp, sp);
}

Vec3 path_point_W(double s, const PathShape& shape, double phi_r) {
  return rotation_WP(phi_r) * path_point_P(s, shape);
}

namespace {

Vec3 path_tangent_P(double s, const PathShape& shape) {
  LatLon ll = lemniscate_point(s, shape.a, shape.b);
  LatLon d = lemniscate_deriv(s, shape.a, shape.b);
  double cl = std::cos(ll.lambda), sl = std::sin(ll.lambda);
  double cp = std::cos(ll.phi), sp = std::sin(ll.phi);
  Vec3 dlam(-sl * cp, cl * cp, 0.0);
  Vec3 dphi(-cl * sp, -sl * sp, cp);
  return dlam * d.lambda + dphi * d.phi;
}

}  // namespace

Vec3 path_tangent_W(double s, const PathShape& shape, double phi_r) {
  return rotation_WP(phi_r) * path_tangent_P(s, shape);
}

ClosestPointResult closest_point_newton(const Vec3& r_hat_W, const PathShape& shape,
                                        double phi_r, double s_init) {
  // The rotation is constant in s, so rotate the position into the path frame
  // once and iterate there.
  Vec3 r_p = rotation_WP(phi_r).transpose() * r_hat_W;
  auto h = [&](double s) { return r_p.dot(path_tangent_P(s, shape)); };

  ClosestPointResult out;
  double s = s_init;
  const double eps = 1e-5;
  for (int it = 0; it < 20; ++it) {
    double hv = h(s);
    double hp = (h(s + eps) - h(s - eps)) / (2.0 * eps);
    if (std::abs(hp) < 1e-12) break;
    double step = hv / hp;
    // A stationary point of the dot product; reject wild steps and let the
    // grid fallback handle them.
    if (!std::isfinite(step) || std::abs(step) > 1.0) break;
    s -= step;
    if (std::abs(step) < 1e-10) {
      // Newton can land on the antipodal stationary point; require a local
      // maximum of the dot product.
      double h2 = (h(s + eps) - h(s - eps)) / (2.0 * eps);
      if (h2 < 0 || r_p.dot(path_point_P(s, shape)) > 0) {
        out.s = wrap_2pi(s);
        out.converged = true;
        return out;
      }
      break;
    }
  }

  // Coarse grid, then one polish step.
  out.fallback = true;
  double best_s = 0, best_dot = -2.0;
  for (int k = 0; k < 64; ++k) {
    double sk = 2.0 * kPi * k / 64.0;
    double d = r_p.dot(path_point_P(sk, shape));
    if (d > best_dot) {
      best_dot = d;
      best_s = sk;
    }
  }
  double hv = h(best_s);
  double hp = (h(best_s + eps) - h(best_s - eps)) / (2.0 * eps);
  if (std::abs(hp) > 1e-12 && std::isfinite(hv / hp) && std::abs(hv / hp) < 0.2)
    best_s -= hv / hp;
  out.s = wrap_2pi(best_s);
  out.converged = false;
  return out;
}

double elevation_angle(const Vec3& v_W) {
  double hxy = std::hypot(v_W.x(), v_W.y());
  if (hxy < 1e-12 && std::abs(v_W.z()) < 1e-12) return 0.0;
  return std::atan2(v_W.z(), hxy);
}

double arc_gap(const Vec3& aircraft_W, const Vec3& target_W) {
  return elevation_angle(aircraft_W) - elevation_angle(target_W);
}

double transition_filter_step(double phi_r, const PathShape& shape,
                              double delta_phi, double dt) {
  if (delta_phi > shape.freeze_threshold) return phi_r;
  double next = phi_r + dt * shape.omega0_r * (shape.phi_set - phi_r);
  return clamp(next, shape.phi_set, shape.phi_0);
}

// ---------------------------------------------------------------------------
// Mode logic
// ---------------------------------------------------------------------------

const char* mode_name(FlightMode m) {
  switch (m) {
    case FlightMode::Traction: return "traction";
    case FlightMode::Retraction: return "retraction";
    case FlightMode::Transition: return "transition";
  }
  return "?";
}

void TetherSchedule::validate() const {
  if (!(0 < l_min && l_min < l_trigger && l_trigger < l_hard))
    throw ConfigError("guidance.lengths: need 0 < l_min < l_trigger < l_hard");
  if (!(l_initial >= l_min && l_initial <= l_trigger))
    throw ConfigError("guidance.lengths.l_initial: outside [l_min, l_trigger]");
}

bool retraction_trigger(bool at_crossing, double l_tether, double last_increment,
                        const TetherSchedule& lengths) {
  if (!at_crossing) return false;
  if (l_tether >= lengths.l_trigger) return true;
  // Early trigger: the next half eight would overshoot the hard limit.
  if (last_increment >= 0 && l_tether + last_increment > lengths.l_hard) return true;
  return false;
}

void ForceSchedule::validate() const {
  if (!(traction > 0)) throw ConfigError("guidance.force.traction_n: must be > 0");
  if (!(retraction >= 0)) throw ConfigError("guidance.force.retraction_n: must be >= 0");
  if (!(ramp_omega > 0 && mode_omega > 0))
    throw ConfigError("guidance.force.*_omega: must be > 0");
}

// ---------------------------------------------------------------------------
// Cascade
// ---------------------------------------------------------------------------

void GuidanceGains::validate() const {
  if (!(alpha_min < alpha_max)) throw ConfigError("guidance.gains.alpha band empty");
  if (!(mu_max > 0 && mu_max < kPi / 2 + 0.2))
    throw ConfigError("guidance.gains.mu_max_deg: out of range");
  if (!(v_a_floor > 0)) throw ConfigError("guidance.gains.v_a_floor: must be > 0");
}

Mat3 M_KO(double chi, double gamma) {
  double cc = std::cos(chi), sc = std::sin(chi);
  double cg = std::cos(gamma), sg = std::sin(gamma);
  Mat3 Rz, Ry;
  Rz << cc, sc, 0,
        -sc, cc, 0,
        0, 0, 1;
  Ry << cg, 0, -sg,
        0, 1, 0,
        sg, 0, cg;
  return Ry * Rz;
}

AttitudeSetpoints attitude_setpoints(double nu_chi, double nu_gamma, double chi_k,
                                     double gamma_k, double v_k, double v_a,
                                     const Vec3& p_O, double F_t_set,
                                     const AircraftParams& aircraft,
                                     const GuidanceGains& gains) {
  AttitudeSetpoints out;
  double pn = p_O.norm();
  Vec3 p_hat = pn > 1e-9 ? Vec3(p_O / pn) : Vec3(1, 0, 0);
  Vec3 f_t_K = -M_KO(chi_k, gamma_k) * p_hat * F_t_set;

  double m = aircraft.mass, g = aircraft.gravity;
  out.f_y_m = m * nu_chi * std::cos(gamma_k) * v_k - f_t_K.y();
  out.f_z_m = m * nu_gamma * v_k + std::cos(gamma_k) * m * g + f_t_K.z();

  out.mu_set = std::atan2(out.f_y_m, out.f_z_m);
  if (std::abs(out.mu_set) > gains.mu_max) {
    out.mu_set = clamp(out.mu_set, -gains.mu_max, gains.mu_max);
    out.clamped = true;
  }

  double v_eff = std::max(v_a, gains.v_a_floor);
  double qbar_S = 0.5 * aircraft.rho * v_eff * v_eff * aircraft.S_w;
  out.C_L_set = std::sqrt(out.f_y_m * out.f_y_m + out.f_z_m * out.f_z_m) / qbar_S;
  double alpha = (out.C_L_set - aircraft.C_L0) / aircraft.C_L_alpha;
  if (alpha < gains.alpha_min || alpha > gains.alpha_max) {
    alpha = clamp(alpha, gains.alpha_min, gains.alpha_max);
    out.clamped = true;
  }
  out.alpha_set = alpha;
  return out;
}

double kinematic_bank(const AircraftState& state, double chi, double gamma) {
  Mat3 M = M_KO(chi, gamma);
  Vec3 y_K_O = M.transpose() * Vec3(0, 1, 0);
  Vec3 z_K_O = M.transpose() * Vec3(0, 0, 1);
  Vec3 y_B_O = state.q_OB * Vec3(0, 1, 0);
  return std::atan2(y_B_O.dot(z_K_O), y_B_O.dot(y_K_O));
}

SurfaceDeflections cascade_step(const AircraftState& state,
                                const AircraftParams& aircraft,
                                const GuidanceGains& gains,
                                const CascadeInputs& in) {
  // Coordination feedforward: rotation of the velocity frame.
  Vec3 y_K_O = M_KO(in.chi_k, in.gamma_k).transpose() * Vec3(0, 1, 0);
  Vec3 omega_ff_O = in.nu_chi * Vec3(0, 0, 1) + in.nu_gamma * y_K_O;
  Vec3 omega_ff_B = state.q_OB.conjugate() * omega_ff_O;

  Vec3 omega_cmd = omega_ff_B;
  omega_cmd.x() += gains.k_mu * wrap_pi(in.mu_ref - in.mu_meas) + in.mu_ref_rate;
  omega_cmd.y() += gains.k_alpha * (in.alpha_ref - in.alpha_meas) + in.alpha_ref_rate;
  omega_cmd.z() += gains.k_beta * in.beta_meas;

  Vec3 omega_dot_des = gains.k_omega.cwiseProduct(omega_cmd - state.omega_B);
  Mat3 J = aircraft.inertia();
  Vec3 M_des = J * omega_dot_des + state.omega_B.cross(J * state.omega_B);

  // Aero moments at zero deflections; the surfaces supply the remainder.
  double v_eff = std::max(in.v_a, gains.v_a_floor);
  double qbar_S = 0.5 * aircraft.rho * v_eff * v_eff * aircraft.S_w;
  double p_hat = state.omega_B.x() * aircraft.b_span / (2.0 * v_eff);
  double q_hat = state.omega_B.y() * aircraft.c_chord / (2.0 * v_eff);
  double r_hat = state.omega_B.z() * aircraft.b_span / (2.0 * v_eff);
  double C_l0 = aircraft.C_l_beta * in.beta_meas + aircraft.C_l_p * p_hat +
                aircraft.C_l_r * r_hat;
  double C_m0 = aircraft.C_m0 + aircraft.C_m_alpha * in.alpha_meas +
                aircraft.C_m_q * q_hat;
  double C_n0 = aircraft.C_n_beta * in.beta_meas + aircraft.C_n_p * p_hat +
                aircraft.C_n_r * r_hat;
  Vec3 M_base = qbar_S * Vec3(aircraft.b_span * C_l0, aircraft.c_chord * C_m0,
                              aircraft.b_span * C_n0);
  Vec3 M_ctrl = M_des - M_base;

  SurfaceDeflections cmd;
  cmd.aileron_deg =
      rad2deg(M_ctrl.x() / (qbar_S * aircraft.b_span * aircraft.C_l_delta_a));
  cmd.elevator_deg =
      rad2deg(M_ctrl.y() / (qbar_S * aircraft.c_chord * aircraft.C_m_delta_e));
  cmd.rudder_deg =
      rad2deg(M_ctrl.z() / (qbar_S * aircraft.b_span * aircraft.C_n_delta_r));
  return cmd;
}

// ---------------------------------------------------------------------------
// Guidance state machine
// ---------------------------------------------------------------------------

Mat3 GuidanceConfig::R_OW() const {
  // x_W points downwind (horizontal), z_W up; O is North-East-Down.
  double psi = deg2rad(wind_toward_deg);
  Vec3 x_w(std::cos(psi), std::sin(psi), 0.0);
  Vec3 z_w(0.0, 0.0, -1.0);
  Vec3 y_w = z_w.cross(x_w);
  Mat3 R;
  R.col(0) = x_w;
  R.col(1) = y_w;
  R.col(2) = z_w;
  return R;
}

void GuidanceConfig::validate() const {
  path.validate();
  gains.validate();
  lengths.validate();
  force.validate();
  if (!(initial_speed > 0)) throw ConfigError("guidance.initial_speed_ms: must be > 0");
  if (!(avoidance.f_low > 0 && avoidance.rearm_factor >= 1.0))
    throw ConfigError("guidance.avoidance: f_low > 0 and rearm_factor >= 1 required");
}

namespace {

// Did the path parameter cross c while advancing from s0 by ds (ds can be
// slightly negative on jitter; only forward crossings count)?
bool crossed(double s0, double ds, double c) {
  if (ds <= 0) return false;
  double off = wrap_2pi(c - s0);
  return off > 0 && off <= ds;
}

}  // namespace

double path_error_preview(const GuidanceState& gs, const GuidanceConfig& cfg,
                          const PlantState& plant) {
  const Mat3 R_WO = cfg.R_OW().transpose();
  const Vec3 p_W = R_WO * plant.ac.p_O;
  if (gs.mode == FlightMode::Retraction) {
    Vec3 ab = gs.glide_b_W - gs.glide_a_W;
    double len = std::max(ab.norm(), 1.0);
    Vec3 ab_hat = ab / len;
    double along = clamp((p_W - gs.glide_a_W).dot(ab_hat), 0.0, len);
    return ((gs.glide_a_W + ab_hat * along) - p_W).norm();
  }
  const double r = std::max(p_W.norm(), 1.0);
  const Vec3 r_hat = p_W / r;
  ClosestPointResult cp = closest_point_newton(r_hat, cfg.path, gs.phi_r, gs.s_star);
  Vec3 target = path_point_W(cp.s, cfg.path, gs.phi_r);
  return std::acos(clamp(r_hat.dot(target), -1.0, 1.0)) * r;
}

GuidanceOutput guidance_step(GuidanceState& gs, const GuidanceConfig& cfg,
                             const PlantParams& plant_params,
                             const PlantState& plant, const PlantOutputs& outputs,
                             int y_hat, double dt) {
  GuidanceOutput out;
  const Mat3 R_OW = cfg.R_OW();
  const Mat3 R_WO = R_OW.transpose();

  const Vec3 p_O = plant.ac.p_O;
  const Vec3 v_O = plant.ac.v_O();
  const Vec3 p_W = R_WO * p_O;
  const Vec3 v_W = R_WO * v_O;
  const double r = std::max(p_W.norm(), 1.0);
  const Vec3 r_hat = p_W / r;
  const double v_k = std::max(v_O.norm(), 1.0);

  const double chi_k = std::atan2(v_O.y(), v_O.x());
  const double gamma_k = -std::asin(clamp(v_O.z() / v_k, -1.0, 1.0));

  // --- mode machine and desired direction -------------------------------
  FlightMode mode_before = gs.mode;
  Vec3 dir_des_W = Vec3::UnitX();
  double mode_force_target = cfg.force.traction;
  double force_omega = cfg.force.mode_omega;
  // Large set-point gaps (start of the run, re-entry into traction) are
  // shaped at the slow ramp rate; small corrections track quickly.
  if (gs.mode != FlightMode::Retraction &&
      std::abs(cfg.force.traction - gs.ft_set) > 0.1 * cfg.force.traction)
    force_omega = cfg.force.ramp_omega;

  if (gs.mode == FlightMode::Traction || gs.mode == FlightMode::Transition) {
    double s_prev = gs.s_star;
    ClosestPointResult cp =
        closest_point_newton(r_hat, cfg.path, gs.phi_r, gs.s_star);
    if (cp.fallback) gs.newton_fallback = true;
    gs.s_star = cp.s;
    Vec3 target = path_point_W(gs.s_star, cfg.path, gs.phi_r);
    double cosang = clamp(r_hat.dot(target), -1.0, 1.0);
    out.e_p = std::acos(cosang) * r;

    // Transition rotation filter with the arc-gap freeze.
    if (gs.mode == FlightMode::Transition) {
      double gap = arc_gap(p_W, target);
      gs.phi_r = transition_filter_step(gs.phi_r, cfg.path, gap, dt);
      if (gs.phi_r <= cfg.path.phi_set + deg2rad(0.5)) {
        gs.phi_r = cfg.path.phi_set;
        gs.mode = FlightMode::Traction;
        gs.cycle_complete = true;
      }
    }

    // Retraction-point crossings: track the half-eight length increment and
    // decide on retraction (suppressed during an avoidance episode).
    double ds = wrap_pi(gs.s_star - s_prev);
    bool cross_a = crossed(s_prev, ds, kPi / 2.0);
    bool cross_b = crossed(s_prev, ds, 3.0 * kPi / 2.0);
    if (cross_a || cross_b) {
      double l_T = plant.tether.l_unstretched;
      if (gs.l_at_last_cross >= 0) gs.last_increment = l_T - gs.l_at_last_cross;
      gs.l_at_last_cross = l_T;
      bool avoidance_busy = gs.avoidance_active || gs.avoidance_recovering;
      if (gs.mode == FlightMode::Traction && !avoidance_busy &&
          retraction_trigger(true, l_T, gs.last_increment, cfg.lengths)) {
        gs.mode = FlightMode::Retraction;
        gs.waypoint_s = cross_a ? kPi / 2.0 : 3.0 * kPi / 2.0;
        gs.glide_a_W = p_W;
        gs.glide_b_W =
            path_point_W(gs.waypoint_s, cfg.path, cfg.path.phi_0) * cfg.lengths.l_min;
        gs.shape_initialized = false;
      }
    }

    if (gs.mode != FlightMode::Retraction) {
      // Carrot on the path plus radial closure toward the tether sphere.
      Vec3 carrot = path_point_W(gs.s_star + cfg.gains.lookahead_s, cfg.path, gs.phi_r);
      Vec3 tan_dir = carrot - carrot.dot(r_hat) * r_hat;
      if (tan_dir.norm() < 1e-9)
        tan_dir = path_tangent_W(gs.s_star, cfg.path, gs.phi_r);
      tan_dir.normalize();

      double l_seg = plant.tether.l_unstretched / plant_params.tether.n_particles;
      double c_seg = plant_params.tether.segment_stiffness(l_seg);
      double r_target = plant.tether.l_unstretched +
                        plant_params.tether.n_particles * gs.ft_set / c_seg;
      double rdot_des = plant.winch.v + cfg.gains.k_radial * (r_target - r);
      double sg = clamp(rdot_des / v_k, cfg.gains.radial_sine_min,
                        cfg.gains.radial_sine_max);
      dir_des_W = (tan_dir * std::sqrt(1.0 - sg * sg) + r_hat * sg).normalized();
    }
  }

  if (gs.mode == FlightMode::Retraction) {
    mode_force_target = cfg.force.retraction;
    Vec3 ab = gs.glide_b_W - gs.glide_a_W;
    double len = std::max(ab.norm(), 1.0);
    Vec3 ab_hat = ab / len;
    double along = clamp((p_W - gs.glide_a_W).dot(ab_hat), 0.0, len);
    double carrot_pos = std::min(along + cfg.gains.lookahead_line_m, len);
    Vec3 target = gs.glide_a_W + ab_hat * carrot_pos;
    Vec3 d = target - p_W;
    out.e_p = ((gs.glide_a_W + ab_hat * along) - p_W).norm();
    dir_des_W = d.norm() > 1e-6 ? Vec3(d.normalized()) : ab_hat;

    // End of retraction: tether reeled to the lower bound or waypoint reached.
    if (plant.tether.l_unstretched <= cfg.lengths.l_min ||
        (p_W - gs.glide_b_W).norm() < 30.0) {
      gs.mode = FlightMode::Transition;
      gs.phi_r = cfg.path.phi_0;
      gs.s_star = gs.waypoint_s;
      gs.l_at_last_cross = -1.0;
      gs.last_increment = -1.0;
      gs.shape_initialized = false;
    }
  }

  if (gs.mode == FlightMode::Transition) {
    // The tension demand follows the path down into the power zone.
    double frac = clamp((cfg.path.phi_0 - gs.phi_r) /
                            std::max(cfg.path.phi_0 - cfg.path.phi_set, 1e-6),
                        0.0, 1.0);
    mode_force_target =
        cfg.force.retraction + frac * (cfg.force.traction - cfg.force.retraction);
    force_omega = cfg.force.mode_omega;
  }
  if (gs.mode == FlightMode::Traction) mode_force_target = cfg.force.traction;

  // --- avoidance ----------------------------------------------------------
  double f_meas = outputs.tether.tension_aircraft;
  bool in_avoidance_mode =
      gs.mode == FlightMode::Traction || gs.mode == FlightMode::Transition;
  if (cfg.avoidance.enabled && in_avoidance_mode) {
    if (y_hat == -1 && !gs.avoidance_active) {
      gs.avoidance_active = true;
      gs.avoidance_recovering = false;
      out.avoidance_triggered = true;
    }
    if (gs.avoidance_active && y_hat == 1 &&
        f_meas <= cfg.avoidance.rearm_factor * cfg.avoidance.f_low) {
      gs.avoidance_active = false;
      gs.avoidance_recovering = true;
    }
  }
  double target = mode_force_target;
  if (gs.avoidance_active) {
    target = cfg.avoidance.f_low;
    force_omega = cfg.avoidance.omega;
  } else if (gs.avoidance_recovering) {
    force_omega = cfg.avoidance.omega;
  }
  gs.ft_set += dt * force_omega * (target - gs.ft_set);
  if (gs.avoidance_recovering &&
      gs.ft_set >= cfg.avoidance.complete_fraction * cfg.force.traction) {
    gs.avoidance_recovering = false;
    out.avoidance_completed = true;
  }

  // --- desired course / flight path angle ---------------------------------
  Vec3 dir_des_O = R_OW * dir_des_W;
  double chi_des = std::atan2(dir_des_O.y(), dir_des_O.x());
  double gamma_des = -std::asin(clamp(dir_des_O.z(), -1.0, 1.0));

  bool shaping = gs.mode == FlightMode::Retraction ||
                 (gs.mode == FlightMode::Transition &&
                  gs.mode_time < cfg.gains.transition_blend_s);
  if (shaping) {
    // Command shaping into the glide and out of it.
    if (!gs.shape_initialized) {
      gs.chi_shaped = chi_k;
      gs.gamma_shaped = gamma_k;
      gs.shape_initialized = true;
    }
    gs.chi_shaped += dt * cfg.gains.shape_omega * wrap_pi(chi_des - gs.chi_shaped);
    gs.chi_shaped = wrap_pi(gs.chi_shaped);
    gs.gamma_shaped += dt * cfg.gains.shape_omega * (gamma_des - gs.gamma_shaped);
    chi_des = gs.chi_shaped;
    gamma_des = gs.gamma_shaped;
  } else {
    gs.shape_initialized = false;
  }

  double nu_chi = clamp(cfg.gains.k_chi * wrap_pi(chi_des - chi_k),
                        -cfg.gains.nu_chi_max, cfg.gains.nu_chi_max);
  double nu_gamma = clamp(cfg.gains.k_gamma * (gamma_des - gamma_k),
                          -cfg.gains.nu_gamma_max, cfg.gains.nu_gamma_max);

  // --- attitude set points and cascade ------------------------------------
  double v_a = outputs.aero.v_a;
  AttitudeSetpoints asp =
      attitude_setpoints(nu_chi, nu_gamma, chi_k, gamma_k, v_k, v_a, p_O,
                         gs.ft_set, plant_params.aircraft, cfg.gains);
  if (gs.mode == FlightMode::Transition) {
    // Lift clamp fades from the protective transition value at phi_0 to the
    // full traction band as the path rotates down.
    double frac = (cfg.path.phi_0 - gs.phi_r) /
                  std::max(cfg.path.phi_0 - cfg.path.phi_set, 1e-6);
    double cap = cfg.gains.alpha_max_transition +
                 clamp(frac, 0.0, 1.0) *
                     (cfg.gains.alpha_max - cfg.gains.alpha_max_transition);
    if (asp.alpha_set > cap) {
      asp.alpha_set = cap;
      asp.clamped = true;
    }
  }

  double mu_ref_rate = cfg.gains.omega_ref_mu * wrap_pi(asp.mu_set - gs.mu_ref);
  double alpha_ref_rate = cfg.gains.omega_ref_alpha * (asp.alpha_set - gs.alpha_ref);
  gs.mu_ref = wrap_pi(gs.mu_ref + dt * mu_ref_rate);
  gs.alpha_ref += dt * alpha_ref_rate;

  CascadeInputs ci;
  ci.nu_chi = nu_chi;
  ci.nu_gamma = nu_gamma;
  ci.chi_k = chi_k;
  ci.gamma_k = gamma_k;
  ci.mu_ref = gs.mu_ref;
  ci.mu_ref_rate = mu_ref_rate;
  ci.alpha_ref = gs.alpha_ref;
  ci.alpha_ref_rate = alpha_ref_rate;
  ci.mu_meas = kinematic_bank(plant.ac, chi_k, gamma_k);
  ci.alpha_meas = outputs.aero.alpha;
  ci.beta_meas = outputs.aero.beta;
  ci.v_a = v_a;
  out.commands_deg = cascade_step(plant.ac, plant_params.aircraft, cfg.gains, ci);

  out.F_t_set = gs.ft_set;
  out.nu_chi = nu_chi;
  out.nu_gamma = nu_gamma;
  out.chi_k = chi_k;
  out.gamma_k = gamma_k;
  out.mu_set = asp.mu_set;
  out.alpha_set = asp.alpha_set;
  out.mu_meas = ci.mu_meas;
  out.saturated = asp.clamped;
  out.mode = gs.mode;
  out.mode_changed = gs.mode != mode_before;
  gs.mode_time = out.mode_changed ? 0.0 : gs.mode_time + dt;
  return out;
}

}  // namespace awekit
