#include "closedloop.hpp"

#include <cmath>

namespace awekit {

double evaluate_limit(const RunLog& log, const LimitFunction& lf) {
  if (log.rows() == 0) throw std::runtime_error("evaluate_limit: empty run log");
  if (lf.name != "tether_force_max")
    throw std::runtime_error("evaluate_limit: unknown limit function " + lf.name);
  if (log.outcome == RunOutcome::Invalid) return lf.g_star + lf.invalid_penalty;
  int c = log.column_index("F_t");
  double g = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < log.rows(); ++r) g = std::max(g, log.at(r, c));
  return g;
}

double average_cycle_power(const RunLog& log) {
  if (log.outcome != RunOutcome::Completed)
    throw std::runtime_error("average_cycle_power: run did not complete");
  if (log.rows() == 0) throw std::runtime_error("average_cycle_power: empty log");
  int c = log.column_index("power_w");
  double sum = 0;
  for (std::size_t r = 0; r < log.rows(); ++r) sum += log.at(r, c);
  return sum / log.rows() / 1000.0;
}

namespace {

Mat3 rot_x(double a) {
  double c = std::cos(a), s = std::sin(a);
  Mat3 R;
  R << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return R;
}

Mat3 rot_y(double a) {
  double c = std::cos(a), s = std::sin(a);
  Mat3 R;
  R << c, 0, s,
       0, 1, 0,
       -s, 0, c;
  return R;
}

}  // namespace

TrimResult trim_on_path(const CampaignConfig& config) {
  const GuidanceConfig& g = config.guidance;
  const PlantParams& pp = config.plant;
  const Mat3 R_OW = g.R_OW();

  const int n = pp.tether.n_particles;
  const double l0 = g.lengths.l_initial;
  const double l_seg = l0 / n;
  const double c_seg = pp.tether.segment_stiffness(l_seg);
  const double r0 = l0 + n * g.force.traction / c_seg;

  const double s0 = 0.0;
  Vec3 p_hat_W = path_point_W(s0, g.path, g.path.phi_set);
  Vec3 p_O = R_OW * (p_hat_W * r0);

  Vec3 tan_W = path_tangent_W(s0, g.path, g.path.phi_set).normalized();
  Vec3 v_O = R_OW * (tan_W * g.initial_speed);

  // Course rate implied by the path curvature, used for the trim attitude and
  // the initial body rates.
  double tan_norm = path_tangent_W(s0, g.path, g.path.phi_set).norm();
  double s_rate = g.initial_speed / (r0 * tan_norm);
  double ds = 1e-3;
  Vec3 tan2_W = path_tangent_W(s0 + ds, g.path, g.path.phi_set).normalized();
  Vec3 t1 = R_OW * tan_W, t2 = R_OW * tan2_W;
  double chi1 = std::atan2(t1.y(), t1.x());
  double chi2 = std::atan2(t2.y(), t2.x());
  double nu_chi0 = wrap_pi(chi2 - chi1) / ds * s_rate;
  double gamma1 = -std::asin(clamp(t1.z(), -1.0, 1.0));
  double gamma2 = -std::asin(clamp(t2.z(), -1.0, 1.0));
  double nu_gamma0 = (gamma2 - gamma1) / ds * s_rate;

  double chi_k = std::atan2(v_O.y(), v_O.x());
  double gamma_k = -std::asin(clamp(v_O.z() / v_O.norm(), -1.0, 1.0));

  // Air-relative frame for the attitude so the initial angle of attack matches
  // the inversion solution exactly.
  Vec3 wind_O = R_OW * Vec3(shear_speed(config.shear, -p_O.z()), 0, 0);
  Vec3 v_air_O = v_O - wind_O;
  double v_a0 = v_air_O.norm();
  double chi_a = std::atan2(v_air_O.y(), v_air_O.x());
  double gamma_a = -std::asin(clamp(v_air_O.z() / v_a0, -1.0, 1.0));

  AttitudeSetpoints asp =
      attitude_setpoints(nu_chi0, nu_gamma0, chi_k, gamma_k, v_O.norm(), v_a0, p_O,
                         g.force.traction, pp.aircraft, g.gains);

  Mat3 R_OB = M_KO(chi_a, gamma_a).transpose() * rot_x(asp.mu_set) * rot_y(asp.alpha_set);

  TrimResult out;
  out.plant.ac.p_O = p_O;
  out.plant.ac.q_OB = Quat(R_OB);
  out.plant.ac.q_OB.normalize();
  out.plant.ac.v_B = out.plant.ac.q_OB.conjugate() * v_O;
  out.plant.ac.omega_B = out.plant.ac.q_OB.conjugate() * Vec3(0, 0, nu_chi0);

  double q_hat = out.plant.ac.omega_B.y() * pp.aircraft.c_chord / (2.0 * std::max(v_a0, 1.0));
  double delta_e0 = -(pp.aircraft.C_m0 + pp.aircraft.C_m_alpha * asp.alpha_set +
                      pp.aircraft.C_m_q * q_hat) /
                    pp.aircraft.C_m_delta_e;
  out.plant.act.pos.elevator_deg =
      clamp(rad2deg(delta_e0), -pp.actuators.elevator_limit_deg,
            pp.actuators.elevator_limit_deg);

  out.plant.tether.node_pos.resize(n);
  out.plant.tether.node_vel.resize(n);
  for (int i = 0; i < n; ++i) {
    double f = static_cast<double>(i + 1) / n;
    out.plant.tether.node_pos[i] = p_O * f;
    out.plant.tether.node_vel[i] = v_O * f;
  }
  out.plant.tether.l_unstretched = l0;
  out.plant.winch.v = 0;

  out.guidance.mode = FlightMode::Traction;
  out.guidance.s_star = s0;
  out.guidance.phi_r = g.path.phi_set;
  // The set point ramps in over the first loop; the trim stretch matches it.
  out.guidance.ft_set = 0.6 * g.force.traction;
  out.guidance.mu_ref = asp.mu_set;
  out.guidance.alpha_ref = asp.alpha_set;
  return out;
}

RunLog run_pumping_cycle(const NoiseSeedVector& theta, const CampaignConfig& config,
                         InloopPredictor* predictor) {
  config.validate();
  theta.validate();
  int expected = noise_dimension(config.sim.t_sim, config.sim.f_s, theta.channels);
  if (static_cast<int>(theta.samples.size()) != expected)
    throw ConfigError("noise seed vector length does not match t_sim and f_s");
  if (theta.f_s != config.sim.f_s)
    throw ConfigError("noise seed vector sample rate does not match config");

  WindField wind(config.shear, config.dryden, theta);
  const Mat3 R_OW = config.guidance.R_OW();
  const double dt_tick = 1.0 / config.sim.f_s;
  const double dt_int = 1.0 / config.sim.f_int;
  const int substeps = config.sim.steps_per_tick();
  const int ticks = static_cast<int>(std::round(config.sim.t_sim * config.sim.f_s));
  const LimitFunction lf = LimitFunction::from_config(config.limit);

  TrimResult trim = trim_on_path(config);
  PlantState plant = trim.plant;
  GuidanceState gs = trim.guidance;
  if (predictor) predictor->reset();

  RunLog log;
  log.columns = runlog_columns();
  log.f_s = config.sim.f_s;
  log.config_hash = config.hash();
  log.outcome = RunOutcome::Completed;
  log.add_event(0.0, "mode", mode_name(gs.mode));

  PlantInputs inputs;
  FlightMode last_mode = gs.mode;

  for (int k = 0; k <= ticks; ++k) {
    const double t = k * dt_tick;
    const Vec3 gust_W = wind.gust_at_step(std::min(k, wind.steps() - 1));
    inputs.wind_O = [&](const Vec3& p) {
      return R_OW * wind_at(wind.shear(), gust_W, -p.z());
    };

    PlantOutputs outputs = evaluate_plant(plant, config.plant, inputs);

    // Signals at the aircraft.
    Vec3 v_w_W = wind_at(wind.shear(), gust_W, plant.ac.altitude());
    double pn = plant.ac.p_O.norm();
    Vec3 p_hat_O = pn > 1e-9 ? Vec3(plant.ac.p_O / pn) : Vec3(1, 0, 0);
    double a_z_tau = outputs.accel_O.dot(-p_hat_O);

    SignalSample sample;
    sample.t = t;
    sample.v_w_x_W = v_w_W.x();
    sample.v_w_y_W = v_w_W.y();
    sample.v_w_z_W = v_w_W.z();
    sample.a_z_tau = a_z_tau;
    sample.F_t = outputs.tether.tension_aircraft;
    sample.alpha = outputs.aero.alpha;
    sample.e_p = path_error_preview(gs, config.guidance, plant);

    int y_hat = predictor ? predictor->predict(sample) : 1;
    GuidanceOutput gout = guidance_step(gs, config.guidance, config.plant, plant,
                                        outputs, y_hat, dt_tick);

    // Log row.
    Vec3 v_O = plant.ac.v_O();
    std::vector<double> row = {
        t,
        static_cast<double>(static_cast<int>(gout.mode)),
        sample.v_w_x_W,
        sample.v_w_y_W,
        sample.v_w_z_W,
        sample.a_z_tau,
        sample.F_t,
        sample.alpha,
        sample.e_p,
        outputs.aero.beta,
        outputs.aero.v_a,
        plant.ac.p_O.x(),
        plant.ac.p_O.y(),
        plant.ac.p_O.z(),
        v_O.x(),
        v_O.y(),
        v_O.z(),
        plant.act.pos.aileron_deg,
        plant.act.pos.elevator_deg,
        plant.act.pos.rudder_deg,
        plant.winch.v,
        plant.winch.accel,
        outputs.tether.tension_ground,
        gout.F_t_set,
        plant.tether.l_unstretched,
        gs.s_star,
        rad2deg(gs.phi_r),
        rad2deg(gout.mu_meas),
        outputs.tether.tension_ground * plant.winch.v,
        static_cast<double>(y_hat)};
    log.append_row(row);

    // Events and terminal conditions.
    if (gout.mode != last_mode) {
      log.add_event(t, "mode", mode_name(gout.mode));
      last_mode = gout.mode;
    }
    if (gout.avoidance_triggered) log.add_event(t, "avoidance_trigger");
    if (gout.avoidance_completed) log.add_event(t, "avoidance_complete");

    if (sample.F_t > lf.g_star) {
      log.add_event(t, "rupture");
      log.outcome = RunOutcome::Rupture;
      break;
    }
    if (plant.numerical_failure) {
      log.add_event(t, "numerical_failure");
      log.outcome = RunOutcome::Invalid;
      break;
    }
    if (plant.degenerate_airflow) {
      log.add_event(t, "degenerate_airflow");
      log.outcome = RunOutcome::Invalid;
      break;
    }
    if (gs.cycle_complete) {
      log.add_event(t, "cycle_complete");
      log.outcome = RunOutcome::Completed;
      break;
    }
    if (k == ticks) break;

    inputs.commands_deg = gout.commands_deg;
    inputs.F_t_set = gout.F_t_set;
    for (int i = 0; i < substeps; ++i)
      plant = integrate_step(plant, config.plant, inputs, dt_int);
  }
  return log;
}

SimulateResult simulate_limit(const VecX& theta, const CampaignConfig& config,
                              InloopPredictor* predictor) {
  NoiseSeedVector nsv;
  nsv.samples = theta;
  nsv.channels = 3;
  nsv.f_s = config.sim.f_s;
  SimulateResult out;
  RunLog log = run_pumping_cycle(nsv, config, predictor);
  out.outcome = log.outcome;
  out.valid = log.outcome != RunOutcome::Invalid;
  out.g = evaluate_limit(log, LimitFunction::from_config(config.limit));
  return out;
}

}  // namespace awekit
