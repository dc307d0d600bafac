#include "config.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace awekit {

using nlohmann::json;

void SimParams::validate() const {
  if (!(t_sim > 0)) throw ConfigError("sim.t_sim_s: must be > 0");
  if (!(f_int > 0 && f_s > 0)) throw ConfigError("sim.f_*: rates must be > 0");
  double ratio = f_int / f_s;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1)
    throw ConfigError("sim.f_int_hz: must be an integer multiple of f_s_hz");
}

void LimitParams::validate() const {
  if (name != "tether_force_max" && name != "benchmark_linear")
    throw ConfigError("limit.name: unknown limit function '" + name + "'");
  if (!std::isfinite(g_star)) throw ConfigError("limit.g_star: must be finite");
  if (!(invalid_penalty >= 0)) throw ConfigError("limit.invalid_penalty: must be >= 0");
}

void SubsimParams::validate() const {
  if (!(p0 > 0 && p0 < 1)) throw ConfigError("subsim.p0: must be in (0, 1)");
  if (n_samples <= 0) throw ConfigError("subsim.n_samples: must be > 0");
  double k = n_samples * p0;
  if (std::abs(k - std::round(k)) > 1e-9 || k < 1)
    throw ConfigError("subsim.n_samples * p0 must be a positive integer");
  if (max_levels < 1) throw ConfigError("subsim.max_levels: must be >= 1");
  if (!(proposal_scale > 0)) throw ConfigError("subsim.proposal_scale: must be > 0");
  if (!(scale_min > 0 && scale_min <= scale_max))
    throw ConfigError("subsim.scale_min/max: need 0 < min <= max");
  if (!(accept_target > 0 && accept_target < 1))
    throw ConfigError("subsim.accept_target: must be in (0, 1)");
}

void SegmentationParams::validate() const {
  if (!(window_s > 0)) throw ConfigError("segmentation.window_s: must be > 0");
  if (!(stride_s > 0 && stride_s <= window_s))
    throw ConfigError("segmentation.stride_s: need 0 < stride <= window");
  if (!(reaction_s >= 0)) throw ConfigError("segmentation.reaction_s: must be >= 0");
  if (signals.empty()) throw ConfigError("segmentation.signals: must not be empty");
}

void TrainingParams::validate() const {
  if (smote_k < 1) throw ConfigError("training.smote_k: must be >= 1");
  if (!(smote_ratio > 0 && smote_ratio <= 1.0))
    throw ConfigError("training.smote_ratio: must be in (0, 1]");
  if (folds < 2) throw ConfigError("training.folds: must be >= 2");
  if (sigma2_rel.empty() || c_grid.empty())
    throw ConfigError("training.sigma2_rel/c_grid: must not be empty");
  for (double v : sigma2_rel)
    if (!(v > 0)) throw ConfigError("training.sigma2_rel: entries must be > 0");
  for (double v : c_grid)
    if (!(v > 0)) throw ConfigError("training.c_grid: entries must be > 0");
  if (!(kkt_tol > 0)) throw ConfigError("training.kkt_tol: must be > 0");
  if (!(holdout_fraction > 0 && holdout_fraction < 1))
    throw ConfigError("training.holdout_fraction: must be in (0, 1)");
  if (!(stop_rel_improvement >= 0))
    throw ConfigError("training.stop_rel_improvement: must be >= 0");
}

void LossParams::validate() const {
  if (!(p_em_kw >= 0 && p_pc_kw > 0 && t_pc_min > 0))
    throw ConfigError("loss: powers must be >= 0 and t_pc > 0");
  if (!(e_misc_kwh >= 0)) throw ConfigError("loss.e_misc_kwh: must be >= 0");
  if (downtime_min_grid.empty())
    throw ConfigError("loss.downtime_min_grid: must not be empty");
  for (double v : downtime_min_grid)
    if (!(v >= 0)) throw ConfigError("loss.downtime_min_grid: entries must be >= 0");
}

void CampaignConfig::validate() const {
  if (schema_version != 1) throw ConfigError("schema_version: expected 1");
  if (output_dir.empty()) throw ConfigError("output_dir: must not be empty");
  if (simulate_runs < 1) throw ConfigError("simulate_runs: must be >= 1");
  sim.validate();
  shear.validate();
  dryden.validate();
  plant.validate();
  guidance.validate();
  limit.validate();
  subsim.validate();
  segmentation.validate();
  training.validate();
  loss.validate();
}

// ---------------------------------------------------------------------------
// JSON plumbing
// ---------------------------------------------------------------------------

namespace {

void expect_keys(const json& j, const std::string& section,
                 const std::set<std::string>& allowed) {
  if (!j.is_object())
    throw ConfigError(section + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError(section + "." + it.key() + ": unknown field");
  }
}

template <typename T>
void read(const json& j, const std::string& section, const char* key, T& v) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(v);
  } catch (const json::exception& e) {
    throw ConfigError(section + "." + key + ": " + e.what());
  }
}

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

void read_vec3(const json& j, const std::string& section, const char* key, Vec3& v) {
  if (!j.contains(key)) return;
  const json& a = j.at(key);
  if (!a.is_array() || a.size() != 3)
    throw ConfigError(section + "." + key + ": expected an array of 3 numbers");
  v = Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
}

}  // namespace

json CampaignConfig::to_json() const {
  json j;
  j["schema_version"] = schema_version;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["simulate_runs"] = simulate_runs;

  j["sim"] = {{"t_sim_s", sim.t_sim}, {"f_int_hz", sim.f_int}, {"f_s_hz", sim.f_s}};

  j["wind"] = {
      {"shear",
       {{"v_ref_ms", shear.v_ref},
        {"z_ref_m", shear.z_ref},
        {"exponent", shear.exponent},
        {"z_floor_m", shear.z_floor}}},
      {"dryden",
       {{"transit_speed_ms", dryden.transit_speed},
        {"L_u_m", dryden.L_u},
        {"L_v_m", dryden.L_v},
        {"L_w_m", dryden.L_w},
        {"sigma_u_ms", dryden.sigma_u},
        {"sigma_v_ms", dryden.sigma_v},
        {"sigma_w_ms", dryden.sigma_w}}}};

  const AircraftParams& a = plant.aircraft;
  j["aircraft"] = {{"mass_kg", a.mass},
                   {"wing_area_m2", a.S_w},
                   {"span_m", a.b_span},
                   {"chord_m", a.c_chord},
                   {"air_density_kgm3", a.rho},
                   {"gravity_ms2", a.gravity},
                   {"inertia_diag_kgm2", vec3_to_json(a.J_diag)},
                   {"C_L0", a.C_L0},
                   {"C_L_alpha", a.C_L_alpha},
                   {"C_D0", a.C_D0},
                   {"k_induced", a.k_induced},
                   {"C_Y_beta", a.C_Y_beta},
                   {"C_m0", a.C_m0},
                   {"C_m_alpha", a.C_m_alpha},
                   {"C_m_q", a.C_m_q},
                   {"C_m_delta_e", a.C_m_delta_e},
                   {"C_l_beta", a.C_l_beta},
                   {"C_l_p", a.C_l_p},
                   {"C_l_r", a.C_l_r},
                   {"C_l_delta_a", a.C_l_delta_a},
                   {"C_n_beta", a.C_n_beta},
                   {"C_n_p", a.C_n_p},
                   {"C_n_r", a.C_n_r},
                   {"C_n_delta_r", a.C_n_delta_r},
                   {"v_a_min_ms", a.v_a_min}};

  const ActuatorParams& act = plant.actuators;
  j["actuators"] = {{"bandwidth_rads", act.bandwidth},
                    {"aileron_limit_deg", act.aileron_limit_deg},
                    {"elevator_limit_deg", act.elevator_limit_deg},
                    {"rudder_limit_deg", act.rudder_limit_deg},
                    {"rate_limit_deg_s", act.rate_limit_deg_s}};

  const TetherParams& t = plant.tether;
  j["tether"] = {{"particles", t.n_particles},
                 {"mass_density_kgpm", t.rho_t},
                 {"diameter_m", t.diameter},
                 {"drag_coefficient", t.c_d},
                 {"stiffness_npm", t.stiffness},
                 {"damping_nspm", t.damping},
                 {"stiffness_ref_length_m", t.stiffness_ref_length},
                 {"air_density_kgm3", t.rho_air},
                 {"gravity_ms2", t.gravity}};

  const WinchParams& w = plant.winch;
  j["winch"] = {{"inertia_kgm2", w.inertia},
                {"friction", w.friction},
                {"accel_min_ms2", w.a_min},
                {"accel_max_ms2", w.a_max},
                {"speed_min_ms", w.v_min},
                {"speed_max_ms", w.v_max},
                {"drum_radius_m", w.drum_radius},
                {"kp", w.kp},
                {"ki", w.ki}};

  const GuidanceConfig& g = guidance;
  j["guidance"] = {
      {"path",
       {{"a_rad", g.path.a},
        {"b_rad", g.path.b},
        {"phi_set_deg", rad2deg(g.path.phi_set)},
        {"phi_0_deg", rad2deg(g.path.phi_0)},
        {"omega0_r", g.path.omega0_r},
        {"freeze_deg", rad2deg(g.path.freeze_threshold)}}},
      {"lengths",
       {{"l_initial_m", g.lengths.l_initial},
        {"l_min_m", g.lengths.l_min},
        {"l_trigger_m", g.lengths.l_trigger},
        {"l_hard_m", g.lengths.l_hard}}},
      {"force",
       {{"traction_n", g.force.traction},
        {"retraction_n", g.force.retraction},
        {"ramp_omega", g.force.ramp_omega},
        {"mode_omega", g.force.mode_omega}}},
      {"avoidance",
       {{"enabled", g.avoidance.enabled},
        {"f_low_n", g.avoidance.f_low},
        {"rearm_factor", g.avoidance.rearm_factor},
        {"complete_fraction", g.avoidance.complete_fraction},
        {"omega", g.avoidance.omega}}},
      {"gains",
       {{"lookahead_s", g.gains.lookahead_s},
        {"lookahead_line_m", g.gains.lookahead_line_m},
        {"k_chi", g.gains.k_chi},
        {"k_gamma", g.gains.k_gamma},
        {"nu_chi_max", g.gains.nu_chi_max},
        {"nu_gamma_max", g.gains.nu_gamma_max},
        {"k_radial", g.gains.k_radial},
        {"radial_sine_max", g.gains.radial_sine_max},
        {"radial_sine_min", g.gains.radial_sine_min},
        {"omega_ref_mu", g.gains.omega_ref_mu},
        {"omega_ref_alpha", g.gains.omega_ref_alpha},
        {"k_mu", g.gains.k_mu},
        {"k_alpha", g.gains.k_alpha},
        {"k_beta", g.gains.k_beta},
        {"k_omega", vec3_to_json(g.gains.k_omega)},
        {"alpha_min_deg", rad2deg(g.gains.alpha_min)},
        {"alpha_max_transition_deg", rad2deg(g.gains.alpha_max_transition)},
        {"alpha_max_deg", rad2deg(g.gains.alpha_max)},
        {"mu_max_deg", rad2deg(g.gains.mu_max)},
        {"v_a_floor_ms", g.gains.v_a_floor},
        {"shape_omega", g.gains.shape_omega},
        {"transition_blend_s", g.gains.transition_blend_s}}},
      {"initial_speed_ms", g.initial_speed},
      {"wind_toward_deg", g.wind_toward_deg}};

  j["limit"] = {{"name", limit.name},
                {"g_star", limit.g_star},
                {"invalid_penalty", limit.invalid_penalty}};

  j["subsim"] = {{"n_samples", subsim.n_samples},
                 {"p0", subsim.p0},
                 {"max_levels", subsim.max_levels},
                 {"proposal_scale", subsim.proposal_scale},
                 {"accept_target", subsim.accept_target},
                 {"scale_min", subsim.scale_min},
                 {"scale_max", subsim.scale_max}};

  j["segmentation"] = {{"window_s", segmentation.window_s},
                       {"stride_s", segmentation.stride_s},
                       {"reaction_s", segmentation.reaction_s},
                       {"signals", segmentation.signals}};

  j["training"] = {{"smote_k", training.smote_k},
                   {"smote_ratio", training.smote_ratio},
                   {"folds", training.folds},
                   {"sigma2_rel", training.sigma2_rel},
                   {"c_grid", training.c_grid},
                   {"kkt_tol", training.kkt_tol},
                   {"max_iterations", training.max_iterations},
                   {"holdout_fraction", training.holdout_fraction},
                   {"stop_rel_improvement", training.stop_rel_improvement}};

  j["loss"] = {{"p_em_kw", loss.p_em_kw},
               {"p_pc_kw", loss.p_pc_kw},
               {"t_pc_min", loss.t_pc_min},
               {"e_misc_kwh", loss.e_misc_kwh},
               {"downtime_min_grid", loss.downtime_min_grid}};

  return j;
}

CampaignConfig CampaignConfig::from_json(const json& j) {
  CampaignConfig c;
  expect_keys(j, "config",
              {"schema_version", "seed", "output_dir", "simulate_runs", "sim",
               "wind", "aircraft", "actuators", "tether", "winch", "guidance",
               "limit", "subsim", "segmentation", "training", "loss"});
  read(j, "config", "schema_version", c.schema_version);
  read(j, "config", "seed", c.seed);
  read(j, "config", "output_dir", c.output_dir);
  read(j, "config", "simulate_runs", c.simulate_runs);

  if (j.contains("sim")) {
    const json& s = j.at("sim");
    expect_keys(s, "sim", {"t_sim_s", "f_int_hz", "f_s_hz"});
    read(s, "sim", "t_sim_s", c.sim.t_sim);
    read(s, "sim", "f_int_hz", c.sim.f_int);
    read(s, "sim", "f_s_hz", c.sim.f_s);
  }

  if (j.contains("wind")) {
    const json& w = j.at("wind");
    expect_keys(w, "wind", {"shear", "dryden"});
    if (w.contains("shear")) {
      const json& s = w.at("shear");
      expect_keys(s, "wind.shear", {"v_ref_ms", "z_ref_m", "exponent", "z_floor_m"});
      read(s, "wind.shear", "v_ref_ms", c.shear.v_ref);
      read(s, "wind.shear", "z_ref_m", c.shear.z_ref);
      read(s, "wind.shear", "exponent", c.shear.exponent);
      read(s, "wind.shear", "z_floor_m", c.shear.z_floor);
    }
    if (w.contains("dryden")) {
      const json& d = w.at("dryden");
      expect_keys(d, "wind.dryden",
                  {"transit_speed_ms", "L_u_m", "L_v_m", "L_w_m", "sigma_u_ms",
                   "sigma_v_ms", "sigma_w_ms"});
      read(d, "wind.dryden", "transit_speed_ms", c.dryden.transit_speed);
      read(d, "wind.dryden", "L_u_m", c.dryden.L_u);
      read(d, "wind.dryden", "L_v_m", c.dryden.L_v);
      read(d, "wind.dryden", "L_w_m", c.dryden.L_w);
      read(d, "wind.dryden", "sigma_u_ms", c.dryden.sigma_u);
      read(d, "wind.dryden", "sigma_v_ms", c.dryden.sigma_v);
      read(d, "wind.dryden", "sigma_w_ms", c.dryden.sigma_w);
    }
  }

  if (j.contains("aircraft")) {
    const json& a = j.at("aircraft");
    AircraftParams& p = c.plant.aircraft;
    expect_keys(a, "aircraft",
                {"mass_kg", "wing_area_m2", "span_m", "chord_m", "air_density_kgm3",
                 "gravity_ms2", "inertia_diag_kgm2", "C_L0", "C_L_alpha", "C_D0",
                 "k_induced", "C_Y_beta", "C_m0", "C_m_alpha", "C_m_q",
                 "C_m_delta_e", "C_l_beta", "C_l_p", "C_l_r", "C_l_delta_a",
                 "C_n_beta", "C_n_p", "C_n_r", "C_n_delta_r", "v_a_min_ms"});
    read(a, "aircraft", "mass_kg", p.mass);
    read(a, "aircraft", "wing_area_m2", p.S_w);
    read(a, "aircraft", "span_m", p.b_span);
    read(a, "aircraft", "chord_m", p.c_chord);
    read(a, "aircraft", "air_density_kgm3", p.rho);
    read(a, "aircraft", "gravity_ms2", p.gravity);
    read_vec3(a, "aircraft", "inertia_diag_kgm2", p.J_diag);
    read(a, "aircraft", "C_L0", p.C_L0);
    read(a, "aircraft", "C_L_alpha", p.C_L_alpha);
    read(a, "aircraft", "C_D0", p.C_D0);
    read(a, "aircraft", "k_induced", p.k_induced);
    read(a, "aircraft", "C_Y_beta", p.C_Y_beta);
    read(a, "aircraft", "C_m0", p.C_m0);
    read(a, "aircraft", "C_m_alpha", p.C_m_alpha);
    read(a, "aircraft", "C_m_q", p.C_m_q);
    read(a, "aircraft", "C_m_delta_e", p.C_m_delta_e);
    read(a, "aircraft", "C_l_beta", p.C_l_beta);
    read(a, "aircraft", "C_l_p", p.C_l_p);
    read(a, "aircraft", "C_l_r", p.C_l_r);
    read(a, "aircraft", "C_l_delta_a", p.C_l_delta_a);
    read(a, "aircraft", "C_n_beta", p.C_n_beta);
    read(a, "aircraft", "C_n_p", p.C_n_p);
    read(a, "aircraft", "C_n_r", p.C_n_r);
    read(a, "aircraft", "C_n_delta_r", p.C_n_delta_r);
    read(a, "aircraft", "v_a_min_ms", p.v_a_min);
  }

  if (j.contains("actuators")) {
    const json& a = j.at("actuators");
    ActuatorParams& p = c.plant.actuators;
    expect_keys(a, "actuators",
                {"bandwidth_rads", "aileron_limit_deg", "elevator_limit_deg",
                 "rudder_limit_deg", "rate_limit_deg_s"});
    read(a, "actuators", "bandwidth_rads", p.bandwidth);
    read(a, "actuators", "aileron_limit_deg", p.aileron_limit_deg);
    read(a, "actuators", "elevator_limit_deg", p.elevator_limit_deg);
    read(a, "actuators", "rudder_limit_deg", p.rudder_limit_deg);
    read(a, "actuators", "rate_limit_deg_s", p.rate_limit_deg_s);
  }

  if (j.contains("tether")) {
    const json& t = j.at("tether");
    TetherParams& p = c.plant.tether;
    expect_keys(t, "tether",
                {"particles", "mass_density_kgpm", "diameter_m", "drag_coefficient",
                 "stiffness_npm", "damping_nspm", "stiffness_ref_length_m",
                 "air_density_kgm3", "gravity_ms2"});
    read(t, "tether", "particles", p.n_particles);
    read(t, "tether", "mass_density_kgpm", p.rho_t);
    read(t, "tether", "diameter_m", p.diameter);
    read(t, "tether", "drag_coefficient", p.c_d);
    read(t, "tether", "stiffness_npm", p.stiffness);
    read(t, "tether", "damping_nspm", p.damping);
    read(t, "tether", "stiffness_ref_length_m", p.stiffness_ref_length);
    read(t, "tether", "air_density_kgm3", p.rho_air);
    read(t, "tether", "gravity_ms2", p.gravity);
  }

  if (j.contains("winch")) {
    const json& w = j.at("winch");
    WinchParams& p = c.plant.winch;
    expect_keys(w, "winch",
                {"inertia_kgm2", "friction", "accel_min_ms2", "accel_max_ms2",
                 "speed_min_ms", "speed_max_ms", "drum_radius_m", "kp", "ki"});
    read(w, "winch", "inertia_kgm2", p.inertia);
    read(w, "winch", "friction", p.friction);
    read(w, "winch", "accel_min_ms2", p.a_min);
    read(w, "winch", "accel_max_ms2", p.a_max);
    read(w, "winch", "speed_min_ms", p.v_min);
    read(w, "winch", "speed_max_ms", p.v_max);
    read(w, "winch", "drum_radius_m", p.drum_radius);
    read(w, "winch", "kp", p.kp);
    read(w, "winch", "ki", p.ki);
  }

  if (j.contains("guidance")) {
    const json& g = j.at("guidance");
    GuidanceConfig& gc = c.guidance;
    expect_keys(g, "guidance",
                {"path", "lengths", "force", "avoidance", "gains",
                 "initial_speed_ms", "wind_toward_deg"});
    if (g.contains("path")) {
      const json& p = g.at("path");
      expect_keys(p, "guidance.path",
                  {"a_rad", "b_rad", "phi_set_deg", "phi_0_deg", "omega0_r",
                   "freeze_deg"});
      read(p, "guidance.path", "a_rad", gc.path.a);
      read(p, "guidance.path", "b_rad", gc.path.b);
      double phi_set_deg = rad2deg(gc.path.phi_set);
      double phi_0_deg = rad2deg(gc.path.phi_0);
      double freeze_deg = rad2deg(gc.path.freeze_threshold);
      read(p, "guidance.path", "phi_set_deg", phi_set_deg);
      read(p, "guidance.path", "phi_0_deg", phi_0_deg);
      read(p, "guidance.path", "freeze_deg", freeze_deg);
      read(p, "guidance.path", "omega0_r", gc.path.omega0_r);
      gc.path.phi_set = deg2rad(phi_set_deg);
      gc.path.phi_0 = deg2rad(phi_0_deg);
      gc.path.freeze_threshold = deg2rad(freeze_deg);
    }
    if (g.contains("lengths")) {
      const json& p = g.at("lengths");
      expect_keys(p, "guidance.lengths",
                  {"l_initial_m", "l_min_m", "l_trigger_m", "l_hard_m"});
      read(p, "guidance.lengths", "l_initial_m", gc.lengths.l_initial);
      read(p, "guidance.lengths", "l_min_m", gc.lengths.l_min);
      read(p, "guidance.lengths", "l_trigger_m", gc.lengths.l_trigger);
      read(p, "guidance.lengths", "l_hard_m", gc.lengths.l_hard);
    }
    if (g.contains("force")) {
      const json& p = g.at("force");
      expect_keys(p, "guidance.force",
                  {"traction_n", "retraction_n", "ramp_omega", "mode_omega"});
      read(p, "guidance.force", "traction_n", gc.force.traction);
      read(p, "guidance.force", "retraction_n", gc.force.retraction);
      read(p, "guidance.force", "ramp_omega", gc.force.ramp_omega);
      read(p, "guidance.force", "mode_omega", gc.force.mode_omega);
    }
    if (g.contains("avoidance")) {
      const json& p = g.at("avoidance");
      expect_keys(p, "guidance.avoidance",
                  {"enabled", "f_low_n", "rearm_factor", "complete_fraction",
                   "omega"});
      read(p, "guidance.avoidance", "enabled", gc.avoidance.enabled);
      read(p, "guidance.avoidance", "f_low_n", gc.avoidance.f_low);
      read(p, "guidance.avoidance", "rearm_factor", gc.avoidance.rearm_factor);
      read(p, "guidance.avoidance", "complete_fraction",
           gc.avoidance.complete_fraction);
      read(p, "guidance.avoidance", "omega", gc.avoidance.omega);
    }
    if (g.contains("gains")) {
      const json& p = g.at("gains");
      GuidanceGains& gg = gc.gains;
      expect_keys(p, "guidance.gains",
                  {"lookahead_s", "lookahead_line_m", "k_chi", "k_gamma",
                   "nu_chi_max", "nu_gamma_max", "k_radial", "radial_sine_max",
                   "radial_sine_min",
                   "omega_ref_mu", "omega_ref_alpha", "k_mu", "k_alpha", "k_beta",
                   "k_omega", "alpha_min_deg", "alpha_max_deg", "mu_max_deg",
                   "alpha_max_transition_deg",
                   "v_a_floor_ms", "shape_omega", "transition_blend_s"});
      read(p, "guidance.gains", "lookahead_s", gg.lookahead_s);
      read(p, "guidance.gains", "lookahead_line_m", gg.lookahead_line_m);
      read(p, "guidance.gains", "k_chi", gg.k_chi);
      read(p, "guidance.gains", "k_gamma", gg.k_gamma);
      read(p, "guidance.gains", "nu_chi_max", gg.nu_chi_max);
      read(p, "guidance.gains", "nu_gamma_max", gg.nu_gamma_max);
      read(p, "guidance.gains", "k_radial", gg.k_radial);
      read(p, "guidance.gains", "radial_sine_max", gg.radial_sine_max);
      read(p, "guidance.gains", "radial_sine_min", gg.radial_sine_min);
      read(p, "guidance.gains", "omega_ref_mu", gg.omega_ref_mu);
      read(p, "guidance.gains", "omega_ref_alpha", gg.omega_ref_alpha);
      read(p, "guidance.gains", "k_mu", gg.k_mu);
      read(p, "guidance.gains", "k_alpha", gg.k_alpha);
      read(p, "guidance.gains", "k_beta", gg.k_beta);
      read_vec3(p, "guidance.gains", "k_omega", gg.k_omega);
      double amin = rad2deg(gg.alpha_min), amax = rad2deg(gg.alpha_max);
      double amax_tr = rad2deg(gg.alpha_max_transition);
      read(p, "guidance.gains", "alpha_max_transition_deg", amax_tr);
      gg.alpha_max_transition = deg2rad(amax_tr);
      double mumax = rad2deg(gg.mu_max);
      read(p, "guidance.gains", "alpha_min_deg", amin);
      read(p, "guidance.gains", "alpha_max_deg", amax);
      read(p, "guidance.gains", "mu_max_deg", mumax);
      gg.alpha_min = deg2rad(amin);
      gg.alpha_max = deg2rad(amax);
      gg.mu_max = deg2rad(mumax);
      read(p, "guidance.gains", "v_a_floor_ms", gg.v_a_floor);
      read(p, "guidance.gains", "shape_omega", gg.shape_omega);
      read(p, "guidance.gains", "transition_blend_s", gg.transition_blend_s);
    }
    read(g, "guidance", "initial_speed_ms", gc.initial_speed);
    read(g, "guidance", "wind_toward_deg", gc.wind_toward_deg);
  }

  if (j.contains("limit")) {
    const json& l = j.at("limit");
    expect_keys(l, "limit", {"name", "g_star", "invalid_penalty"});
    read(l, "limit", "name", c.limit.name);
    read(l, "limit", "g_star", c.limit.g_star);
    read(l, "limit", "invalid_penalty", c.limit.invalid_penalty);
  }

  if (j.contains("subsim")) {
    const json& s = j.at("subsim");
    expect_keys(s, "subsim",
                {"n_samples", "p0", "max_levels", "proposal_scale", "accept_target",
                 "scale_min", "scale_max"});
    read(s, "subsim", "n_samples", c.subsim.n_samples);
    read(s, "subsim", "p0", c.subsim.p0);
    read(s, "subsim", "max_levels", c.subsim.max_levels);
    read(s, "subsim", "proposal_scale", c.subsim.proposal_scale);
    read(s, "subsim", "accept_target", c.subsim.accept_target);
    read(s, "subsim", "scale_min", c.subsim.scale_min);
    read(s, "subsim", "scale_max", c.subsim.scale_max);
  }

  if (j.contains("segmentation")) {
    const json& s = j.at("segmentation");
    expect_keys(s, "segmentation", {"window_s", "stride_s", "reaction_s", "signals"});
    read(s, "segmentation", "window_s", c.segmentation.window_s);
    read(s, "segmentation", "stride_s", c.segmentation.stride_s);
    read(s, "segmentation", "reaction_s", c.segmentation.reaction_s);
    read(s, "segmentation", "signals", c.segmentation.signals);
  }

  if (j.contains("training")) {
    const json& t = j.at("training");
    expect_keys(t, "training",
                {"smote_k", "smote_ratio", "folds", "sigma2_rel", "c_grid",
                 "kkt_tol", "max_iterations", "holdout_fraction",
                 "stop_rel_improvement"});
    read(t, "training", "smote_k", c.training.smote_k);
    read(t, "training", "smote_ratio", c.training.smote_ratio);
    read(t, "training", "folds", c.training.folds);
    read(t, "training", "sigma2_rel", c.training.sigma2_rel);
    read(t, "training", "c_grid", c.training.c_grid);
    read(t, "training", "kkt_tol", c.training.kkt_tol);
    read(t, "training", "max_iterations", c.training.max_iterations);
    read(t, "training", "holdout_fraction", c.training.holdout_fraction);
    read(t, "training", "stop_rel_improvement", c.training.stop_rel_improvement);
  }

  if (j.contains("loss")) {
    const json& l = j.at("loss");
    expect_keys(l, "loss",
                {"p_em_kw", "p_pc_kw", "t_pc_min", "e_misc_kwh", "downtime_min_grid"});
    read(l, "loss", "p_em_kw", c.loss.p_em_kw);
    read(l, "loss", "p_pc_kw", c.loss.p_pc_kw);
    read(l, "loss", "t_pc_min", c.loss.t_pc_min);
    read(l, "loss", "e_misc_kwh", c.loss.e_misc_kwh);
    read(l, "loss", "downtime_min_grid", c.loss.downtime_min_grid);
  }

  c.validate();
  return c;
}

CampaignConfig CampaignConfig::load_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  try {
    return from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void CampaignConfig::save_file(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write config file: " + path);
  f << to_json().dump(2) << "\n";
}

std::string CampaignConfig::canonical() const { return to_json().dump(); }

std::string CampaignConfig::hash() const { return hex64(fnv1a(canonical())); }

}  // namespace awekit
