#pragma once

#include "common.hpp"
#include "plant.hpp"

namespace awekit {

// ---------------------------------------------------------------------------
// Reference path geometry
// ---------------------------------------------------------------------------

struct PathShape {
  double a = 0.30;             // rad, latitude lobe size
  double b = 0.90;             // rad, longitude lobe size
  double phi_set = deg2rad(25.0);  // traction elevation
  double phi_0 = deg2rad(75.0);    // transition start elevation
  double omega0_r = 0.05;          // 1/s, rotation bandwidth
  double freeze_threshold = deg2rad(1.0);  // rad, arc-gap freeze

  void validate() const;
};

struct LatLon {
  double lambda = 0;  // longitude, rad
  double phi = 0;     // latitude, rad
};

// Figure-of-eight on the unit sphere, parameterized by s in [0, 2*pi).
LatLon lemniscate_point(double s, double a, double b);
LatLon lemniscate_deriv(double s, double a, double b);

// Tilt of the path frame about the negative y_W axis.
Mat3 rotation_WP(double phi_r);

Vec3 path_point_P(double s, const PathShape& shape);
Vec3 path_point_W(double s, const PathShape& shape, double phi_r);
// d/ds of the path point (not normalized).
Vec3 path_tangent_W(double s, const PathShape& shape, double phi_r);

struct ClosestPointResult {
  double s = 0;
  bool converged = false;
  bool fallback = false;  // grid search was needed
};

// Stationary point of the great-circle distance from position (unit vector,
// W frame) to the rotated path, warm-started at s_init. Newton capped at 20
// iterations, 1e-10 step tolerance; falls back to a 64-point grid search plus
// one polish step.
ClosestPointResult closest_point_newton(const Vec3& r_hat_W, const PathShape& shape,
                                        double phi_r, double s_init);

// Elevation of a W-frame vector: angle to its projection on the x_W y_W
// plane, signed by z, with the overhead singularity resolved to +pi/2.
double elevation_angle(const Vec3& v_W);

// Elevation difference aircraft minus path target.
double arc_gap(const Vec3& aircraft_W, const Vec3& target_W);

// One explicit-Euler step of the rotation-angle filter with the freeze rule.
double transition_filter_step(double phi_r, const PathShape& shape,
                              double delta_phi, double dt);

// ---------------------------------------------------------------------------
// Mode logic
// ---------------------------------------------------------------------------

enum class FlightMode { Traction, Retraction, Transition };

const char* mode_name(FlightMode m);

struct TetherSchedule {
  double l_initial = 250.0;  // m
  double l_min = 240.0;      // retraction end
  double l_trigger = 340.0;  // retraction trigger length
  double l_hard = 450.0;     // never exceeded

  void validate() const;
};

// Retraction decision at a retraction-point crossing (s = pi/2 or 3*pi/2).
bool retraction_trigger(bool at_crossing, double l_tether, double last_increment,
                        const TetherSchedule& lengths);

struct ForceSchedule {
  double traction = 1600.0;    // N
  double retraction = 420.0;   // N
  double ramp_omega = 0.03;    // 1/s, transition set-point shaping
  double mode_omega = 1.0;     // 1/s, set-point shaping on other mode changes

  void validate() const;
};

struct AvoidanceParams {
  bool enabled = true;
  double f_low = 10.0;            // N, collapsed set point
  double rearm_factor = 1.2;      // re-arm when F_t <= rearm_factor * f_low
  double complete_fraction = 0.9; // of the traction set point
  double omega = 1.5;             // 1/s, set-point filter during avoidance
};

// ---------------------------------------------------------------------------
// Cascade
// ---------------------------------------------------------------------------

struct GuidanceGains {
  double lookahead_s = 0.24;       // carrot offset along the path parameter
  double lookahead_line_m = 60.0;  // carrot distance on the retraction line
  double k_chi = 2.0;              // 1/s
  double k_gamma = 2.4;            // 1/s
  double nu_chi_max = 1.2;         // rad/s
  double nu_gamma_max = 0.9;       // rad/s
  double k_radial = 0.3;           // 1/s
  double radial_sine_max = 0.55;   // outward clamp on radial velocity fraction
  double radial_sine_min = -0.15;  // inward clamp: the path follower never dives
                                   // after a fast-reeling winch
  double omega_ref_mu = 3.0;       // rad/s, bank reference model
  double omega_ref_alpha = 3.0;    // rad/s
  double k_mu = 2.5;               // 1/s
  double k_alpha = 3.0;            // 1/s
  double k_beta = 2.0;             // 1/s
  Vec3 k_omega{8.0, 8.0, 5.0};     // 1/s, rate loop
  double alpha_min = deg2rad(-6.0);
  double alpha_max = deg2rad(10.0);
  double mu_max = deg2rad(75.0);
  double v_a_floor = 24.0;         // m/s, inversion airspeed floor; also the
                                   // minimum dynamic pressure the lift inversion
                                   // may assume, which keeps the force loop from
                                   // chasing tension into the slow-flight branch
  double shape_omega = 0.8;        // 1/s, command shaping into mode changes
  double transition_blend_s = 8.0; // shaped-command window after entering
                                   // the transition
  double alpha_max_transition = deg2rad(2.0);  // tighter lift clamp while the
                                               // path rotates down

  void validate() const;
};

// Rotation from the O frame into the kinematic frame K(chi, gamma).
Mat3 M_KO(double chi, double gamma);

struct AttitudeSetpoints {
  double mu_set = 0;     // rad
  double alpha_set = 0;  // rad
  double C_L_set = 0;
  double f_y_m = 0;      // N
  double f_z_m = 0;      // N
  bool clamped = false;
};

// Flight-path dynamic inversion: pseudo-controls plus the tether force set
// point map to bank and angle-of-attack set points. Uses the set point, not
// the measured force, so a set-point collapse immediately rotates the
// commands.
AttitudeSetpoints attitude_setpoints(double nu_chi, double nu_gamma, double chi_k,
                                     double gamma_k, double v_k, double v_a,
                                     const Vec3& p_O, double F_t_set,
                                     const AircraftParams& aircraft,
                                     const GuidanceGains& gains);

struct CascadeInputs {
  double nu_chi = 0, nu_gamma = 0;  // rad/s
  double chi_k = 0, gamma_k = 0;    // rad
  double mu_ref = 0, mu_ref_rate = 0;
  double alpha_ref = 0, alpha_ref_rate = 0;
  double mu_meas = 0, alpha_meas = 0, beta_meas = 0;
  double v_a = 0;
};

// Attitude and rate loops: reference tracking to body-rate commands, then a
// proportional dynamic inversion to surface deflection commands (clamped).
SurfaceDeflections cascade_step(const AircraftState& state,
                                const AircraftParams& aircraft,
                                const GuidanceGains& gains,
                                const CascadeInputs& in);

// Kinematic bank angle about the velocity axis, from the attitude and the
// K frame at (chi, gamma).
double kinematic_bank(const AircraftState& state, double chi, double gamma);

// ---------------------------------------------------------------------------
// Guidance state machine
// ---------------------------------------------------------------------------

struct GuidanceConfig {
  PathShape path;
  GuidanceGains gains;
  TetherSchedule lengths;
  ForceSchedule force;
  AvoidanceParams avoidance;
  double initial_speed = 24.0;  // m/s
  double wind_toward_deg = 0.0; // mean wind heading, O frame (0 = North)

  Mat3 R_OW() const;  // W coordinates -> O coordinates
  void validate() const;
};

struct GuidanceState {
  FlightMode mode = FlightMode::Traction;
  double s_star = 0;
  double phi_r = deg2rad(25.0);
  double ft_set = 1600.0;  // filtered force set point

  bool avoidance_active = false;
  bool avoidance_recovering = false;

  // Retraction glide (W frame).
  Vec3 glide_a_W = Vec3::Zero();
  Vec3 glide_b_W = Vec3::Zero();
  double waypoint_s = kPi / 2.0;
  double chi_shaped = 0, gamma_shaped = 0;
  bool shape_initialized = false;

  // Tether length increment per half figure of eight.
  double l_at_last_cross = -1.0;
  double last_increment = -1.0;

  // Attitude reference models.
  double mu_ref = 0, alpha_ref = 0;
  double mode_time = 0;  // seconds since the last mode change

  bool cycle_complete = false;
  bool newton_fallback = false;  // sticky diagnostic
};

struct GuidanceOutput {
  SurfaceDeflections commands_deg;
  double F_t_set = 0;
  double e_p = 0;  // m, great-circle path error
  double nu_chi = 0, nu_gamma = 0;
  double chi_k = 0, gamma_k = 0;
  double mu_set = 0, alpha_set = 0;
  double mu_meas = 0;
  bool mode_changed = false;
  FlightMode mode = FlightMode::Traction;
  bool avoidance_triggered = false;  // this tick
  bool avoidance_completed = false;  // this tick
  bool saturated = false;
};

// One controller tick at the sample rate. y_hat is the predictor output
// (+1 nominal, -1 upset); pass +1 when no predictor is deployed.
GuidanceOutput guidance_step(GuidanceState& gs, const GuidanceConfig& cfg,
                             const PlantParams& plant_params,
                             const PlantState& plant, const PlantOutputs& outputs,
                             int y_hat, double dt);

// Path error of the current state without advancing the guidance state; the
// in-loop predictor consumes this before the tick is executed.
double path_error_preview(const GuidanceState& gs, const GuidanceConfig& cfg,
                          const PlantState& plant);

}  // namespace awekit
