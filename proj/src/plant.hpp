#pragma once

#include "common.hpp"
#include "windfield.hpp"

#include <functional>
#include <vector>

namespace awekit {

// ---------------------------------------------------------------------------
// Aircraft
// ---------------------------------------------------------------------------

struct AircraftParams {
  double mass = 36.8;     // kg
  double S_w = 3.0;       // m^2
  double b_span = 5.5;    // m
  double c_chord = 0.55;  // m
  double rho = 1.225;     // kg/m^3
  double gravity = 9.81;  // m/s^2
  Vec3 J_diag{25.0, 32.0, 56.0};  // kg m^2

  // Linear aero model. Repository defaults sized for a ~35 kg, 3 m^2 rigid
  // wing; see config/plant_defaults.json.
  double C_L0 = 0.5;
  double C_L_alpha = 5.0;  // 1/rad
  double C_D0 = 0.06;
  double k_induced = 0.06;
  double C_Y_beta = -0.3;  // 1/rad

  double C_m0 = 0.05;
  double C_m_alpha = -0.6;
  double C_m_q = -15.0;
  double C_m_delta_e = -1.1;

  double C_l_beta = -0.06;
  double C_l_p = -0.56;
  double C_l_r = 0.06;
  double C_l_delta_a = 0.23;

  double C_n_beta = 0.07;
  double C_n_p = -0.03;
  double C_n_r = -0.09;
  double C_n_delta_r = -0.08;

  double v_a_min = 0.5;  // m/s, below this the airflow is degenerate

  void validate() const;
  Mat3 inertia() const;
  Mat3 inertia_inverse() const;
};

struct AircraftState {
  Vec3 p_O = Vec3::Zero();      // position, North-East-Down frame, m
  Vec3 v_B = Vec3::Zero();      // kinematic velocity in body frame, m/s
  Quat q_OB = Quat::Identity(); // rotates body coordinates into O
  Vec3 omega_B = Vec3::Zero();  // body rates, rad/s

  Mat3 R_OB() const { return q_OB.toRotationMatrix(); }
  Vec3 v_O() const { return q_OB * v_B; }
  double altitude() const { return -p_O.z(); }
};

struct AircraftDerivative {
  Vec3 p_dot;
  Vec3 v_dot;
  Eigen::Vector4d q_dot;  // (w, x, y, z) order
  Vec3 omega_dot;
};

// Rigid-body equations with all forces given in the body frame. The tether
// attaches at the center of gravity and contributes force only.
AircraftDerivative aircraft_derivatives(const AircraftState& state,
                                        const AircraftParams& params,
                                        const Vec3& F_a_B, const Vec3& F_g_B,
                                        const Vec3& F_t_B, const Vec3& F_p_B,
                                        const Vec3& M_a_B);

struct AeroResult {
  Vec3 F_B = Vec3::Zero();
  Vec3 M_B = Vec3::Zero();
  double alpha = 0;  // rad
  double beta = 0;   // rad
  double v_a = 0;    // m/s
  bool degenerate = false;
};

struct SurfaceDeflections {
  double aileron_deg = 0;
  double elevator_deg = 0;
  double rudder_deg = 0;
};

// wind_O: wind velocity at the aircraft in the O frame.
AeroResult aero_forces(const AircraftState& state, const AircraftParams& params,
                       const Vec3& wind_O, const SurfaceDeflections& defl);

// ---------------------------------------------------------------------------
// Actuators
// ---------------------------------------------------------------------------

struct ActuatorParams {
  double bandwidth = 35.0;       // rad/s, all surfaces
  double aileron_limit_deg = 20.0;
  double elevator_limit_deg = 20.0;
  double rudder_limit_deg = 30.0;
  double rate_limit_deg_s = 115.0;

  void validate() const;
};

struct ActuatorBank {
  SurfaceDeflections pos;  // deg
};

// One zero-order-hold step of the first order lags, with rate and deflection
// clamps applied per surface.
ActuatorBank actuator_step(const ActuatorBank& bank, const ActuatorParams& params,
                           const SurfaceDeflections& commands_deg, double dt);

// ---------------------------------------------------------------------------
// Tether
// ---------------------------------------------------------------------------

struct TetherParams {
  int n_particles = 5;
  double rho_t = 0.0046;    // kg/m, linear mass density
  double diameter = 0.0025; // m
  double c_d = 1.2;
  double stiffness = 10243.0;  // N/m for a segment of stiffness_ref_length
  double damping = 7.8833;     // N s/m for a segment of stiffness_ref_length
  double stiffness_ref_length = 60.0;  // m
  double rho_air = 1.225;      // kg/m^3, for node drag
  double gravity = 9.81;       // m/s^2

  void validate() const;
  double segment_stiffness(double l_seg) const {
    return stiffness * stiffness_ref_length / l_seg;
  }
  double segment_damping(double l_seg) const {
    return damping * stiffness_ref_length / l_seg;
  }
};

// Node n_particles-1 is kinematically pinned to the aircraft attachment; the
// segments run ground anchor -> node 0 -> ... -> node n_particles-1.
struct TetherState {
  std::vector<Vec3> node_pos;  // O frame
  std::vector<Vec3> node_vel;
  double l_unstretched = 300.0;  // m
  double reel_rate = 0.0;        // m/s, mirrors winch speed

  void validate(int n_particles) const;
};

using WindAtPosition = std::function<Vec3(const Vec3& p_O)>;

struct TetherForces {
  Vec3 force_aircraft_O = Vec3::Zero();  // spring-damper pull on the aircraft
  double tension_aircraft = 0;           // N, magnitude at the aircraft end
  double tension_ground = 0;             // N, magnitude at the anchor
  std::vector<Vec3> free_node_accel;     // n_particles-1 entries
  std::vector<double> segment_spring;    // diagnostic, N (spring part only)
  bool node_collapse = false;
};

TetherForces tether_forces(const TetherState& tether, const TetherParams& params,
                           const WindAtPosition& wind, const Vec3& anchor_O,
                           const Vec3& aircraft_pos_O, const Vec3& aircraft_vel_O);

// ---------------------------------------------------------------------------
// Winch
// ---------------------------------------------------------------------------

struct WinchParams {
  double inertia = 0.08;     // kg m^2
  double friction = 0.6;     // viscous, torque per angular rate
  double a_min = -5.0;       // m/s^2
  double a_max = 5.0;        // m/s^2
  double v_min = -15.0;      // m/s (reel-in)
  double v_max = 20.0;       // m/s (reel-out)
  double drum_radius = 0.1;  // m
  double kp = 0.009;         // torque per N of force error
  double ki = 0.004;         // torque per N s

  void validate() const;
};

struct WinchState {
  double v = 0.0;           // m/s, reel-out positive
  double integrator = 0.0;  // N s
  double accel = 0.0;       // m/s^2, last applied (diagnostic)
};

// PI on tether force error -> reference torque -> clamped acceleration and
// speed. The integrator freezes while either clamp is active.
WinchState winch_step(const WinchState& winch, const WinchParams& params,
                      double F_t_ground, double F_t_set, double dt);

// ---------------------------------------------------------------------------
// Full plant
// ---------------------------------------------------------------------------

struct PlantParams {
  AircraftParams aircraft;
  ActuatorParams actuators;
  TetherParams tether;
  WinchParams winch;

  void validate() const;
};

struct PlantState {
  AircraftState ac;
  ActuatorBank act;
  TetherState tether;
  WinchState winch;
  double t = 0;

  // Sticky fault flags; a set flag invalidates the run.
  bool degenerate_airflow = false;
  bool numerical_failure = false;
};

struct PlantInputs {
  SurfaceDeflections commands_deg;  // surface commands, held between steps
  double F_t_set = 0;               // winch force set point, N
  WindAtPosition wind_O;            // wind field in O coordinates
};

struct PlantOutputs {
  AeroResult aero;
  TetherForces tether;
  Vec3 accel_O = Vec3::Zero();  // kinematic acceleration
};

// Instantaneous force/derivative evaluation (also used by the logger).
PlantOutputs evaluate_plant(const PlantState& state, const PlantParams& params,
                            const PlantInputs& inputs);

// Advance one fixed integrator step: winch and actuators with their discrete
// laws, then classical RK4 over aircraft, tether nodes and unstretched length.
PlantState integrate_step(const PlantState& state, const PlantParams& params,
                          const PlantInputs& inputs, double dt);

}  // namespace awekit
