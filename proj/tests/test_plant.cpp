#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "plant.hpp"

#include <cmath>

using namespace awekit;

namespace {

Vec3 still_air(const Vec3&) { return Vec3::Zero(); }

}  // namespace

TEST_CASE("rigid body derivatives") {
  AircraftParams p;
  AircraftState s;
  s.v_B = Vec3(30, 0, 0);

  SUBCASE("no forces, no rates: only kinematics") {
    auto d = aircraft_derivatives(s, p, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(),
                                  Vec3::Zero(), Vec3::Zero());
    CHECK(d.v_dot.norm() == 0.0);
    CHECK(d.omega_dot.norm() == 0.0);
    CHECK((d.p_dot - Vec3(30, 0, 0)).norm() == doctest::Approx(0.0));
  }

  SUBCASE("Newton: F = m a") {
    auto d = aircraft_derivatives(s, p, Vec3(p.mass * 2.0, 0, 0), Vec3::Zero(),
                                  Vec3::Zero(), Vec3::Zero(), Vec3::Zero());
    CHECK(d.v_dot.x() == doctest::Approx(2.0));
    CHECK(d.v_dot.y() == 0.0);
    CHECK(d.v_dot.z() == 0.0);
  }

  SUBCASE("Euler equations with a diagonal inertia") {
    AircraftParams p2 = p;
    p2.J_diag = Vec3(1, 2, 3);
    AircraftState s2;
    s2.omega_B = Vec3(1, 1, 0);
    auto d = aircraft_derivatives(s2, p2, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(),
                                  Vec3::Zero(), Vec3::Zero());
    // omega x J omega = (1,1,0) x (1,2,0) = (0,0,1)
    CHECK(d.omega_dot.x() == doctest::Approx(0.0));
    CHECK(d.omega_dot.y() == doctest::Approx(0.0));
    CHECK(d.omega_dot.z() == doctest::Approx(-1.0 / 3.0));
  }
}

TEST_CASE("aero forces") {
  AircraftParams p;
  AircraftState s;

  SUBCASE("zero relative flow is degenerate") {
    s.v_B = Vec3(10, 0, 0);
    Vec3 wind_O = s.q_OB * s.v_B;  // exactly the aircraft velocity
    AeroResult r = aero_forces(s, p, wind_O, {});
    CHECK(r.degenerate);
    CHECK(r.F_B.norm() == 0.0);
  }

  SUBCASE("pure drag at the zero-lift angle of attack") {
    AircraftParams p2 = p;
    p2.C_D0 = 0.05;
    p2.k_induced = 0.0;
    p2.C_Y_beta = 0.0;
    double alpha0 = -p2.C_L0 / p2.C_L_alpha;  // C_L = 0
    double v = 20.0;
    s.v_B = Vec3(v * std::cos(alpha0), 0, v * std::sin(alpha0));
    AeroResult r = aero_forces(s, p2, Vec3::Zero(), {});
    CHECK(r.alpha == doctest::Approx(alpha0).epsilon(1e-12));
    double qbarS = 0.5 * p2.rho * v * v * p2.S_w;
    CHECK(r.F_B.norm() == doctest::Approx(qbarS * 0.05).epsilon(1e-9));
    // Opposing the relative wind.
    Vec3 dir = r.F_B.normalized();
    Vec3 vhat = s.v_B.normalized();
    CHECK(dir.dot(vhat) == doctest::Approx(-1.0).epsilon(1e-9));
  }

  SUBCASE("forces scale with dynamic pressure") {
    s.v_B = Vec3(20, 1, 2);
    AeroResult r1 = aero_forces(s, p, Vec3::Zero(), {});
    AircraftState s2 = s;
    s2.v_B *= 2.0;
    AeroResult r2 = aero_forces(s2, p, Vec3::Zero(), {});
    CHECK(r2.alpha == doctest::Approx(r1.alpha).epsilon(1e-12));
    CHECK(r2.beta == doctest::Approx(r1.beta).epsilon(1e-12));
    CHECK(r2.F_B.norm() == doctest::Approx(4.0 * r1.F_B.norm()).epsilon(1e-9));
  }
}

TEST_CASE("actuator first order lag with rate and deflection limits") {
  ActuatorParams p;
  ActuatorBank bank;

  SUBCASE("command equal to state leaves the state") {
    bank.pos.aileron_deg = 5;
    ActuatorBank out = actuator_step(bank, p, {5, 0, 0}, 0.01);
    CHECK(out.pos.aileron_deg == doctest::Approx(5.0));
  }

  SUBCASE("large command settles at the deflection limit") {
    ActuatorBank b;
    for (int i = 0; i < 2000; ++i) b = actuator_step(b, p, {90, 0, 0}, 0.01);
    CHECK(b.pos.aileron_deg == doctest::Approx(20.0));
  }

  SUBCASE("rate limit caps the first step") {
    ActuatorBank b;
    ActuatorBank out = actuator_step(b, p, {0, 20, 0}, 0.01);
    // Unconstrained first-order step exceeds 115 deg/s * 0.01 s = 1.15 deg.
    CHECK(out.pos.elevator_deg == doctest::Approx(1.15));
  }
}

TEST_CASE("tether segment forces") {
  TetherParams p;
  p.n_particles = 1;
  p.stiffness_ref_length = 60.0;

  SUBCASE("unstretched static tether transmits nothing") {
    TetherState t;
    t.node_pos = {Vec3(60, 0, 0)};
    t.node_vel = {Vec3::Zero()};
    t.l_unstretched = 60.0;
    TetherParams pz = p;
    pz.gravity = 0.0;  // isolate the spring
    TetherForces f = tether_forces(t, pz, still_air, Vec3::Zero(), Vec3(60, 0, 0),
                                   Vec3::Zero());
    CHECK(f.tension_ground == 0.0);
    CHECK(f.tension_aircraft == 0.0);
  }

  SUBCASE("reference-length segment stretched 0.01 m carries 102.43 N") {
    TetherState t;
    t.node_pos = {Vec3(60.01, 0, 0)};
    t.node_vel = {Vec3::Zero()};
    t.l_unstretched = 60.0;
    TetherForces f = tether_forces(t, p, still_air, Vec3::Zero(), Vec3(60.01, 0, 0),
                                   Vec3::Zero());
    CHECK(f.tension_ground == doctest::Approx(102.43).epsilon(1e-9));
    CHECK(f.tension_aircraft == doctest::Approx(102.43).epsilon(1e-9));
    // Pulls the aircraft back toward the anchor.
    CHECK(f.force_aircraft_O.x() == doctest::Approx(-102.43).epsilon(1e-9));
  }

  SUBCASE("compressed segments never push") {
    TetherState t;
    t.node_pos = {Vec3(50, 0, 0)};
    t.node_vel = {Vec3::Zero()};
    t.l_unstretched = 60.0;
    TetherForces f = tether_forces(t, p, still_air, Vec3::Zero(), Vec3(50, 0, 0),
                                   Vec3::Zero());
    CHECK(f.tension_ground == 0.0);
    CHECK(f.force_aircraft_O.norm() == 0.0);
  }

  SUBCASE("spring contribution is never negative along any segment") {
    TetherParams p5;
    p5.n_particles = 5;
    TetherState t;
    t.l_unstretched = 300;
    for (int i = 0; i < 5; ++i) {
      t.node_pos.push_back(Vec3(55.0 * (i + 1), 3.0 * ((i % 2) ? 1 : -1), -10.0 * i));
      t.node_vel.push_back(Vec3(1, -2, 0.5) * i);
    }
    TetherForces f = tether_forces(t, p5, still_air, Vec3::Zero(), t.node_pos[4],
                                   t.node_vel[4]);
    for (double s : f.segment_spring) CHECK(s >= 0.0);
  }
}

TEST_CASE("winch PI with clamps") {
  WinchParams p;

  SUBCASE("zero error, zero state: no acceleration") {
    WinchState w;
    WinchState out = winch_step(w, p, 1600.0, 1600.0, 0.01);
    CHECK(out.accel == doctest::Approx(0.0));
    CHECK(out.v == doctest::Approx(0.0));
  }

  SUBCASE("large persistent error pins the acceleration at +5") {
    WinchState w;
    WinchState out = winch_step(w, p, 5000.0, 1600.0, 0.01);
    CHECK(out.accel == doctest::Approx(5.0));
  }

  SUBCASE("speed clamps at the reel-out maximum") {
    WinchState w;
    w.v = 20.0;
    WinchState out = winch_step(w, p, 50000.0, 0.0, 0.01);
    CHECK(out.v == doctest::Approx(20.0));
    CHECK(out.accel == doctest::Approx(0.0));
  }
}

TEST_CASE("integrator advances kinematics and conserves nothing it should not") {
  PlantParams params;
  params.tether.n_particles = 3;

  SUBCASE("force-free motion is linear") {
    PlantParams pf = params;
    pf.aircraft.gravity = 0;
    pf.aircraft.C_L0 = pf.aircraft.C_L_alpha = pf.aircraft.C_D0 = 0;
    pf.aircraft.k_induced = pf.aircraft.C_Y_beta = 0;
    pf.aircraft.C_m0 = pf.aircraft.C_m_alpha = pf.aircraft.C_m_q = 0;
    pf.aircraft.C_m_delta_e = 1e-9;
    pf.aircraft.C_l_beta = pf.aircraft.C_l_p = pf.aircraft.C_l_r = 0;
    pf.aircraft.C_l_delta_a = 1e-9;
    pf.aircraft.C_n_beta = pf.aircraft.C_n_p = pf.aircraft.C_n_r = 0;
    pf.aircraft.C_n_delta_r = 1e-9;
    pf.tether.gravity = 0;
    PlantState s;
    s.ac.p_O = Vec3(100, 0, -100);
    s.ac.v_B = Vec3(25, 0, 0);
    s.tether.l_unstretched = 1000;  // slack
    for (int i = 0; i < 3; ++i) {
      s.tether.node_pos.push_back(Vec3(30.0 * (i + 1), 0, -30.0 * (i + 1)));
      s.tether.node_vel.push_back(Vec3::Zero());
    }
    PlantInputs in;
    in.wind_O = still_air;
    PlantState out = s;
    for (int i = 0; i < 100; ++i) out = integrate_step(out, pf, in, 0.01);
    CHECK((out.ac.p_O - (s.ac.p_O + Vec3(25, 0, 0))).norm() < 1e-9);
    CHECK_FALSE(out.numerical_failure);
  }

  SUBCASE("drag makes a glide dissipative") {
    PlantState s;
    s.ac.p_O = Vec3(0, 0, -500);
    double alpha_trim = -params.aircraft.C_m0 / params.aircraft.C_m_alpha;
    double v0 = 28.0;
    s.ac.v_B = Vec3(v0 * std::cos(alpha_trim), 0, v0 * std::sin(alpha_trim));
    s.tether.l_unstretched = 5000;  // fully slack
    for (int i = 0; i < 3; ++i) {
      s.tether.node_pos.push_back(Vec3(0.1 * (i + 1), 0, -499 + i));
      s.tether.node_vel.push_back(Vec3::Zero());
    }
    PlantInputs in;
    in.wind_O = still_air;
    auto energy = [&](const PlantState& st) {
      double h = st.ac.altitude();
      double ke = 0.5 * params.aircraft.mass * st.ac.v_B.squaredNorm();
      Vec3 Jw = params.aircraft.inertia() * st.ac.omega_B;
      double rot = 0.5 * st.ac.omega_B.dot(Jw);
      return ke + rot + params.aircraft.mass * params.aircraft.gravity * h;
    };
    PlantState st = s;
    double e_prev = energy(st);
    for (int i = 0; i < 1000; ++i) {
      st = integrate_step(st, params, in, 0.01);
      if (i % 10 == 0) {
        double e = energy(st);
        CHECK(e <= e_prev + 1e-6);
        e_prev = e;
      }
    }
    CHECK_FALSE(st.numerical_failure);
    CHECK_FALSE(st.degenerate_airflow);
  }

  SUBCASE("quaternion stays normalized") {
    PlantState s;
    s.ac.p_O = Vec3(0, 0, -500);
    s.ac.v_B = Vec3(30, 0, 0);
    s.ac.omega_B = Vec3(0.5, 0.2, -0.1);
    s.tether.l_unstretched = 5000;
    for (int i = 0; i < 3; ++i) {
      s.tether.node_pos.push_back(Vec3(0.1 * (i + 1), 0, -499 + i));
      s.tether.node_vel.push_back(Vec3::Zero());
    }
    PlantInputs in;
    in.wind_O = still_air;
    PlantState st = s;
    for (int i = 0; i < 500; ++i) {
      st = integrate_step(st, params, in, 0.01);
      CHECK(std::abs(st.ac.q_OB.norm() - 1.0) < 1e-9);
    }
  }
}
