#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "guidance.hpp"
#include "rng.hpp"

#include <cmath>

using namespace awekit;

namespace {

PathShape default_shape() {
  PathShape s;
  s.a = 0.35;
  s.b = 0.8;
  s.phi_set = deg2rad(25);
  s.phi_0 = deg2rad(75);
  return s;
}

// Grid-search oracle for the closest point, refined to 1e-7. A finite center
// confines the search to a half-loop around it, matching the warm-start
// contract of the Newton search (the figure of eight crosses itself, so the
// global minimizer can live on the other branch).
double closest_point_grid_oracle(const Vec3& r_hat, const PathShape& shape,
                                 double phi_r,
                                 double center = std::nan("")) {
  bool local = std::isfinite(center);
  double best_s = local ? center : 0.0, best = -2;
  for (int pass = 0; pass < 4; ++pass) {
    double width = pass == 0 ? (local ? kPi / 2 : kPi) : std::pow(10.0, -1.5 * pass) * kPi;
    int n = pass == 0 ? 20000 : 2000;
    double lo = (pass == 0 && !local) ? 0.0 : best_s - width;
    double span = (pass == 0 && !local) ? 2.0 * kPi : 2.0 * width;
    double step = span / n;
    for (int i = 0; i <= n; ++i) {
      double s = lo + i * step;
      double d = r_hat.dot(path_point_W(s, shape, phi_r));
      if (d > best) {
        best = d;
        best_s = s;
      }
    }
  }
  return wrap_2pi(best_s);
}

}  // namespace

TEST_CASE("lemniscate evaluation") {
  CHECK(lemniscate_point(0, 0.5, 0.5).lambda == doctest::Approx(0.0));
  CHECK(lemniscate_point(0, 0.5, 0.5).phi == doctest::Approx(0.0));

  LatLon quarter = lemniscate_point(kPi / 2, 0.3, 0.9);
  CHECK(quarter.lambda == doctest::Approx(0.9));
  CHECK(quarter.phi == doctest::Approx(0.0));

  LatLon mid = lemniscate_point(kPi / 4, 0.5, 0.5);
  CHECK(mid.lambda == doctest::Approx(0.5 * (std::sqrt(2.0) / 2.0) / 1.5).epsilon(1e-9));
  CHECK(mid.lambda == doctest::Approx(0.2357).epsilon(1e-3));
  CHECK(mid.phi == doctest::Approx(0.5 * 0.5 / 1.5).epsilon(1e-9));
}

TEST_CASE("lemniscate symmetries") {
  double a = 0.4, b = 0.7;
  for (double s = 0.1; s < 2 * kPi; s += 0.37) {
    LatLon p = lemniscate_point(s, a, b);
    LatLon m = lemniscate_point(2 * kPi - s, a, b);
    CHECK(m.lambda == doctest::Approx(-p.lambda).epsilon(1e-12));
    LatLon q = lemniscate_point(kPi - s, a, b);
    CHECK(q.phi == doctest::Approx(-p.phi).epsilon(1e-12));
  }
}

TEST_CASE("path points are unit vectors and rotate as specified") {
  PathShape shape = default_shape();

  SUBCASE("zero rotation is the identity") {
    for (double s = 0; s < 2 * kPi; s += 0.5) {
      Vec3 p = path_point_W(s, shape, 0.0);
      Vec3 q = path_point_P(s, shape);
      CHECK((p - q).norm() < 1e-15);
    }
  }

  SUBCASE("rotating the anchor point lifts it by phi_r") {
    PathShape sh = default_shape();
    Vec3 p = path_point_W(0.0, sh, deg2rad(30));
    CHECK(p.x() == doctest::Approx(std::cos(deg2rad(30))));
    CHECK(p.y() == doctest::Approx(0.0));
    CHECK(p.z() == doctest::Approx(std::sin(deg2rad(30))));
  }

  SUBCASE("unit norm for random parameters") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
      double s = rng.uniform() * 2 * kPi;
      double phi_r = rng.uniform() * kPi / 2;
      CHECK(path_point_W(s, shape, phi_r).norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("closest point search") {
  PathShape shape = default_shape();
  double phi_r = shape.phi_set;

  SUBCASE("a point on the path maps to itself") {
    Vec3 p = path_point_W(1.0, shape, phi_r);
    ClosestPointResult r = closest_point_newton(p, shape, phi_r, 0.9);
    CHECK(r.converged);
    CHECK(std::abs(wrap_pi(r.s - 1.0)) < 1e-9);
  }

  SUBCASE("small normal perturbation keeps the minimizer") {
    Vec3 p = path_point_W(1.0, shape, phi_r);
    Vec3 t = path_tangent_W(1.0, shape, phi_r).normalized();
    Vec3 n = p.cross(t).normalized();
    Vec3 q = (p + 1e-3 * n).normalized();
    ClosestPointResult r = closest_point_newton(q, shape, phi_r, 0.9);
    double oracle = closest_point_grid_oracle(q, shape, phi_r);
    CHECK(std::abs(wrap_pi(r.s - oracle)) < 1e-6);
    CHECK(std::abs(wrap_pi(r.s - 1.0)) < 1e-6);
  }

  SUBCASE("wrapping: warm start near 2*pi finds a minimizer near zero") {
    Vec3 p = path_point_W(0.05, shape, phi_r);
    ClosestPointResult r = closest_point_newton(p, shape, phi_r, 6.2);
    CHECK(std::abs(wrap_pi(r.s - 0.05)) < 1e-6);
  }

  SUBCASE("random positions agree with the half-loop grid oracle") {
    Rng rng(11);
    for (int i = 0; i < 25; ++i) {
      double s_true = rng.uniform() * 2 * kPi;
      Vec3 p = path_point_W(s_true, shape, phi_r);
      Vec3 jitter(rng.normal(), rng.normal(), rng.normal());
      Vec3 q = (p + 0.02 * jitter).normalized();
      ClosestPointResult r = closest_point_newton(q, shape, phi_r, s_true + 0.2);
      double oracle = closest_point_grid_oracle(q, shape, phi_r, s_true + 0.2);
      double d_found = std::acos(clamp(q.dot(path_point_W(r.s, shape, phi_r)), -1.0, 1.0));
      double d_oracle = std::acos(clamp(q.dot(path_point_W(oracle, shape, phi_r)), -1.0, 1.0));
      CHECK(d_found <= d_oracle + 1e-7);
    }
  }
}

TEST_CASE("transition filter") {
  PathShape shape = default_shape();
  shape.omega0_r = 0.05;

  SUBCASE("freeze above the arc gap threshold") {
    double phi = deg2rad(70);
    CHECK(transition_filter_step(phi, shape, deg2rad(2.0), 0.1) == phi);
  }

  SUBCASE("converges to phi_set") {
    double phi = shape.phi_0;
    for (int i = 0; i < 200000; ++i)
      phi = transition_filter_step(phi, shape, 0.0, 0.1);
    CHECK(phi == doctest::Approx(shape.phi_set).epsilon(1e-6));
  }

  SUBCASE("one explicit Euler step") {
    double phi = transition_filter_step(deg2rad(70), shape, 0.0, 0.1);
    CHECK(rad2deg(phi) == doctest::Approx(69.775).epsilon(1e-9));
  }

  SUBCASE("never leaves [phi_set, phi_0]") {
    double phi = shape.phi_0;
    for (int i = 0; i < 100000; ++i) {
      phi = transition_filter_step(phi, shape, 0.0, 0.5);
      CHECK(phi >= shape.phi_set);
      CHECK(phi <= shape.phi_0);
    }
  }
}

TEST_CASE("arc gap between aircraft and target elevations") {
  Vec3 a(std::cos(deg2rad(40)), 0, std::sin(deg2rad(40)));
  Vec3 t(std::cos(deg2rad(30)), 0.3, 0.0);
  t.z() = std::sqrt(std::max(0.0, 1 - t.squaredNorm()));  // arbitrary
  SUBCASE("same vector gives zero") { CHECK(arc_gap(a, a) == doctest::Approx(0.0)); }
  SUBCASE("forced difference of elevations") {
    Vec3 tgt(std::cos(deg2rad(30)), 0, std::sin(deg2rad(30)));
    CHECK(arc_gap(a, tgt) == doctest::Approx(deg2rad(10)).epsilon(1e-12));
  }
  SUBCASE("zenith resolves to pi/2") {
    CHECK(elevation_angle(Vec3(0, 0, 2.0)) == doctest::Approx(kPi / 2));
  }
}

TEST_CASE("retraction trigger") {
  TetherSchedule lengths;
  lengths.l_min = 250;
  lengths.l_trigger = 380;
  lengths.l_hard = 420;
  lengths.l_initial = 300;

  CHECK_FALSE(retraction_trigger(true, 300.0, -1.0, lengths));
  CHECK_FALSE(retraction_trigger(false, 400.0, -1.0, lengths));
  CHECK(retraction_trigger(true, 380.0, -1.0, lengths));
  // Early trigger: next half eight would overshoot the hard bound.
  CHECK(retraction_trigger(true, 415.0, 8.0, lengths));
  CHECK_FALSE(retraction_trigger(true, 300.0, 8.0, lengths));
}

TEST_CASE("attitude set points from the flight path inversion") {
  AircraftParams aircraft;
  GuidanceGains gains;

  SUBCASE("level flight without tether load") {
    double v = 30;
    AttitudeSetpoints asp = attitude_setpoints(0, 0, 0, 0, v, v, Vec3(300, 0, -100),
                                               0.0, aircraft, gains);
    CHECK(asp.f_y_m == doctest::Approx(0.0));
    CHECK(asp.f_z_m == doctest::Approx(aircraft.mass * aircraft.gravity));
    CHECK(asp.mu_set == doctest::Approx(0.0));
    double qbarS = 0.5 * aircraft.rho * v * v * aircraft.S_w;
    CHECK(asp.C_L_set ==
          doctest::Approx(aircraft.mass * aircraft.gravity / qbarS).epsilon(1e-12));
  }

  SUBCASE("downwind at zero elevation the set-point force is radial") {
    double v = 30;
    AttitudeSetpoints asp = attitude_setpoints(0, 0, 0, 0, v, v, Vec3(300, 0, 0),
                                               100.0, aircraft, gains);
    // M_KO(0,0) is the identity; the tether pull maps to -x_K only.
    CHECK(asp.f_y_m == doctest::Approx(0.0));
    CHECK(asp.f_z_m == doctest::Approx(aircraft.mass * aircraft.gravity).epsilon(1e-12));
  }

  SUBCASE("positive course-rate demand banks to the right") {
    double v = 30;
    AttitudeSetpoints asp = attitude_setpoints(0.3, 0, 0, 0, v, v, Vec3(300, 0, -100),
                                               0.0, aircraft, gains);
    CHECK(asp.mu_set > 0.0);
  }

  SUBCASE("the angle of attack clamp flags saturation") {
    // High elevation and a full tether load demand more lift than the band
    // allows at this airspeed.
    double v = 20;
    AttitudeSetpoints asp = attitude_setpoints(0, 0, 0, 0, v, v, Vec3(180, 0, -240),
                                               2000.0, aircraft, gains);
    CHECK(asp.clamped);
    CHECK(asp.alpha_set <= gains.alpha_max + 1e-12);
  }
}

TEST_CASE("M_KO maps the velocity onto x_K") {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    double chi = (rng.uniform() - 0.5) * 2 * kPi;
    double gamma = (rng.uniform() - 0.5) * 1.2;
    double v = 10 + 30 * rng.uniform();
    Vec3 v_O(v * std::cos(gamma) * std::cos(chi), v * std::cos(gamma) * std::sin(chi),
             -v * std::sin(gamma));
    Vec3 v_K = M_KO(chi, gamma) * v_O;
    CHECK(v_K.x() == doctest::Approx(v).epsilon(1e-9));
    CHECK(std::abs(v_K.y()) < 1e-9);
    CHECK(std::abs(v_K.z()) < 1e-9);
  }
}
