#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rng.hpp"
#include "windfield.hpp"

#include <cmath>
#include <complex>

using namespace awekit;

TEST_CASE("shear speed follows the clamped power law") {
  ShearProfile p;
  p.v_ref = 10;
  p.z_ref = 100;
  p.exponent = 0.15;
  p.z_floor = 10;
  CHECK(shear_speed(p, 100.0) == doctest::Approx(10.0));

  ShearProfile half = p;
  half.exponent = 0.5;
  CHECK(shear_speed(half, 400.0) == doctest::Approx(20.0));

  // Below the floor the evaluation clamps to z_floor.
  CHECK(shear_speed(p, 1.0) == doctest::Approx(10.0 * std::pow(0.1, 0.15)).epsilon(1e-6));
  CHECK(shear_speed(p, 1.0) == doctest::Approx(7.0795).epsilon(1e-3));

  CHECK_THROWS_AS(shear_speed(p, std::nan("")), std::domain_error);
}

TEST_CASE("dryden zero input stays at zero and decays from any state") {
  DrydenParams dp;
  DrydenState st = make_dryden(dp, 0.1);
  for (int i = 0; i < 100; ++i) {
    Vec3 g = st.step(0, 0, 0);
    CHECK(g.norm() == 0.0);
  }
  // Nonzero state decays under zero input.
  st.u.x1 = 1.0;
  st.v.x1 = 1.0;
  st.v.x2 = 0.5;
  double prev = 1e300;
  for (int i = 0; i < 2000; ++i) {
    Vec3 g = st.step(0, 0, 0);
    (void)g;
  }
  prev = std::abs(st.u.x1) + std::abs(st.v.x1) + std::abs(st.v.x2);
  CHECK(prev < 1e-6);
}

TEST_CASE("dryden determinism and linearity in the seed") {
  DrydenParams dp;
  NoiseSeedVector theta = draw_noise(42, 30.0, 10.0);
  ShearProfile shear;
  WindField a(shear, dp, theta);
  WindField b(shear, dp, theta);
  for (int k = 0; k < theta.steps(); ++k) {
    CHECK(a.gust_at_step(k).x() == b.gust_at_step(k).x());
    CHECK(a.gust_at_step(k).y() == b.gust_at_step(k).y());
    CHECK(a.gust_at_step(k).z() == b.gust_at_step(k).z());
  }
  NoiseSeedVector scaled = theta;
  scaled.samples *= 3.0;
  WindField c(shear, dp, scaled);
  for (int k = 0; k < theta.steps(); ++k) {
    CHECK(c.gust_at_step(k).x() ==
          doctest::Approx(3.0 * a.gust_at_step(k).x()).epsilon(1e-12));
    CHECK(c.gust_at_step(k).z() ==
          doctest::Approx(3.0 * a.gust_at_step(k).z()).epsilon(1e-12));
  }
}

TEST_CASE("dryden stationary variance matches the discrete Lyapunov solution") {
  DrydenParams dp;
  dp.sigma_u = 1.0;
  dp.sigma_v = 1.3;
  dp.sigma_w = 0.7;
  DrydenState st = make_dryden(dp, 0.1);
  // Normalization puts the analytic stationary variance at sigma^2 exactly.
  CHECK(st.u.stationary_variance() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(st.v.stationary_variance() == doctest::Approx(1.69).epsilon(1e-9));
  CHECK(st.w.stationary_variance() == doctest::Approx(0.49).epsilon(1e-9));

  const int n = 1000000;
  Rng rng(7);
  double sum = 0, sumsq = 0, sumv = 0, sumsqv = 0;
  for (int i = 0; i < n; ++i) {
    Vec3 g = st.step(rng.normal(), rng.normal(), rng.normal());
    sum += g.x();
    sumsq += g.x() * g.x();
    sumv += g.y();
    sumsqv += g.y() * g.y();
  }
  double var_u = sumsq / n - (sum / n) * (sum / n);
  double var_v = sumsqv / n - (sumv / n) * (sumv / n);
  CHECK(var_u == doctest::Approx(1.0).epsilon(0.05));
  CHECK(var_v == doctest::Approx(1.69).epsilon(0.05));
}

TEST_CASE("wind_at superimposes gust on the mean profile") {
  ShearProfile p;
  p.v_ref = 10;
  p.z_ref = 100;
  p.exponent = 0.15;
  Vec3 w = wind_at(p, Vec3::Zero(), 100.0);
  CHECK(w.x() == doctest::Approx(10.0));
  CHECK(w.y() == 0.0);
  CHECK(w.z() == 0.0);

  // Additivity at a point where the shear term is exactly 10.
  Vec3 w2 = wind_at(p, Vec3(1, -2, 0.5), 100.0);
  CHECK(w2.x() == doctest::Approx(11.0));
  CHECK(w2.y() == doctest::Approx(-2.0));
  CHECK(w2.z() == doctest::Approx(0.5));

  // Below z_floor the shear term uses z_floor.
  CHECK(wind_at(p, Vec3::Zero(), 1.0).x() == doctest::Approx(shear_speed(p, p.z_floor)));
}

TEST_CASE("noise dimension covers the horizon at the sample rate") {
  CHECK(noise_dimension(300.0, 10.0) == 9000);
  CHECK(noise_dimension(0.05, 10.0) == 3);
  NoiseSeedVector t = draw_noise(1, 12.3, 10.0);
  CHECK(t.samples.size() == noise_dimension(12.3, 10.0));
  CHECK(t.steps() == 123);
}

TEST_CASE("u-channel periodogram matches the analytic spectrum shape") {
  DrydenParams dp;
  dp.sigma_u = 1.0;
  const double dt = 0.1;
  const double T = dp.L_u / dp.transit_speed;  // 8 s
  DrydenState st = make_dryden(dp, dt);

  const int seg = 16384, nseg = 48;
  std::vector<double> x(seg);
  Rng rng(99);

  // Average periodograms over segments at a handful of frequencies spanning
  // one decade around the corner frequency 1/T.
  std::vector<double> freqs_hz;
  double fc = 1.0 / (2.0 * kPi * T);
  for (int i = 0; i < 8; ++i)
    freqs_hz.push_back(fc * std::pow(10.0, -0.5 + i / 7.0));
  std::vector<double> psd(freqs_hz.size(), 0.0);

  // warm up past the transient
  for (int i = 0; i < 1000; ++i) st.step(rng.normal(), 0, 0);

  for (int s = 0; s < nseg; ++s) {
    for (int i = 0; i < seg; ++i) x[i] = st.step(rng.normal(), 0, 0).x();
    for (std::size_t f = 0; f < freqs_hz.size(); ++f) {
      double w = 2.0 * kPi * freqs_hz[f] * dt;
      std::complex<double> acc(0, 0);
      for (int i = 0; i < seg; ++i)
        acc += x[i] * std::exp(std::complex<double>(0, -w * i));
      psd[f] += 2.0 * std::norm(acc) / (seg / dt);
    }
  }
  for (auto& v : psd) v /= nseg;

  for (std::size_t f = 0; f < freqs_hz.size(); ++f) {
    double wf = 2.0 * kPi * freqs_hz[f];
    double analytic = 4.0 * dp.sigma_u * dp.sigma_u * T / (1.0 + wf * wf * T * T);
    double ratio = psd[f] / analytic;
    INFO("f=", freqs_hz[f], " ratio=", ratio);
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
  }
}
