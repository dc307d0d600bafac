#include "windfield.hpp"

#include "rng.hpp"

#include <cmath>

namespace awekit {

void ShearProfile::validate() const {
  if (!(v_ref >= 0)) throw ConfigError("wind.shear.v_ref_ms: must be >= 0");
  if (!(z_ref > 0)) throw ConfigError("wind.shear.z_ref_m: must be > 0");
  if (!(z_floor > 0)) throw ConfigError("wind.shear.z_floor_m: must be > 0");
  if (!std::isfinite(exponent)) throw ConfigError("wind.shear.exponent: must be finite");
}

double shear_speed(const ShearProfile& profile, double z) {
  if (!std::isfinite(z)) throw std::domain_error("shear_speed: non-finite altitude");
  double zc = z < profile.z_floor ? profile.z_floor : z;
  return profile.v_ref * std::pow(zc / profile.z_ref, profile.exponent);
}

void DrydenParams::validate() const {
  if (!(transit_speed > 0)) throw ConfigError("wind.dryden.transit_speed_ms: must be > 0");
  if (!(L_u > 0 && L_v > 0 && L_w > 0))
    throw ConfigError("wind.dryden.L_*: scale lengths must be > 0");
  if (!(sigma_u >= 0 && sigma_v >= 0 && sigma_w >= 0))
    throw ConfigError("wind.dryden.sigma_*: intensities must be >= 0");
}

double DrydenChannel::step(double noise) {
  if (!std::isfinite(noise)) throw std::domain_error("dryden_step: non-finite noise");
  double nx1 = ad11 * x1 + ad12 * x2 + bd1 * noise;
  double nx2 = ad21 * x1 + ad22 * x2 + bd2 * noise;
  x1 = nx1;
  x2 = nx2;
  return c1 * x1 + c2 * x2;
}

double DrydenChannel::stationary_variance() const {
  // Solve P = Ad P Ad' + Bd Bd' for the 2x2 symmetric P, then C P C'.
  // For order 1 the scalar case applies.
  if (order == 1) {
    double p = bd1 * bd1 / (1.0 - ad11 * ad11);
    return c1 * c1 * p;
  }
  // Unknowns (p11, p12, p22). Linear system from the Lyapunov identity.
  Eigen::Matrix3d M;
  Eigen::Vector3d q;
  M << 1 - ad11 * ad11, -2 * ad11 * ad12, -ad12 * ad12,
      -ad11 * ad21, 1 - ad11 * ad22 - ad12 * ad21, -ad12 * ad22,
      -ad21 * ad21, -2 * ad21 * ad22, 1 - ad22 * ad22;
  q << bd1 * bd1, bd1 * bd2, bd2 * bd2;
  Eigen::Vector3d p = M.fullPivLu().solve(q);
  return c1 * c1 * p[0] + 2 * c1 * c2 * p[1] + c2 * c2 * p[2];
}

namespace {

// First-order shaping filter 1/(1 + T s), ZOH at dt, output scaled so the
// stationary variance is sigma^2.
DrydenChannel make_first_order(double T, double sigma, double dt) {
  DrydenChannel ch;
  ch.order = 1;
  double a = std::exp(-dt / T);
  ch.ad11 = a;
  ch.bd1 = (1.0 - a) * T;  // ZOH of dx = -x/T + u
  ch.c1 = 1.0;
  double var = ch.stationary_variance();
  ch.c1 = sigma > 0 && var > 0 ? sigma / std::sqrt(var) : 0.0;
  return ch;
}

// Second-order shaping filter (1 + sqrt(3) T s)/(1 + T s)^2 in controllable
// canonical form, ZOH at dt, variance-normalized output.
DrydenChannel make_second_order(double T, double sigma, double dt) {
  DrydenChannel ch;
  ch.order = 2;
  double lam = -1.0 / T;
  // A = lam*I + N with N nilpotent; exp(A dt) = e^{lam dt} (I + N dt).
  double e = std::exp(lam * dt);
  double n11 = 1.0 / T, n12 = 1.0, n21 = -1.0 / (T * T), n22 = -1.0 / T;
  ch.ad11 = e * (1.0 + n11 * dt);
  ch.ad12 = e * (n12 * dt);
  ch.ad21 = e * (n21 * dt);
  ch.ad22 = e * (1.0 + n22 * dt);
  // Bd = (integral_0^dt exp(A tau) dtau) B with B = (0, 1)'.
  // integral e^{lam tau} dtau = (e-1)/lam; integral tau e^{lam tau} dtau:
  double i0 = (e - 1.0) / lam;
  double i1 = (dt * e) / lam - (e - 1.0) / (lam * lam);
  // exp(A tau) = e^{lam tau}(I + N tau): column applied to B picks (n12, 1 + n22 tau).
  ch.bd1 = n12 * i1;
  ch.bd2 = i0 + n22 * i1;
  ch.c1 = 1.0;
  ch.c2 = std::sqrt(3.0) * T;
  double var = ch.stationary_variance();
  if (sigma > 0 && var > 0) {
    double s = sigma / std::sqrt(var);
    ch.c1 *= s;
    ch.c2 *= s;
  } else {
    ch.c1 = ch.c2 = 0.0;
  }
  return ch;
}

}  // namespace

Vec3 DrydenState::step(double nu, double nv, double nw) {
  return Vec3(u.step(nu), v.step(nv), w.step(nw));
}

DrydenState make_dryden(const DrydenParams& p, double dt) {
  p.validate();
  DrydenState st;
  st.dt = dt;
  st.u = make_first_order(p.L_u / p.transit_speed, p.sigma_u, dt);
  st.v = make_second_order(p.L_v / p.transit_speed, p.sigma_v, dt);
  st.w = make_second_order(p.L_w / p.transit_speed, p.sigma_w, dt);
  return st;
}

void NoiseSeedVector::validate() const {
  if (channels <= 0) throw ConfigError("noise: channels must be > 0");
  if (samples.size() % channels != 0)
    throw ConfigError("noise: sample count not a multiple of channel count");
  if (!(f_s > 0)) throw ConfigError("noise: f_s must be > 0");
}

int noise_dimension(double t_sim, double f_s, int channels) {
  return channels * static_cast<int>(std::ceil(t_sim * f_s));
}

NoiseSeedVector draw_noise(std::uint64_t seed, double t_sim, double f_s, int channels) {
  NoiseSeedVector theta;
  theta.channels = channels;
  theta.f_s = f_s;
  int d = noise_dimension(t_sim, f_s, channels);
  theta.samples.resize(d);
  Rng rng(seed);
  for (int i = 0; i < d; ++i) theta.samples[i] = rng.normal();
  return theta;
}

Vec3 wind_at(const ShearProfile& shear, const Vec3& gust, double z) {
  if (!all_finite(gust)) throw std::domain_error("wind_at: non-finite gust");
  return Vec3(shear_speed(shear, z), 0.0, 0.0) + gust;
}

WindField::WindField(const ShearProfile& shear, const DrydenParams& dryden,
                     const NoiseSeedVector& theta)
    : shear_(shear) {
  shear_.validate();
  theta.validate();
  if (theta.channels != 3)
    throw ConfigError("wind field expects 3 noise channels (u, v, w)");
  DrydenState st = make_dryden(dryden, 1.0 / theta.f_s);
  int n = theta.steps();
  gusts_.reserve(n);
  for (int k = 0; k < n; ++k) {
    double nu = theta.samples[3 * k + 0];
    double nv = theta.samples[3 * k + 1];
    double nw = theta.samples[3 * k + 2];
    gusts_.push_back(st.step(nu, nv, nw));
  }
}

Vec3 WindField::gust_at_step(int k) const {
  if (gusts_.empty()) return Vec3::Zero();
  if (k < 0) k = 0;
  if (k >= static_cast<int>(gusts_.size())) k = static_cast<int>(gusts_.size()) - 1;
  return gusts_[k];
}

Vec3 WindField::wind_at_altitude(int k, double z) const {
  return wind_at(shear_, gust_at_step(k), z);
}

}  // namespace awekit
