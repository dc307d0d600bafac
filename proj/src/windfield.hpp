#pragma once

#include "common.hpp"

#include <cstdint>
#include <vector>

namespace awekit {

// Power-law mean wind profile along the x_W axis.
struct ShearProfile {
  double v_ref = 10.0;     // m/s at z_ref
  double z_ref = 100.0;    // m
  double exponent = 0.15;  // dimensionless
  double z_floor = 10.0;   // m, evaluation clamp

  void validate() const;
};

// Mean wind speed at altitude z (clamped below at z_floor).
double shear_speed(const ShearProfile& profile, double z);

struct DrydenParams {
  double transit_speed = 25.0;  // m/s, converts scale lengths to time constants
  double L_u = 200.0;           // m
  double L_v = 150.0;           // m
  double L_w = 50.0;            // m
  double sigma_u = 0.2;         // m/s
  double sigma_v = 0.2;         // m/s
  double sigma_w = 0.12;        // m/s

  void validate() const;
};

// One shaping filter channel, discretized exactly (zero-order hold) at dt.
// The output gain is normalized so the discrete stationary output variance
// equals sigma^2; the normalization constant comes from the discrete
// Lyapunov equation of (Ad, Bd).
struct DrydenChannel {
  // First order (u) uses only the first state; second order (v, w) uses both.
  int order = 1;
  double ad11 = 0, ad12 = 0, ad21 = 0, ad22 = 0;  // state transition
  double bd1 = 0, bd2 = 0;                        // held-input column
  double c1 = 0, c2 = 0;                          // output row (normalized)
  double x1 = 0, x2 = 0;                          // filter state

  double step(double noise);
  // Stationary output variance implied by (Ad, Bd, C); equals sigma^2 after
  // normalization. Exposed for tests.
  double stationary_variance() const;
};

struct DrydenState {
  DrydenChannel u, v, w;
  double dt = 0.1;  // s, 1/f_s

  // Advances all three channels with one noise sample each and returns the
  // gust vector in the W frame.
  Vec3 step(double nu, double nv, double nw);
};

DrydenState make_dryden(const DrydenParams& p, double dt);

// Fixed-length iid standard-normal sample driving one run's turbulence.
// Layout: interleaved per time step, (u_0, v_0, w_0, u_1, v_1, w_1, ...).
struct NoiseSeedVector {
  VecX samples;
  int channels = 3;
  double f_s = 10.0;  // Hz

  int steps() const { return static_cast<int>(samples.size()) / channels; }
  void validate() const;
};

// Dimension of theta for a simulation horizon: channels * ceil(T * f_s).
int noise_dimension(double t_sim, double f_s, int channels = 3);

NoiseSeedVector draw_noise(std::uint64_t seed, double t_sim, double f_s,
                           int channels = 3);

// Mean shear plus gust, in the W frame.
Vec3 wind_at(const ShearProfile& shear, const Vec3& gust, double z);

// Deterministic theta -> gust time series at f_s. Instances are value types;
// one generator per run.
class WindField {
 public:
  WindField(const ShearProfile& shear, const DrydenParams& dryden,
            const NoiseSeedVector& theta);

  // Gust sample for step k (0-based), held constant over the sample period.
  Vec3 gust_at_step(int k) const;
  Vec3 wind_at_altitude(int k, double z) const;
  const ShearProfile& shear() const { return shear_; }
  int steps() const { return static_cast<int>(gusts_.size()); }

 private:
  ShearProfile shear_;
  std::vector<Vec3> gusts_;
};

}  // namespace awekit
