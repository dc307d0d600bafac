#pragma once

#include "config.hpp"
#include "runlog.hpp"

#include <memory>

namespace awekit {

// Named reduction of a run to a scalar closeness-to-upset value; larger means
// closer to the upset, which occurs at g >= g_star.
struct LimitFunction {
  std::string name = "tether_force_max";
  double g_star = 2000.0;
  double invalid_penalty = 500.0;

  static LimitFunction from_config(const LimitParams& p) {
    return {p.name, p.g_star, p.invalid_penalty};
  }
};

// Scalar limit value of a finished run. Invalid runs map above g_star by the
// configured penalty so they are treated as failures downstream.
double evaluate_limit(const RunLog& log, const LimitFunction& lf);

// Time-averaged winch power over a completed cycle, kW.
double average_cycle_power(const RunLog& log);

// Per-tick signal sample available to an in-loop predictor.
struct SignalSample {
  double t = 0;
  double v_w_x_W = 0, v_w_y_W = 0, v_w_z_W = 0;
  double a_z_tau = 0;
  double F_t = 0;
  double alpha = 0;
  double e_p = 0;
};

class InloopPredictor {
 public:
  virtual ~InloopPredictor() = default;
  virtual void reset() = 0;
  // +1 nominal, -1 upset ahead.
  virtual int predict(const SignalSample& sample) = 0;
};

// Runs one complete pumping cycle from a noise seed vector. Deterministic in
// (theta, config); the predictor, when given, feeds the avoidance logic.
RunLog run_pumping_cycle(const NoiseSeedVector& theta, const CampaignConfig& config,
                         InloopPredictor* predictor = nullptr);

struct SimulateResult {
  double g = 0;
  bool valid = true;
  RunOutcome outcome = RunOutcome::Completed;
};

// theta -> limit value, the composition subset simulation evaluates.
SimulateResult simulate_limit(const VecX& theta, const CampaignConfig& config,
                              InloopPredictor* predictor = nullptr);

// Trimmed initial condition on the traction path (exposed for tests).
struct TrimResult {
  PlantState plant;
  GuidanceState guidance;
};
TrimResult trim_on_path(const CampaignConfig& config);

}  // namespace awekit
