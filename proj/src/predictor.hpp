#pragma once

#include "closedloop.hpp"
#include "features.hpp"
#include "svm.hpp"

#include <deque>

namespace awekit {

// y_hat = -1 (upset ahead) iff the current limit-function value reaches q*.
int threshold_predict(double g_value, double q_star);

// Fixed-threshold predictor on the measured tether force.
class ThresholdPredictor : public InloopPredictor {
 public:
  explicit ThresholdPredictor(double q_star) : q_star_(q_star) {}
  void reset() override {}
  int predict(const SignalSample& s) override {
    return threshold_predict(s.F_t, q_star_);
  }
  double q_star() const { return q_star_; }

 private:
  double q_star_;
};

// Serves a trained model at the control rate from rolling signal windows.
// Emits +1 until the first full window is available.
class SvmInloopPredictor : public InloopPredictor {
 public:
  SvmInloopPredictor(SvmModel model, const SegmentationConfig& seg);
  void reset() override;
  int predict(const SignalSample& s) override;
  double last_decision() const { return last_decision_; }

 private:
  SvmModel model_;
  SegmentationConfig seg_;
  std::vector<std::deque<double>> buffers_;   // one per configured signal
  std::vector<int> needed_signals_;           // indices into seg_.signals
  double last_decision_ = 0;
};

}  // namespace awekit
