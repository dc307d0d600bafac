#include "predictor.hpp"

#include <algorithm>
#include <set>

namespace awekit {

int threshold_predict(double g_value, double q_star) {
  return g_value >= q_star ? -1 : 1;
}

namespace {

double sample_field(const SignalSample& s, const std::string& name) {
  if (name == "v_w_x_W") return s.v_w_x_W;
  if (name == "v_w_y_W") return s.v_w_y_W;
  if (name == "v_w_z_W") return s.v_w_z_W;
  if (name == "a_z_tau") return s.a_z_tau;
  if (name == "F_t") return s.F_t;
  if (name == "alpha") return s.alpha;
  if (name == "e_p") return s.e_p;
  throw std::runtime_error("predictor: unknown signal " + name);
}

}  // namespace

SvmInloopPredictor::SvmInloopPredictor(SvmModel model, const SegmentationConfig& seg)
    : model_(std::move(model)), seg_(seg) {
  seg_.validate();
  buffers_.resize(seg_.signals.size());

  // The model references features as "<signal>.<feature>"; only the signals
  // it actually uses get evaluated per tick.
  const std::size_t per = per_signal_feature_names().size();
  std::set<int> needed;
  std::vector<std::string> schema = feature_schema(seg_.signals);
  for (const auto& name : model_.feature_names) {
    auto it = std::find(schema.begin(), schema.end(), name);
    if (it == schema.end())
      throw std::runtime_error("predictor: model feature not in schema: " + name);
    needed.insert(static_cast<int>((it - schema.begin()) / per));
  }
  needed_signals_.assign(needed.begin(), needed.end());

  // feature_indices must match the schema of the configured signals.
  for (std::size_t i = 0; i < model_.feature_names.size(); ++i) {
    int idx = model_.feature_indices[i];
    if (idx < 0 || idx >= static_cast<int>(schema.size()) ||
        schema[idx] != model_.feature_names[i])
      throw std::runtime_error("predictor: model schema mismatch at " +
                               model_.feature_names[i]);
  }
}

void SvmInloopPredictor::reset() {
  for (auto& b : buffers_) b.clear();
  last_decision_ = 0;
}

int SvmInloopPredictor::predict(const SignalSample& s) {
  const std::size_t W = static_cast<std::size_t>(seg_.window_samples());
  for (std::size_t i = 0; i < seg_.signals.size(); ++i) {
    buffers_[i].push_back(sample_field(s, seg_.signals[i]));
    if (buffers_[i].size() > W) buffers_[i].pop_front();
  }
  if (buffers_.empty() || buffers_[0].size() < W) return 1;

  const std::size_t per = per_signal_feature_names().size();
  VecX full = VecX::Zero(static_cast<Eigen::Index>(per * seg_.signals.size()));
  std::vector<double> x(W);
  for (int sig : needed_signals_) {
    std::copy(buffers_[sig].begin(), buffers_[sig].end(), x.begin());
    std::vector<double> f = signal_features(x, seg_.f_s);
    for (std::size_t k = 0; k < per; ++k)
      full[static_cast<Eigen::Index>(sig * per + k)] = f[k];
  }
  last_decision_ = model_.decision_full(full);
  return SvmModel::classify(last_decision_);
}

}  // namespace awekit
