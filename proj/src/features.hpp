#pragma once

#include "common.hpp"
#include "config.hpp"
#include "runlog.hpp"

#include <string>
#include <vector>

namespace awekit {

struct SegmentationConfig {
  double window_s = 5.0;
  double stride_s = 0.5;
  double reaction_s = 0.2;
  double f_s = 10.0;
  std::vector<std::string> signals;

  int window_samples() const {
    return static_cast<int>(std::lround(window_s * f_s)) + 1;
  }
  int stride_samples() const {
    return std::max(1, static_cast<int>(std::lround(stride_s * f_s)));
  }
  int reaction_samples() const {
    return static_cast<int>(std::lround(reaction_s * f_s));
  }

  static SegmentationConfig from_params(const SegmentationParams& p, double f_s);
  void validate() const;
};

struct SignalSegment {
  MatX values;  // window_samples x signals
  int label = 1;
  std::string run_id;
  double end_time = 0;
};

struct SegmentationStats {
  int upset_segments = 0;
  int nominal_segments = 0;
  bool upset_window_missing = false;  // upset too early for a full window
};

// Sliding windows labeled per the reaction-time rule: in an upset run the
// window ending reaction_s before the first upset sample carries y = -1,
// every other window carries y = +1.
std::vector<SignalSegment> segment_and_label(const RunLog& log,
                                             const SegmentationConfig& cfg,
                                             SegmentationStats* stats = nullptr);

// Normalized third moment of lagged increments. tau must be a multiple of the
// sample period; a constant-increment signal maps to exactly +-1 (0 when the
// increments vanish).
double time_reversal_stat(const std::vector<double>& x, double tau_s, double f_s);

// Feature names per signal, in schema order.
const std::vector<std::string>& per_signal_feature_names();

// Ordered feature names for a signal list: "<signal>.<feature>".
std::vector<std::string> feature_schema(const std::vector<std::string>& signals);

// All per-signal features of one window (>= 8 samples).
std::vector<double> signal_features(const std::vector<double>& x, double f_s);

// Features of one segment in schema order.
VecX extract_features(const SignalSegment& segment, double f_s);

struct FeatureDataset {
  std::string schema_version = "fs1";
  std::vector<std::string> feature_names;
  MatX X;  // rows x features
  std::vector<int> y;
  std::vector<std::string> provenance;  // "real" or "synthetic"

  Eigen::Index size() const { return X.rows(); }
  void validate() const;
};

FeatureDataset build_dataset(const std::vector<SignalSegment>& segments,
                             const SegmentationConfig& cfg);

void write_features_csv(const std::string& path, const FeatureDataset& ds);
FeatureDataset read_features_csv(const std::string& path);

}  // namespace awekit
