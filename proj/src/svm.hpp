#pragma once

#include "common.hpp"

#include <string>
#include <vector>

namespace awekit {

// Per-feature z-score transform; constants are stored inside the model.
struct Standardizer {
  VecX mean;
  VecX scale;  // stddev, floored

  static Standardizer fit(const MatX& X);
  VecX apply(const VecX& x) const;
  MatX apply(const MatX& X) const;
};

struct SvmTrainConfig {
  double sigma2 = 1.0;
  double C = 10.0;
  double kkt_tol = 1e-3;
  long max_iterations = 2000000;
};

// Gaussian-kernel soft-margin classifier; only the support vectors
// (alpha > 0) are stored.
struct SvmModel {
  std::string schema_version = "svm1";
  double sigma2 = 1.0;
  double C = 10.0;
  double bias = 0.0;
  MatX support_vectors;        // m x d, standardized feature space
  VecX alpha;                  // m, strictly positive
  std::vector<int> labels;     // m, +-1
  std::vector<int> feature_indices;        // into the full schema
  std::vector<std::string> feature_names;  // matching feature_indices
  Standardizer standardizer;               // for the selected features
  std::string source_tag;                  // data provenance (training campaign)

  // Decision value for an already standardized, selected vector.
  double decision_standardized(const VecX& phi) const;
  // Raw selected-feature vector (selection already applied).
  double decision_selected(const VecX& phi_raw) const;
  // Full-schema raw vector: select, standardize, evaluate.
  double decision_full(const VecX& full_raw) const;
  static int classify(double f_hat) { return f_hat >= 0 ? 1 : -1; }

  std::string serialize() const;
  static SvmModel deserialize(const std::string& text);
  void write_file(const std::string& path) const;
  static SvmModel read_file(const std::string& path);
};

// Sequential pairwise optimization of the soft-margin dual on standardized
// data. X rows are training vectors, y entries +-1. Throws on
// non-convergence within max_iterations.
SvmModel train_svm(const MatX& X, const std::vector<int>& y,
                   const SvmTrainConfig& cfg);

// Largest KKT violation of a trained model on its training set (exposed for
// tests; <= kkt_tol after successful training).
double svm_kkt_violation(const MatX& X, const std::vector<int>& y,
                         const SvmModel& model, double C);

}  // namespace awekit
