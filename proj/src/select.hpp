#pragma once

#include "common.hpp"
#include "svm.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace awekit {

struct ConfusionCounts {
  long tp = 0, tn = 0, fp = 0, fn = 0;  // positive class = upset (y = -1)

  void add(int truth, int predicted) {
    if (truth == -1 && predicted == -1) ++tp;
    else if (truth == 1 && predicted == 1) ++tn;
    else if (truth == 1 && predicted == -1) ++fp;
    else ++fn;
  }
};

// Matthews correlation coefficient; any zero factor in the denominator maps
// to 0.
double mcc(const ConfusionCounts& c);

// Fold index per row; class-stratified, deterministic in the seed. Throws if
// any fold would miss a class.
std::vector<int> stratified_folds(const std::vector<int>& y, int folds,
                                  std::uint64_t seed);

// Mean of per-fold MCCs for an SVM on the given feature columns.
double cross_val_mcc(const MatX& X, const std::vector<int>& y,
                     const std::vector<int>& feature_cols,
                     const std::vector<int>& fold_of,
                     const SvmTrainConfig& cfg);

struct SelectionConfig {
  int folds = 10;
  std::vector<double> sigma2_rel = {0.5, 1.0, 2.0};  // times selected-feature count
  std::vector<double> c_grid = {10.0};
  double kkt_tol = 1e-3;
  long max_iterations = 2000000;
  double stop_rel_improvement = 1e-4;
  std::uint64_t seed = 1;
  int workers = 0;
};

struct SelectionResult {
  std::vector<int> selected;           // schema indices, selection order
  std::vector<double> cumulative_mcc;  // mean CV MCC after each round
  double best_sigma2 = 1.0;            // absolute sigma^2 of the final round
  double best_C = 10.0;
};

// Greedy forward feature selection maximizing mean cross-validated MCC, with
// a coarse hyperparameter grid evaluated per candidate. Ties break toward the
// lower schema index. Stops when the relative MCC improvement falls below
// stop_rel_improvement.
SelectionResult greedy_forward_select(const MatX& X, const std::vector<int>& y,
                                      const SelectionConfig& cfg);

ConfusionCounts evaluate_confusion_full(const SvmModel& model, const MatX& X_full,
                                        const std::vector<int>& y);

}  // namespace awekit
