#include "select.hpp"

#include "rng.hpp"
#include "workpool.hpp"

#include <algorithm>
#include <cmath>

namespace awekit {

double mcc(const ConfusionCounts& c) {
  double tp = c.tp, tn = c.tn, fp = c.fp, fn = c.fn;
  double denom2 = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom2 <= 0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(denom2);
}

std::vector<int> stratified_folds(const std::vector<int>& y, int folds,
                                  std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("stratified_folds: need >= 2 folds");
  std::vector<int> pos, neg;
  for (std::size_t i = 0; i < y.size(); ++i)
    (y[i] == -1 ? neg : pos).push_back(static_cast<int>(i));
  if (pos.empty() || neg.empty())
    throw std::invalid_argument("stratified_folds: single-class dataset");
  if (static_cast<int>(pos.size()) < folds || static_cast<int>(neg.size()) < folds)
    throw std::invalid_argument(
        "stratified_folds: a class has fewer samples than folds");

  Rng rng(seed);
  auto shuffle = [&](std::vector<int>& v) {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[rng.below(i)]);
  };
  shuffle(pos);
  shuffle(neg);

  std::vector<int> fold_of(y.size(), 0);
  for (std::size_t i = 0; i < pos.size(); ++i) fold_of[pos[i]] = static_cast<int>(i % folds);
  for (std::size_t i = 0; i < neg.size(); ++i) fold_of[neg[i]] = static_cast<int>(i % folds);
  return fold_of;
}

double cross_val_mcc(const MatX& X, const std::vector<int>& y,
                     const std::vector<int>& feature_cols,
                     const std::vector<int>& fold_of,
                     const SvmTrainConfig& cfg) {
  int folds = 0;
  for (int f : fold_of) folds = std::max(folds, f + 1);

  MatX Xsel(X.rows(), static_cast<Eigen::Index>(feature_cols.size()));
  for (std::size_t j = 0; j < feature_cols.size(); ++j)
    Xsel.col(static_cast<Eigen::Index>(j)) = X.col(feature_cols[j]);

  double total = 0;
  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> train_rows, val_rows;
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      (fold_of[i] == f ? val_rows : train_rows).push_back(i);

    MatX Xtr(static_cast<Eigen::Index>(train_rows.size()), Xsel.cols());
    std::vector<int> ytr(train_rows.size());
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
      Xtr.row(static_cast<Eigen::Index>(i)) = Xsel.row(train_rows[i]);
      ytr[i] = y[train_rows[i]];
    }
    Standardizer st = Standardizer::fit(Xtr);
    SvmModel model = train_svm(st.apply(Xtr), ytr, cfg);

    ConfusionCounts counts;
    for (Eigen::Index i : val_rows) {
      VecX row = Xsel.row(i).transpose();
      double fhat = model.decision_standardized(st.apply(row));
      counts.add(y[i], SvmModel::classify(fhat));
    }
    total += mcc(counts);
  }
  return total / folds;
}

namespace {

// Best mean CV MCC over the hyperparameter grid for one candidate set.
struct GridScore {
  double mcc = -2.0;
  double sigma2 = 1.0;
  double C = 10.0;
};

GridScore grid_cv(const MatX& X, const std::vector<int>& y,
                  const std::vector<int>& cols, const std::vector<int>& fold_of,
                  const SelectionConfig& cfg) {
  GridScore best;
  for (double s_rel : cfg.sigma2_rel) {
    for (double C : cfg.c_grid) {
      SvmTrainConfig tc;
      tc.sigma2 = s_rel * static_cast<double>(cols.size());
      tc.C = C;
      tc.kkt_tol = cfg.kkt_tol;
      tc.max_iterations = cfg.max_iterations;
      double m = cross_val_mcc(X, y, cols, fold_of, tc);
      if (m > best.mcc) {
        best.mcc = m;
        best.sigma2 = tc.sigma2;
        best.C = C;
      }
    }
  }
  return best;
}

}  // namespace

SelectionResult greedy_forward_select(const MatX& X, const std::vector<int>& y,
                                      const SelectionConfig& cfg) {
  const int d = static_cast<int>(X.cols());
  std::vector<int> fold_of = stratified_folds(y, cfg.folds, cfg.seed);

  SelectionResult res;
  std::vector<bool> used(d, false);
  double prev_mcc = 0;

  for (int round = 0; round < d; ++round) {
    std::vector<int> candidates;
    for (int f = 0; f < d; ++f)
      if (!used[f]) candidates.push_back(f);

    auto eval = [&](std::size_t ci) -> GridScore {
      std::vector<int> cols = res.selected;
      cols.push_back(candidates[ci]);
      return grid_cv(X, y, cols, fold_of, cfg);
    };
    std::vector<GridScore> scores =
        parallel_map<GridScore>(candidates.size(), eval, cfg.workers);

    int best_idx = -1;
    GridScore best;
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
      if (scores[ci].mcc > best.mcc) {
        best = scores[ci];
        best_idx = candidates[ci];
      }
    }
    if (best_idx < 0) break;

    if (round > 0) {
      double rel = (best.mcc - prev_mcc) / std::max(std::abs(prev_mcc), 1e-12);
      if (rel < cfg.stop_rel_improvement) break;
    }
    res.selected.push_back(best_idx);
    used[best_idx] = true;
    res.cumulative_mcc.push_back(best.mcc);
    res.best_sigma2 = best.sigma2;
    res.best_C = best.C;
    prev_mcc = best.mcc;
  }
  if (res.selected.empty())
    throw std::runtime_error("greedy_forward_select: no feature could be selected");
  return res;
}

ConfusionCounts evaluate_confusion_full(const SvmModel& model, const MatX& X_full,
                                        const std::vector<int>& y) {
  ConfusionCounts counts;
  for (Eigen::Index i = 0; i < X_full.rows(); ++i) {
    double f = model.decision_full(X_full.row(i).transpose());
    counts.add(y[i], SvmModel::classify(f));
  }
  return counts;
}

}  // namespace awekit
