#include "smote.hpp"

#include "rng.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <stdexcept>

namespace awekit {

namespace {

Eigen::LLT<MatX> regularized_cholesky(const MatX& covariance) {
  const Eigen::Index d = covariance.rows();
  if (covariance.cols() != d) throw std::invalid_argument("smote: covariance not square");
  if (!covariance.allFinite())
    throw std::runtime_error("smote: covariance has non-finite entries");
  MatX cov = covariance;
  double bump = 1e-8 * cov.trace() / static_cast<double>(d);
  if (!(bump > 0)) bump = 1e-8;
  cov.diagonal().array() += bump;
  Eigen::LLT<MatX> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("smote: covariance not positive definite after regularization");
  return llt;
}

}  // namespace

std::vector<std::vector<int>> mahalanobis_knn(const MatX& points, int k,
                                              const MatX& covariance) {
  const int n = static_cast<int>(points.rows());
  if (k < 1 || k >= n) throw std::invalid_argument("smote: need 1 <= k < point count");
  Eigen::LLT<MatX> llt = regularized_cholesky(covariance);

  // Whiten once; Mahalanobis distance becomes Euclidean distance.
  MatX white = llt.matrixL().solve(points.transpose()).transpose();

  std::vector<std::vector<int>> out(n);
  std::vector<std::pair<double, int>> dist(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      dist[j] = {j == i ? std::numeric_limits<double>::infinity()
                        : (white.row(i) - white.row(j)).squaredNorm(),
                 j};
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    out[i].reserve(k);
    for (int j = 0; j < k; ++j) out[i].push_back(dist[j].second);
  }
  return out;
}

MatX smote_oversample(const MatX& minority, int k, int target_count,
                      const MatX& covariance, std::uint64_t seed) {
  const int n = static_cast<int>(minority.rows());
  if (n < k + 1) throw std::invalid_argument("smote: minority count must exceed k");
  if (target_count < 0) throw std::invalid_argument("smote: negative target count");

  std::vector<std::vector<int>> nn = mahalanobis_knn(minority, k, covariance);

  MatX out(target_count, minority.cols());
  Rng rng(seed);
  for (int i = 0; i < target_count; ++i) {
    int base = static_cast<int>(rng.below(n));
    int pick = nn[base][static_cast<int>(rng.below(k))];
    double u = rng.uniform();
    out.row(i) = minority.row(base) + u * (minority.row(pick) - minority.row(base));
  }
  return out;
}

}  // namespace awekit
