#pragma once

#include "common.hpp"

#include <cstdint>
#include <vector>

namespace awekit {

// Synthetic minority oversampling: each synthetic vector interpolates between
// a random minority member and one of its k nearest minority neighbors, with
// neighbors ranked by Mahalanobis distance under the supplied covariance.
// The covariance is regularized on the diagonal before inversion.
MatX smote_oversample(const MatX& minority, int k, int target_count,
                      const MatX& covariance, std::uint64_t seed);

// Pairwise Mahalanobis k-nearest-neighbor indices within one class (exposed
// for tests).
std::vector<std::vector<int>> mahalanobis_knn(const MatX& points, int k,
                                              const MatX& covariance);

}  // namespace awekit
