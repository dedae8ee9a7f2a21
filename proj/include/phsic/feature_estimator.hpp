#pragma once

#include "phsic/dataset.hpp"
#include "phsic/kernels.hpp"

#include <vector>

namespace phsic {

// Explicit feature map of the fitted kernel: identity for the linear kernel,
// length normalization for cosine. The model stores the map kind so scoring
// never touches the kernel code path.
enum class FeatureMap : std::uint8_t { identity = 0, normalized = 1 };

// Fitted feature-space model: mean feature vectors and the cross-covariance
//   C = (1/n) sum_i phi(x_i) psi(y_i)^T - mean_x mean_y^T.
struct FeatureModel {
  FeatureMap map_x = FeatureMap::identity;
  FeatureMap map_y = FeatureMap::identity;
  Eigen::VectorXd mean_x, mean_y;
  Eigen::MatrixXd cov_xy;
  std::uint64_t n_train = 0;
};

// One pass over the data, O(n d_x d_y) time. Only linear/cosine kernels admit
// explicit maps; anything else must go through the ICD estimator.
FeatureModel fit_feature(const PairedDataset& ds, const KernelSpec& kernel_x,
                         const KernelSpec& kernel_y);

// (phi(x) - mean_x)^T C (psi(y) - mean_y); O(d_x d_y), independent of n.
double score_feature(const FeatureModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                     const Eigen::Ref<const Eigen::VectorXd>& y);

std::vector<double> score_feature_batch(const FeatureModel& model, const PairedDataset& ds);

}  // namespace phsic
