#pragma once

#include "phsic/dataset.hpp"
#include "phsic/kernels.hpp"

#include <vector>

namespace phsic {

// Reference data-space estimator. O(n^2) to fit, O(n) per score; it is the
// ground-truth oracle for the fast estimators, not a production path.
struct NaiveModel {
  RowMatrix x_points, y_points;
  KernelSpec spec_x, spec_y;
  GramMeans means_x, means_y;
  std::uint64_t n_train = 0;
};

NaiveModel fit_naive(const PairedDataset& ds, const KernelSpec& kernel_x,
                     const KernelSpec& kernel_y);

// (1/n) sum_i ck(x,x_i) cl(y,y_i) with ck, cl the centered kernel vectors.
double score_naive(const NaiveModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y);

std::vector<double> score_naive_batch(const NaiveModel& model, const PairedDataset& ds);

// Mean in-sample score; equals the trace-form empirical value
// (1/n^2) tr(HKHL). ds must be the fit set.
double hsic_empirical(const NaiveModel& model, const PairedDataset& ds);

}  // namespace phsic
