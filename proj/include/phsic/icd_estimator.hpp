#pragma once

#include "phsic/dataset.hpp"
#include "phsic/icd.hpp"

#include <vector>

namespace phsic {

// Fitted ICD model: per-side factors, factor-row means, and the cross matrix
//   C_icd = (1/n) (A - 1 a_bar^T)^T B
// Only the pivot machinery is needed for scoring; the full A/B matrices stay
// in memory after a fit for diagnostics but are not persisted.
struct IcdModel {
  IcdFactor factor_x, factor_y;
  Eigen::VectorXd mean_a, mean_b;  // column means of A and B
  Eigen::MatrixXd c_icd;           // d_x x d_y
  std::uint64_t n_train = 0;
};

// Factorizes both sides and forms C_icd by centering A with its column means
// (algebraically identical to applying the centering matrix, without the
// O(n^2) work). O(n d^2) time overall.
IcdModel fit_icd(const PairedDataset& ds, const KernelSpec& kernel_x, const KernelSpec& kernel_y,
                 Eigen::Index max_rank, std::optional<double> tol = std::nullopt);

// (a - a_bar)^T C_icd (b - b_bar) with a, b from icd_extend; O(d^2) plus d
// kernel evaluations per side.
double score_icd(const IcdModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                 const Eigen::Ref<const Eigen::VectorXd>& y);

std::vector<double> score_icd_batch(const IcdModel& model, const PairedDataset& ds);

}  // namespace phsic
