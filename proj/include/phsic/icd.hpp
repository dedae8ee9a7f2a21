#pragma once

#include "phsic/kernels.hpp"

#include <optional>
#include <vector>

namespace phsic {

// Low-rank factor A (n x d) with A A^T ~= K, produced by greedy pivoted
// incomplete Cholesky. Pivot rows and pivot input points are retained so new
// points can be folded in without the training set.
struct IcdFactor {
  Eigen::MatrixXd a;                 // n x d
  std::vector<Eigen::Index> pivots;  // training indices in selection order
  Eigen::VectorXd pivot_diag;        // divisors A_jj = a(pivots[j], j)
  Eigen::MatrixXd pivot_rows;        // d x d, row j = a.row(pivots[j]); lower triangular
  RowMatrix pivot_points;            // d x dim pivot inputs
  KernelSpec spec;
  double residual_trace = 0.0;       // trace of K - A A^T at stop

  Eigen::Index rank() const { return pivot_diag.size(); }
};

// Greedy pivoted incomplete Cholesky. Each step selects the largest residual
// diagonal and appends one column; only the diagonal plus one kernel column
// per step is ever formed, never the full Gram. Stops at max_rank, when the
// residual trace falls to tol (default 1e-9 times the initial trace), or when
// the best remaining pivot is numerically zero.
IcdFactor icd_factorize(const RowMatrix& points, const KernelSpec& spec, Eigen::Index max_rank,
                        std::optional<double> tol = std::nullopt);

// Out-of-sample factor row for x:
//   a[j] = (k(x, pivot_j) - sum_{m<j} a[m] * pivot_rows(j, m)) / pivot_diag[j]
// Applied to a training point this reproduces its row of A.
Eigen::VectorXd icd_extend(const IcdFactor& factor, const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace phsic
