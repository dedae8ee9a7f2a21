#include "phsic/icd.hpp"

#include <cmath>

namespace phsic {

IcdFactor icd_factorize(const RowMatrix& points, const KernelSpec& spec, Eigen::Index max_rank,
                        std::optional<double> tol) {
  Eigen::Index n = points.rows();
  if (n == 0) fail(ErrorKind::parameter, "icd_factorize: empty point set");
  if (max_rank < 1 || max_rank > n) {
    fail(ErrorKind::parameter, "icd_factorize: max_rank must be in [1, n]");
  }

  Eigen::VectorXd diag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto xi = points.row(i).transpose();
    diag(i) = kernel_eval(spec, xi, xi);
  }
  double initial_trace = diag.sum();
  double scale = std::max(1.0, diag.maxCoeff());
  double trace_tol = tol.value_or(1e-9 * initial_trace);
  // Pivot guard scaled to the kernel's diagonal magnitude; for unit-diagonal
  // kernels (rbf, cosine) this is the plain 1e-12 cutoff.
  double pivot_guard = 1e-12 * std::max(diag.maxCoeff(), 0.0);
  double breakdown = -1e-9 * scale;

  Eigen::MatrixXd a(n, max_rank);
  std::vector<Eigen::Index> pivots;
  pivots.reserve(static_cast<std::size_t>(max_rank));
  double trace = initial_trace;

  Eigen::Index d = 0;
  while (d < max_rank && trace > trace_tol) {
    Eigen::Index p = 0;
    diag.maxCoeff(&p);
    if (diag(p) <= pivot_guard) break;  // numerically exhausted; emit achieved rank

    double piv = std::sqrt(diag(p));
    Eigen::VectorXd col = kernel_column(spec, points, points.row(p).transpose());
    if (d > 0) col.noalias() -= a.leftCols(d) * a.row(p).head(d).transpose();
    a.col(d) = col / piv;

    diag.array() -= a.col(d).array().square();
    diag(p) = 0.0;
    double min_diag = diag.minCoeff();
    if (min_diag < breakdown) {
      fail(ErrorKind::factorization,
           "icd_factorize: residual diagonal went negative (" + std::to_string(min_diag) +
               ") at step " + std::to_string(d + 1));
    }
    diag = diag.cwiseMax(0.0);
    trace = diag.sum();
    pivots.push_back(p);
    ++d;
  }

  IcdFactor factor;
  factor.a = a.leftCols(d);
  factor.pivots = std::move(pivots);
  factor.pivot_diag.resize(d);
  factor.pivot_rows = Eigen::MatrixXd::Zero(d, d);
  factor.pivot_points.resize(d, points.cols());
  for (Eigen::Index j = 0; j < d; ++j) {
    Eigen::Index p = factor.pivots[static_cast<std::size_t>(j)];
    factor.pivot_diag(j) = factor.a(p, j);
    factor.pivot_rows.row(j).head(j + 1) = factor.a.row(p).head(j + 1);
    factor.pivot_points.row(j) = points.row(p);
  }
  factor.spec = spec;
  factor.residual_trace = trace;
  return factor;
}

Eigen::VectorXd icd_extend(const IcdFactor& factor, const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::Index d = factor.rank();
  Eigen::VectorXd a(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double v = kernel_eval(factor.spec, x, factor.pivot_points.row(j).transpose());
    if (j > 0) v -= a.head(j).dot(factor.pivot_rows.row(j).head(j).transpose());
    a(j) = v / factor.pivot_diag(j);
  }
  return a;
}

}  // namespace phsic
