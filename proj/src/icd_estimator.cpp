#include "phsic/icd_estimator.hpp"

namespace phsic {

IcdModel fit_icd(const PairedDataset& ds, const KernelSpec& kernel_x, const KernelSpec& kernel_y,
                 Eigen::Index max_rank, std::optional<double> tol) {
  if (!ds.embedded()) fail(ErrorKind::parameter, "fit_icd: dataset is not embedded");
  Eigen::Index n = ds.x_vecs.rows();
  if (n < 2) fail(ErrorKind::insufficient_data, "fit_icd: need at least 2 pairs");

  IcdModel model;
  Eigen::Index rank = std::min(max_rank, n);
  model.factor_x = icd_factorize(ds.x_vecs, kernel_x, rank, tol);
  model.factor_y = icd_factorize(ds.y_vecs, kernel_y, rank, tol);

  double inv_n = 1.0 / static_cast<double>(n);
  model.mean_a = model.factor_x.a.colwise().sum().transpose() * inv_n;
  model.mean_b = model.factor_y.a.colwise().sum().transpose() * inv_n;
  Eigen::MatrixXd centered_a = model.factor_x.a.rowwise() - model.mean_a.transpose();
  model.c_icd = (centered_a.transpose() * model.factor_y.a) * inv_n;
  model.n_train = static_cast<std::uint64_t>(n);
  return model;
}

double score_icd(const IcdModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                 const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.size() != model.factor_x.pivot_points.cols() ||
      y.size() != model.factor_y.pivot_points.cols()) {
    fail(ErrorKind::dimension, "score_icd: vector dims do not match the model");
  }
  Eigen::VectorXd a = icd_extend(model.factor_x, x) - model.mean_a;
  Eigen::VectorXd b = icd_extend(model.factor_y, y) - model.mean_b;
  return a.dot(model.c_icd * b);
}

std::vector<double> score_icd_batch(const IcdModel& model, const PairedDataset& ds) {
  std::size_t n = static_cast<std::size_t>(ds.x_vecs.rows());
  std::vector<double> scores(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      scores[i] = score_icd(model, ds.x_vecs.row(static_cast<Eigen::Index>(i)).transpose(),
                            ds.y_vecs.row(static_cast<Eigen::Index>(i)).transpose());
    }
  });
  return scores;
}

}  // namespace phsic
