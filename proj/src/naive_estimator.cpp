#include "phsic/naive_estimator.hpp"

namespace phsic {

NaiveModel fit_naive(const PairedDataset& ds, const KernelSpec& kernel_x,
                     const KernelSpec& kernel_y) {
  if (!ds.embedded()) fail(ErrorKind::parameter, "fit_naive: dataset is not embedded");
  if (ds.x_vecs.rows() < 2) fail(ErrorKind::insufficient_data, "fit_naive: need at least 2 pairs");

  NaiveModel model;
  model.x_points = ds.x_vecs;
  model.y_points = ds.y_vecs;
  model.spec_x = kernel_x;
  model.spec_y = kernel_y;
  model.means_x = gram_means(kernel_x, model.x_points);
  model.means_y = gram_means(kernel_y, model.y_points);
  model.n_train = static_cast<std::uint64_t>(ds.x_vecs.rows());
  return model;
}

double score_naive(const NaiveModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y) {
  Eigen::VectorXd cx = centered_kernel_vector(model.spec_x, x, model.x_points, model.means_x);
  Eigen::VectorXd cy = centered_kernel_vector(model.spec_y, y, model.y_points, model.means_y);
  return cx.dot(cy) / static_cast<double>(model.n_train);
}

std::vector<double> score_naive_batch(const NaiveModel& model, const PairedDataset& ds) {
  std::size_t n = static_cast<std::size_t>(ds.x_vecs.rows());
  std::vector<double> scores(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      scores[i] = score_naive(model, ds.x_vecs.row(static_cast<Eigen::Index>(i)).transpose(),
                              ds.y_vecs.row(static_cast<Eigen::Index>(i)).transpose());
    }
  });
  return scores;
}

double hsic_empirical(const NaiveModel& model, const PairedDataset& ds) {
  if (static_cast<std::uint64_t>(ds.x_vecs.rows()) != model.n_train) {
    fail(ErrorKind::parameter, "hsic_empirical: dataset is not the fit set");
  }
  std::vector<double> scores = score_naive_batch(model, ds);
  NeumaierSum sum;
  for (double s : scores) sum.add(s);
  return sum.value() / static_cast<double>(model.n_train);
}

}  // namespace phsic
