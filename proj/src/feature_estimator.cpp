#include "phsic/feature_estimator.hpp"

namespace phsic {

namespace {

constexpr Eigen::Index kBlockRows = 512;

FeatureMap map_for(const KernelSpec& spec) {
  switch (spec.family) {
    case KernelFamily::linear:
      return FeatureMap::identity;
    case KernelFamily::cosine:
      return FeatureMap::normalized;
    default:
      fail(ErrorKind::estimator_mismatch,
           "feature estimator supports linear/cos kernels only; use --estimator icd for '" +
               spec.to_string() + "'");
  }
}

Eigen::VectorXd apply_map(FeatureMap map, const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (map == FeatureMap::identity) return v;
  double norm = v.norm();
  if (norm == 0.0) return Eigen::VectorXd::Zero(v.size());
  return v / norm;
}

}  // namespace

FeatureModel fit_feature(const PairedDataset& ds, const KernelSpec& kernel_x,
                         const KernelSpec& kernel_y) {
  FeatureModel model;
  model.map_x = map_for(kernel_x);
  model.map_y = map_for(kernel_y);

  if (!ds.embedded()) fail(ErrorKind::parameter, "fit_feature: dataset is not embedded");
  Eigen::Index n = ds.x_vecs.rows();
  if (n < 2) fail(ErrorKind::insufficient_data, "fit_feature: need at least 2 pairs");
  Eigen::Index dx = ds.x_vecs.cols();
  Eigen::Index dy = ds.y_vecs.cols();

  // Block sums merged with compensated accumulation keep the long reductions
  // accurate while the per-block work stays a dense product.
  CompensatedArraySum sum_x(dx, 1), sum_y(dy, 1), cross(dx, dy);
  for (Eigen::Index start = 0; start < n; start += kBlockRows) {
    Eigen::Index rows = std::min(kBlockRows, n - start);
    RowMatrix bx = ds.x_vecs.middleRows(start, rows);
    RowMatrix by = ds.y_vecs.middleRows(start, rows);
    if (model.map_x == FeatureMap::normalized) normalize_rows(bx);
    if (model.map_y == FeatureMap::normalized) normalize_rows(by);
    sum_x.add(bx.colwise().sum().transpose().array());
    sum_y.add(by.colwise().sum().transpose().array());
    cross.add((bx.transpose() * by).array());
  }

  double inv_n = 1.0 / static_cast<double>(n);
  model.mean_x = sum_x.value() * inv_n;
  model.mean_y = sum_y.value() * inv_n;
  model.cov_xy = cross.value() * inv_n - model.mean_x * model.mean_y.transpose();
  model.n_train = static_cast<std::uint64_t>(n);
  return model;
}

double score_feature(const FeatureModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                     const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.size() != model.mean_x.size() || y.size() != model.mean_y.size()) {
    fail(ErrorKind::dimension, "score_feature: vector dims do not match the model");
  }
  Eigen::VectorXd xd = apply_map(model.map_x, x) - model.mean_x;
  Eigen::VectorXd yd = apply_map(model.map_y, y) - model.mean_y;
  return xd.dot(model.cov_xy * yd);
}

std::vector<double> score_feature_batch(const FeatureModel& model, const PairedDataset& ds) {
  std::size_t n = static_cast<std::size_t>(ds.x_vecs.rows());
  std::vector<double> scores(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      scores[i] = score_feature(model, ds.x_vecs.row(static_cast<Eigen::Index>(i)).transpose(),
                                ds.y_vecs.row(static_cast<Eigen::Index>(i)).transpose());
    }
  });
  return scores;
}

}  // namespace phsic
