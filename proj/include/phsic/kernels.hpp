#pragma once

#include "phsic/common.hpp"

#include <string>
#include <vector>

namespace phsic {

enum class KernelFamily : std::uint8_t {
  linear,
  cosine,
  rbf,
  laplacian,
  polynomial,
  sum,
  product,
};

// Declarative description of a positive-definite kernel: a family plus its
// hyperparameters. Sums and products of positive-definite kernels are again
// positive definite, so specs compose into finite trees.
struct KernelSpec {
  KernelFamily family = KernelFamily::cosine;
  double sigma = 1.0;   // rbf bandwidth, > 0
  double gamma = 1.0;   // laplacian decay, > 0
  int degree = 2;       // polynomial degree, >= 1
  double offset = 1.0;  // polynomial offset, >= 0
  std::vector<KernelSpec> children;  // exactly two for sum/product

  static KernelSpec Linear();
  static KernelSpec Cosine();
  static KernelSpec Rbf(double sigma = 1.0);
  static KernelSpec Laplacian(double gamma);
  static KernelSpec Polynomial(int degree, double offset);
  static KernelSpec Sum(KernelSpec a, KernelSpec b);
  static KernelSpec Product(KernelSpec a, KernelSpec b);

  // Grammar: cos | linear | rbf[:SIGMA] | laplacian:GAMMA | poly:DEGREE:OFFSET
  // plus sum(A,B) / prod(A,B) for composites. to_string() round-trips.
  static KernelSpec parse(const std::string& text);
  std::string to_string() const;

  // True when the kernel admits an explicit feature map (linear or cosine).
  bool feature_space_compatible() const {
    return family == KernelFamily::linear || family == KernelFamily::cosine;
  }
};

// Single kernel evaluation. Cosine with a zero-vector operand is 0 by policy,
// so all-OOV sentences flow through scoring.
double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& u,
                   const Eigen::Ref<const Eigen::VectorXd>& v);

struct GramMatrix {
  Eigen::MatrixXd values;
  KernelSpec spec;
};

// Dense Gram matrix; the upper triangle is computed and mirrored so the result
// is exactly symmetric.
GramMatrix gram(const KernelSpec& spec, const RowMatrix& points);

// Column means and grand mean of the training Gram, computed one row at a
// time (O(n) space, compensated sums).
struct GramMeans {
  Eigen::VectorXd col_means;
  double grand_mean = 0.0;
};
GramMeans gram_means(const KernelSpec& spec, const RowMatrix& points);

// k(x, x_i) for all training points.
Eigen::VectorXd kernel_column(const KernelSpec& spec, const RowMatrix& points,
                              const Eigen::Ref<const Eigen::VectorXd>& x);

// Centered-kernel estimate against the training sample:
//   entry i = k(x,x_i) - (1/n) sum_j k(x,x_j) - (1/n) sum_j k(x_j,x_i)
//             + (1/n^2) sum_{j,j'} k(x_j,x_j')
// The result always sums to zero.
Eigen::VectorXd centered_kernel_vector(const KernelSpec& spec,
                                       const Eigen::Ref<const Eigen::VectorXd>& x,
                                       const RowMatrix& points, const GramMeans& means);

}  // namespace phsic
