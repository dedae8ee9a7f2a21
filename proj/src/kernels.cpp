#include "phsic/kernels.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace phsic {

namespace {

double parse_number(std::string_view text, const std::string& what) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    fail(ErrorKind::parameter, "kernel spec: bad " + what + " '" + std::string(text) + "'");
  }
  return value;
}

// Splits "A,B" at the top-level comma, respecting nested parentheses.
std::pair<std::string, std::string> split_pair(std::string_view inner) {
  int depth = 0;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    char c = inner[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      return {std::string(inner.substr(0, i)), std::string(inner.substr(i + 1))};
    }
  }
  fail(ErrorKind::parameter, "kernel spec: composite needs two comma-separated children");
}

}  // namespace

KernelSpec KernelSpec::Linear() {
  KernelSpec s;
  s.family = KernelFamily::linear;
  return s;
}

KernelSpec KernelSpec::Cosine() {
  KernelSpec s;
  s.family = KernelFamily::cosine;
  return s;
}

KernelSpec KernelSpec::Rbf(double sigma) {
  if (!(sigma > 0.0)) fail(ErrorKind::parameter, "rbf kernel: sigma must be > 0");
  KernelSpec s;
  s.family = KernelFamily::rbf;
  s.sigma = sigma;
  return s;
}

KernelSpec KernelSpec::Laplacian(double gamma) {
  if (!(gamma > 0.0)) fail(ErrorKind::parameter, "laplacian kernel: gamma must be > 0");
  KernelSpec s;
  s.family = KernelFamily::laplacian;
  s.gamma = gamma;
  return s;
}

KernelSpec KernelSpec::Polynomial(int degree, double offset) {
  if (degree < 1) fail(ErrorKind::parameter, "polynomial kernel: degree must be >= 1");
  if (offset < 0.0) fail(ErrorKind::parameter, "polynomial kernel: offset must be >= 0");
  KernelSpec s;
  s.family = KernelFamily::polynomial;
  s.degree = degree;
  s.offset = offset;
  return s;
}

KernelSpec KernelSpec::Sum(KernelSpec a, KernelSpec b) {
  KernelSpec s;
  s.family = KernelFamily::sum;
  s.children.push_back(std::move(a));
  s.children.push_back(std::move(b));
  return s;
}

KernelSpec KernelSpec::Product(KernelSpec a, KernelSpec b) {
  KernelSpec s;
  s.family = KernelFamily::product;
  s.children.push_back(std::move(a));
  s.children.push_back(std::move(b));
  return s;
}

KernelSpec KernelSpec::parse(const std::string& text) {
  std::string_view sv = text;
  if (sv == "cos" || sv == "cosine") return Cosine();
  if (sv == "linear") return Linear();
  if (sv == "rbf") return Rbf(1.0);
  if (sv.rfind("rbf:", 0) == 0) return Rbf(parse_number(sv.substr(4), "sigma"));
  if (sv.rfind("laplacian:", 0) == 0) return Laplacian(parse_number(sv.substr(10), "gamma"));
  if (sv.rfind("poly:", 0) == 0) {
    std::string_view rest = sv.substr(5);
    std::size_t colon = rest.find(':');
    if (colon == std::string_view::npos) {
      fail(ErrorKind::parameter, "kernel spec: poly needs poly:DEGREE:OFFSET");
    }
    double degree = parse_number(rest.substr(0, colon), "degree");
    if (degree != std::floor(degree)) {
      fail(ErrorKind::parameter, "polynomial kernel: degree must be an integer");
    }
    return Polynomial(static_cast<int>(degree), parse_number(rest.substr(colon + 1), "offset"));
  }
  bool is_sum = sv.rfind("sum(", 0) == 0;
  bool is_prod = sv.rfind("prod(", 0) == 0;
  if ((is_sum || is_prod) && sv.back() == ')') {
    std::string_view inner = sv.substr(is_sum ? 4 : 5);
    inner.remove_suffix(1);
    auto [left, right] = split_pair(inner);
    KernelSpec a = parse(left);
    KernelSpec b = parse(right);
    return is_sum ? Sum(std::move(a), std::move(b)) : Product(std::move(a), std::move(b));
  }
  fail(ErrorKind::parameter, "unknown kernel spec '" + text + "'");
}

std::string KernelSpec::to_string() const {
  char buf[64];
  switch (family) {
    case KernelFamily::linear:
      return "linear";
    case KernelFamily::cosine:
      return "cos";
    case KernelFamily::rbf:
      std::snprintf(buf, sizeof buf, "rbf:%.17g", sigma);
      return buf;
    case KernelFamily::laplacian:
      std::snprintf(buf, sizeof buf, "laplacian:%.17g", gamma);
      return buf;
    case KernelFamily::polynomial:
      std::snprintf(buf, sizeof buf, "poly:%d:%.17g", degree, offset);
      return buf;
    case KernelFamily::sum:
      return "sum(" + children[0].to_string() + "," + children[1].to_string() + ")";
    case KernelFamily::product:
      return "prod(" + children[0].to_string() + "," + children[1].to_string() + ")";
  }
  return "?";
}

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& u,
                   const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (u.size() != v.size()) {
    fail(ErrorKind::dimension, "kernel_eval: vector lengths differ (" +
                                   std::to_string(u.size()) + " vs " + std::to_string(v.size()) + ")");
  }
  switch (spec.family) {
    case KernelFamily::linear:
      return u.dot(v);
    case KernelFamily::cosine: {
      double nu = u.norm();
      double nv = v.norm();
      if (nu == 0.0 || nv == 0.0) return 0.0;
      return u.dot(v) / (nu * nv);
    }
    case KernelFamily::rbf:
      return std::exp(-(u - v).squaredNorm() / (2.0 * spec.sigma * spec.sigma));
    case KernelFamily::laplacian:
      return std::exp(-spec.gamma * (u - v).lpNorm<1>());
    case KernelFamily::polynomial:
      return std::pow(u.dot(v) + spec.offset, spec.degree);
    case KernelFamily::sum:
      return kernel_eval(spec.children[0], u, v) + kernel_eval(spec.children[1], u, v);
    case KernelFamily::product:
      return kernel_eval(spec.children[0], u, v) * kernel_eval(spec.children[1], u, v);
  }
  fail(ErrorKind::parameter, "kernel_eval: bad family");
}

GramMatrix gram(const KernelSpec& spec, const RowMatrix& points) {
  if (points.rows() == 0) fail(ErrorKind::parameter, "gram: empty point set");
  Eigen::Index n = points.rows();
  Eigen::MatrixXd values(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (Eigen::Index j = static_cast<Eigen::Index>(i); j < n; ++j) {
        values(static_cast<Eigen::Index>(i), j) =
            kernel_eval(spec, points.row(static_cast<Eigen::Index>(i)).transpose(),
                        points.row(j).transpose());
      }
    }
  });
  // Mirror the upper triangle for exact symmetry.
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) values(i, j) = values(j, i);
  }
  return GramMatrix{std::move(values), spec};
}

GramMeans gram_means(const KernelSpec& spec, const RowMatrix& points) {
  if (points.rows() == 0) fail(ErrorKind::parameter, "gram_means: empty point set");
  Eigen::Index n = points.rows();
  Eigen::VectorXd col_means(n);
  // By symmetry the column mean of column i equals the mean of row i, so each
  // slot can be filled from its own row without materializing the Gram.
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto xi = points.row(static_cast<Eigen::Index>(i)).transpose();
      NeumaierSum row_sum;
      for (Eigen::Index j = 0; j < n; ++j) {
        row_sum.add(kernel_eval(spec, xi, points.row(j).transpose()));
      }
      col_means(static_cast<Eigen::Index>(i)) = row_sum.value() / static_cast<double>(n);
    }
  });
  NeumaierSum grand;
  for (Eigen::Index i = 0; i < n; ++i) grand.add(col_means(i));
  return GramMeans{std::move(col_means), grand.value() / static_cast<double>(n)};
}

Eigen::VectorXd kernel_column(const KernelSpec& spec, const RowMatrix& points,
                              const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::Index n = points.rows();
  Eigen::VectorXd col(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    col(j) = kernel_eval(spec, x, points.row(j).transpose());
  }
  return col;
}

Eigen::VectorXd centered_kernel_vector(const KernelSpec& spec,
                                       const Eigen::Ref<const Eigen::VectorXd>& x,
                                       const RowMatrix& points, const GramMeans& means) {
  Eigen::VectorXd col = kernel_column(spec, points, x);
  NeumaierSum sum;
  for (Eigen::Index j = 0; j < col.size(); ++j) sum.add(col(j));
  double col_mean = sum.value() / static_cast<double>(col.size());
  return (col.array() - col_mean - means.col_means.array() + means.grand_mean).matrix();
}

}  // namespace phsic
