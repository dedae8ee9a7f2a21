#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace phsic {

// Point sets are stored one row per item; row-major keeps each row contiguous
// so kernel evaluations can view rows without copying.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Error taxonomy. The CLI maps kinds onto exit codes:
// usage errors -> 1, data errors -> 2, numeric/factorization errors -> 3.
enum class ErrorKind {
  parameter,
  parse,
  dimension,
  insufficient_data,
  estimator_mismatch,
  factorization,
  corrupt_model,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

// Neumaier-compensated scalar sum.
class NeumaierSum {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Elementwise Neumaier accumulation of fixed-shape array partials. Feeding it
// bounded-size block sums keeps long accumulations accurate without giving up
// vectorized block arithmetic.
class CompensatedArraySum {
 public:
  CompensatedArraySum(Eigen::Index rows, Eigen::Index cols)
      : sum_(Eigen::ArrayXXd::Zero(rows, cols)), comp_(Eigen::ArrayXXd::Zero(rows, cols)) {}

  void add(const Eigen::ArrayXXd& v) {
    Eigen::ArrayXXd t = sum_ + v;
    comp_ += (sum_.abs() >= v.abs()).select((sum_ - t) + v, (v - t) + sum_);
    sum_ = t;
  }

  Eigen::MatrixXd value() const { return (sum_ + comp_).matrix(); }

 private:
  Eigen::ArrayXXd sum_;
  Eigen::ArrayXXd comp_;
};

// Worker cap: PHSIC_THREADS when set, else available parallelism.
inline std::size_t thread_cap() {
  if (const char* env = std::getenv("PHSIC_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs fn over disjoint [begin, end) chunks. Results must be written to
// per-index slots only, which keeps the outcome independent of partitioning.
inline void parallel_for(std::size_t count,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
  std::size_t workers = std::min(thread_cap(), count == 0 ? std::size_t{1} : count);
  if (workers <= 1 || count < 2 * workers) {
    fn(0, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t begin = w * chunk;
    std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

// Seeded generator with an unbiased bounded draw; mt19937_64 output is
// specified by the standard, so sequences are reproducible across platforms.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform draw from [0, bound) via rejection, no modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % bound;
  }

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

inline std::string format_score(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace phsic
