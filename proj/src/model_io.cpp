#include "phsic/model_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

namespace phsic {

namespace {

constexpr char kMagic[4] = {'P', 'H', 'S', 'C'};
constexpr std::uint32_t kFormatVersion = 1;

std::array<std::uint32_t, 256> make_crc_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int k = 0; k < 8; ++k) {
      c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
    }
    table[i] = c;
  }
  return table;
}

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
  }
  void vec(const Eigen::VectorXd& v) {
    u64(static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) f64(v(i));
  }
  template <typename Derived>
  void mat(const Eigen::MatrixBase<Derived>& m) {
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) f64(m(i, j));
    }
  }
  const std::vector<std::uint8_t>& bytes() const { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size, std::string path)
      : data_(data), size_(size), path_(std::move(path)) {}

  std::uint8_t u8() { return take(1)[0]; }
  std::uint32_t u32() {
    const std::uint8_t* p = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    const std::uint8_t* p = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    std::uint32_t len = u32();
    const std::uint8_t* p = take(len);
    return std::string(reinterpret_cast<const char*>(p), len);
  }
  Eigen::VectorXd vec() {
    std::uint64_t size = u64();
    check_count(size);
    Eigen::VectorXd v(static_cast<Eigen::Index>(size));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = f64();
    return v;
  }
  template <typename M>
  M mat() {
    std::uint64_t rows = u64();
    std::uint64_t cols = u64();
    if (cols != 0 && rows > UINT64_MAX / cols) {
      fail(ErrorKind::corrupt_model, path_ + ": corrupt size field");
    }
    check_count(rows * cols);
    M m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = f64();
    }
    return m;
  }

 private:
  const std::uint8_t* take(std::size_t count) {
    if (pos_ + count > size_) {
      fail(ErrorKind::corrupt_model, path_ + ": truncated model file");
    }
    const std::uint8_t* p = data_ + pos_;
    pos_ += count;
    return p;
  }
  void check_count(std::uint64_t count) {
    if (count > (size_ - pos_) / 8) {
      fail(ErrorKind::corrupt_model, path_ + ": corrupt size field");
    }
  }

  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
  std::string path_;
};

void write_factor(Writer& w, const IcdFactor& f) {
  w.u64(static_cast<std::uint64_t>(f.rank()));
  w.u64(static_cast<std::uint64_t>(f.pivot_points.cols()));
  for (Eigen::Index p : f.pivots) w.u64(static_cast<std::uint64_t>(p));
  w.vec(f.pivot_diag);
  w.mat(f.pivot_rows);
  w.mat(f.pivot_points);
  w.f64(f.residual_trace);
  w.str(f.spec.to_string());
}

IcdFactor read_factor(Reader& r) {
  IcdFactor f;
  std::uint64_t rank = r.u64();
  std::uint64_t dim = r.u64();
  (void)dim;
  f.pivots.resize(rank);
  for (auto& p : f.pivots) p = static_cast<Eigen::Index>(r.u64());
  f.pivot_diag = r.vec();
  f.pivot_rows = r.mat<Eigen::MatrixXd>();
  f.pivot_points = r.mat<RowMatrix>();
  f.residual_trace = r.f64();
  f.spec = KernelSpec::parse(r.str());
  return f;
}

}  // namespace

std::uint32_t crc32(const unsigned char* data, std::size_t len) {
  static const std::array<std::uint32_t, 256> table = make_crc_table();
  std::uint32_t c = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < len; ++i) {
    c = table[(c ^ data[i]) & 0xFF] ^ (c >> 8);
  }
  return c ^ 0xFFFFFFFFu;
}

void save_model(const SavedModel& saved, const std::string& path) {
  Writer payload;
  payload.str(saved.kernel_x.to_string());
  payload.str(saved.kernel_y.to_string());
  payload.u8(static_cast<std::uint8_t>((saved.normalized_inputs ? 1 : 0) |
                                       (saved.lowercased ? 2 : 0)));

  if (const auto* fm = std::get_if<FeatureModel>(&saved.model)) {
    payload.u64(static_cast<std::uint64_t>(fm->mean_x.size()));
    payload.u64(static_cast<std::uint64_t>(fm->mean_y.size()));
    payload.u8(static_cast<std::uint8_t>(fm->map_x));
    payload.u8(static_cast<std::uint8_t>(fm->map_y));
    payload.u64(fm->n_train);
    payload.vec(fm->mean_x);
    payload.vec(fm->mean_y);
    payload.mat(fm->cov_xy);
  } else if (const auto* im = std::get_if<IcdModel>(&saved.model)) {
    payload.u64(static_cast<std::uint64_t>(im->factor_x.rank()));
    payload.u64(static_cast<std::uint64_t>(im->factor_y.rank()));
    payload.u64(im->n_train);
    write_factor(payload, im->factor_x);
    write_factor(payload, im->factor_y);
    payload.vec(im->mean_a);
    payload.vec(im->mean_b);
    payload.mat(im->c_icd);
  } else {
    const auto& nm = std::get<NaiveModel>(saved.model);
    payload.u64(static_cast<std::uint64_t>(nm.x_points.cols()));
    payload.u64(static_cast<std::uint64_t>(nm.y_points.cols()));
    payload.u64(nm.n_train);
    payload.mat(nm.x_points);
    payload.mat(nm.y_points);
    payload.vec(nm.means_x.col_means);
    payload.vec(nm.means_y.col_means);
    payload.f64(nm.means_x.grand_mean);
    payload.f64(nm.means_y.grand_mean);
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write model file: " + path);
  Writer header;
  header.u32(kFormatVersion);
  header.u8(static_cast<std::uint8_t>(saved.kind()));
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(header.bytes().data()),
            static_cast<std::streamsize>(header.bytes().size()));
  out.write(reinterpret_cast<const char*>(payload.bytes().data()),
            static_cast<std::streamsize>(payload.bytes().size()));
  Writer tail;
  tail.u32(crc32(payload.bytes().data(), payload.bytes().size()));
  out.write(reinterpret_cast<const char*>(tail.bytes().data()), 4);
  if (!out) fail(ErrorKind::io, "write failed: " + path);
}

SavedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open model file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());

  // 4 magic + 4 version + 1 kind + payload + 4 crc
  if (bytes.size() < 13 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    fail(ErrorKind::corrupt_model, path + ": not a model file");
  }
  Reader head(bytes.data() + 4, 5, path);
  std::uint32_t version = head.u32();
  if (version != kFormatVersion) {
    fail(ErrorKind::corrupt_model, path + ": unsupported format version " + std::to_string(version));
  }
  std::uint8_t kind = head.u8();

  const std::uint8_t* payload = bytes.data() + 9;
  std::size_t payload_size = bytes.size() - 13;
  std::uint32_t stored_crc = 0;
  for (int i = 0; i < 4; ++i) {
    stored_crc |= static_cast<std::uint32_t>(bytes[bytes.size() - 4 + static_cast<std::size_t>(i)])
                  << (8 * i);
  }
  if (crc32(payload, payload_size) != stored_crc) {
    fail(ErrorKind::corrupt_model, path + ": checksum mismatch");
  }

  Reader r(payload, payload_size, path);
  SavedModel saved;
  saved.kernel_x = KernelSpec::parse(r.str());
  saved.kernel_y = KernelSpec::parse(r.str());
  std::uint8_t flags = r.u8();
  saved.normalized_inputs = (flags & 1) != 0;
  saved.lowercased = (flags & 2) != 0;

  if (kind == static_cast<std::uint8_t>(SavedModel::Kind::feature)) {
    r.u64();  // d_x
    r.u64();  // d_y
    FeatureModel fm;
    fm.map_x = static_cast<FeatureMap>(r.u8());
    fm.map_y = static_cast<FeatureMap>(r.u8());
    fm.n_train = r.u64();
    fm.mean_x = r.vec();
    fm.mean_y = r.vec();
    fm.cov_xy = r.mat<Eigen::MatrixXd>();
    saved.model = std::move(fm);
  } else if (kind == static_cast<std::uint8_t>(SavedModel::Kind::icd)) {
    r.u64();  // d_x
    r.u64();  // d_y
    IcdModel im;
    im.n_train = r.u64();
    im.factor_x = read_factor(r);
    im.factor_y = read_factor(r);
    im.mean_a = r.vec();
    im.mean_b = r.vec();
    im.c_icd = r.mat<Eigen::MatrixXd>();
    saved.model = std::move(im);
  } else if (kind == static_cast<std::uint8_t>(SavedModel::Kind::naive)) {
    r.u64();
    r.u64();
    NaiveModel nm;
    nm.n_train = r.u64();
    nm.x_points = r.mat<RowMatrix>();
    nm.y_points = r.mat<RowMatrix>();
    nm.means_x.col_means = r.vec();
    nm.means_y.col_means = r.vec();
    nm.means_x.grand_mean = r.f64();
    nm.means_y.grand_mean = r.f64();
    nm.spec_x = saved.kernel_x;
    nm.spec_y = saved.kernel_y;
    saved.model = std::move(nm);
  } else {
    fail(ErrorKind::corrupt_model, path + ": unknown estimator kind");
  }
  return saved;
}

}  // namespace phsic
