#include "phsic/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>

namespace phsic {

namespace {

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool parse_double(std::string_view text, double& out) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

bool parse_positive_int(std::string_view text, long long& out) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size() && out > 0;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, bool lowercase) {
  std::vector<std::string> tokens;
  for (std::string_view f : split_ws(text)) {
    std::string t(f);
    if (lowercase) {
      std::transform(t.begin(), t.end(), t.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    }
    tokens.push_back(std::move(t));
  }
  return tokens;
}

EmbeddingTable load_embeddings(const std::string& path, std::optional<Eigen::Index> expected_dim) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open embeddings file: " + path);

  EmbeddingTable table;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;

  auto check_dim = [&](Eigen::Index dim) {
    if (expected_dim && *expected_dim != dim) {
      fail(ErrorKind::dimension, path + ": embedding dim " + std::to_string(dim) +
                                     " does not match expected " + std::to_string(*expected_dim));
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (is_blank(line)) continue;
    auto fields = split_ws(line);

    if (first_content) {
      first_content = false;
      // "<count> <dim>" header: exactly two positive integers.
      if (fields.size() == 2) {
        long long count = 0, dim = 0;
        if (parse_positive_int(fields[0], count) && parse_positive_int(fields[1], dim)) {
          table.dim = static_cast<Eigen::Index>(dim);
          check_dim(table.dim);
          continue;
        }
      }
    }

    if (table.dim == 0) {
      if (fields.size() < 2) {
        fail(ErrorKind::parse, path + ":" + std::to_string(line_no) + ": embedding row needs a token and at least one value");
      }
      table.dim = static_cast<Eigen::Index>(fields.size()) - 1;
      check_dim(table.dim);
    }

    if (static_cast<Eigen::Index>(fields.size()) != table.dim + 1) {
      fail(ErrorKind::parse, path + ":" + std::to_string(line_no) + ": expected " +
                                 std::to_string(table.dim + 1) + " fields, got " +
                                 std::to_string(fields.size()));
    }
    Eigen::VectorXd vec(table.dim);
    for (Eigen::Index k = 0; k < table.dim; ++k) {
      double v = 0.0;
      if (!parse_double(fields[static_cast<std::size_t>(k) + 1], v)) {
        fail(ErrorKind::parse, path + ":" + std::to_string(line_no) + ": non-numeric value '" +
                                   std::string(fields[static_cast<std::size_t>(k) + 1]) + "'");
      }
      vec(k) = v;
    }
    std::string token(fields[0]);
    if (!table.entries.emplace(std::move(token), std::move(vec)).second) {
      ++table.duplicate_count;  // keep the first occurrence
    }
  }

  if (table.dim == 0) {
    if (expected_dim) {
      table.dim = *expected_dim;
    } else {
      fail(ErrorKind::parse, path + ": no rows and no header; cannot determine dimension");
    }
  }
  return table;
}

Eigen::VectorXd encode_sentence(std::span<const std::string> tokens, const EmbeddingTable& table) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(table.dim);
  for (const auto& tok : tokens) {
    auto it = table.entries.find(tok);
    if (it != table.entries.end()) sum += it->second;
  }
  return sum;
}

PairedDataset PairedDataset::from_vectors(RowMatrix x, RowMatrix y) {
  if (x.rows() != y.rows()) {
    fail(ErrorKind::dimension, "paired dataset: x and y row counts differ");
  }
  PairedDataset ds;
  ds.x_vecs = std::move(x);
  ds.y_vecs = std::move(y);
  return ds;
}

PairedDataset load_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open pair file: " + path);

  PairedDataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (is_blank(line)) {
      ++ds.skipped_blank;
      continue;
    }
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      fail(ErrorKind::parse,
           path + ":" + std::to_string(line_no) + ": expected exactly two TAB-separated columns");
    }
    ds.x_text.emplace_back(line.substr(0, tab));
    ds.y_text.emplace_back(line.substr(tab + 1));
  }
  return ds;
}

void save_pairs(const PairedDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write pair file: " + path);
  for (std::size_t i = 0; i < ds.x_text.size(); ++i) {
    out << ds.x_text[i] << '\t' << ds.y_text[i] << '\n';
  }
}

PairedDataset embed_dataset(PairedDataset ds, const EmbeddingTable& table_x,
                            const EmbeddingTable& table_y, bool lowercase, EmbedStats* stats) {
  if (stats) *stats = EmbedStats{};
  if (!ds.has_text()) return ds;  // nothing to encode; downstream fit rejects n = 0
  std::size_t n = ds.x_text.size();
  ds.x_vecs.resize(static_cast<Eigen::Index>(n), table_x.dim);
  ds.y_vecs.resize(static_cast<Eigen::Index>(n), table_y.dim);
  EmbedStats local;
  for (std::size_t i = 0; i < n; ++i) {
    auto xt = tokenize(ds.x_text[i], lowercase);
    auto yt = tokenize(ds.y_text[i], lowercase);
    Eigen::VectorXd xv = encode_sentence(xt, table_x);
    Eigen::VectorXd yv = encode_sentence(yt, table_y);
    bool zx = xv.isZero(0.0);
    bool zy = yv.isZero(0.0);
    if (zx) ++local.zero_x;
    if (zy) ++local.zero_y;
    if (zx || zy) ++local.zero_pairs;
    ds.x_vecs.row(static_cast<Eigen::Index>(i)) = xv.transpose();
    ds.y_vecs.row(static_cast<Eigen::Index>(i)) = yv.transpose();
  }
  if (stats) *stats = local;
  return ds;
}

void normalize_rows(RowMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double norm = m.row(i).norm();
    if (norm > 0.0) m.row(i) /= norm;
  }
}

}  // namespace phsic
