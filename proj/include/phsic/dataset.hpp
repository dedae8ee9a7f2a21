#pragma once

#include "phsic/common.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace phsic {

// Word-vector table loaded from text format: optional "<count> <dim>" header,
// then one "<token> <v1> ... <vdim>" row per word.
struct EmbeddingTable {
  Eigen::Index dim = 0;
  std::unordered_map<std::string, Eigen::VectorXd> entries;
  std::size_t duplicate_count = 0;  // later occurrences of a token are dropped
};

EmbeddingTable load_embeddings(const std::string& path,
                               std::optional<Eigen::Index> expected_dim = std::nullopt);

// Whitespace splitting; lowercasing is opt-in (ASCII only).
std::vector<std::string> tokenize(std::string_view text, bool lowercase = false);

// Sum of the word vectors of in-vocabulary tokens. Out-of-vocabulary tokens
// are skipped; an empty or all-OOV sentence yields the zero vector.
Eigen::VectorXd encode_sentence(std::span<const std::string> tokens, const EmbeddingTable& table);

// Aligned sample of (x, y) pairs, as raw text columns and/or embedded rows.
struct PairedDataset {
  std::vector<std::string> x_text, y_text;  // empty for purely vector data
  RowMatrix x_vecs, y_vecs;                 // one row per pair once embedded
  std::size_t skipped_blank = 0;

  std::size_t n() const {
    return x_text.empty() ? static_cast<std::size_t>(x_vecs.rows()) : x_text.size();
  }
  bool has_text() const { return !x_text.empty(); }
  bool embedded() const { return x_vecs.rows() > 0 && x_vecs.cols() > 0; }

  static PairedDataset from_vectors(RowMatrix x, RowMatrix y);
};

// Pair file: UTF-8, one pair per line, exactly one TAB between the columns.
// Blank lines are skipped and tallied.
PairedDataset load_pairs(const std::string& path);

// Inverse of load_pairs for well-formed input (x TAB y LF).
void save_pairs(const PairedDataset& ds, const std::string& path);

struct EmbedStats {
  std::size_t zero_x = 0;
  std::size_t zero_y = 0;
  std::size_t zero_pairs = 0;  // pairs with a zero vector on either side
};

// Encodes every pair with the sum-of-word-vectors encoder. Zero vectors are
// retained; kernels define their behavior.
PairedDataset embed_dataset(PairedDataset ds, const EmbeddingTable& table_x,
                            const EmbeddingTable& table_y, bool lowercase = false,
                            EmbedStats* stats = nullptr);

// Scales every embedded row to unit length (zero rows stay zero).
void normalize_rows(RowMatrix& m);

}  // namespace phsic
