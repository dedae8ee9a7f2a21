#pragma once

#include "phsic/dataset.hpp"

#include <string>
#include <unordered_map>

namespace phsic {

enum class PmiKeyMode : std::uint8_t { surface = 0, token_set = 1 };

// Scored PMI value. A pair with unseen x or y is undefined; a seen-marginals
// pair with zero joint count is negative infinity. For ranking, both markers
// sort below every finite score, undefined lowest.
struct PmiScore {
  enum class Kind : std::uint8_t { finite, neg_inf, undef };
  Kind kind = Kind::undef;
  double value = 0.0;

  double rank_value() const;
  std::string to_string() const;  // finite value | "-inf" | "undef"
};

// Frequency tables for the counting estimator
//   pmi(x, y) = log( n c(x,y) / (c(x,.) c(.,y)) ).
struct PmiCountModel {
  PmiKeyMode key_mode = PmiKeyMode::surface;
  double add_k = 0.0;  // optional add-k smoothing over the observed key vocabularies
  std::unordered_map<std::string, std::uint64_t> pair_counts;  // key: x-key \t y-key
  std::unordered_map<std::string, std::uint64_t> x_counts, y_counts;
  std::uint64_t n = 0;
};

// Exact surface string, or the sorted token multiset joined by single spaces.
std::string pmi_key(const std::string& text, PmiKeyMode mode);

PmiCountModel fit_pmi(const PairedDataset& ds, PmiKeyMode mode = PmiKeyMode::surface,
                      double add_k = 0.0);

// Natural log. Returns markers rather than throwing so scores stay composable
// with the ranking harness.
PmiScore score_pmi(const PmiCountModel& model, const std::string& x_text,
                   const std::string& y_text);

}  // namespace phsic
