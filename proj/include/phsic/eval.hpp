#pragma once

#include "phsic/common.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace phsic {

// One multiple-choice question: a context index, m candidate y-indices, and
// the position of the true response among them.
struct RankingInstance {
  std::size_t context_index = 0;
  std::vector<std::size_t> candidates;
  std::size_t gold_position = 0;
};

struct MetricsReport {
  std::optional<double> roc_auc;  // filled by callers that have pos/neg pools
  double mrr = 0.0;
  std::map<int, double> recall_at;
  std::size_t n_instances = 0;
};

// For each pair i, draws m-1 distinct negative y-indices (!= i) and inserts
// the gold index at a seeded-random position. Fully deterministic given the
// seed.
std::vector<RankingInstance> make_negatives(std::size_t n_pairs, std::size_t m,
                                            std::uint64_t seed);

// Mann-Whitney statistic P(pos > neg) + 0.5 P(pos = neg). Computed from exact
// integer counts; roc_auc(a,b) + roc_auc(b,a) == 1 exactly.
double roc_auc(std::span<const double> pos, std::span<const double> neg);

// Rank of gold = 1 + #(strictly greater) + #(equal with smaller candidate
// index); MRR = mean(1/rank), Recall@k = fraction with rank <= k.
MetricsReport mrr_and_recall(const std::vector<RankingInstance>& instances,
                             const std::vector<std::vector<double>>& candidate_scores,
                             std::span<const int> ks);

// Spearman's rank correlation with average ranks for ties; nullopt when a
// sequence is constant.
std::optional<double> spearman_rho(std::span<const double> a, std::span<const double> b);

// Full ordering by descending score (ties by ascending index) plus the cut.
struct SelectionResult {
  std::vector<std::size_t> order;  // all indices, best first
  std::vector<double> sorted_scores;
  std::size_t k = 0;

  std::span<const std::size_t> selected() const {
    return std::span<const std::size_t>(order.data(), k);
  }
};

SelectionResult select_top_k(std::span<const double> scores, std::size_t k);

}  // namespace phsic
