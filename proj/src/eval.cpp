#include "phsic/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace phsic {

std::vector<RankingInstance> make_negatives(std::size_t n_pairs, std::size_t m,
                                            std::uint64_t seed) {
  if (m < 2) fail(ErrorKind::parameter, "make_negatives: m must be >= 2");
  if (m > n_pairs) fail(ErrorKind::parameter, "make_negatives: m exceeds the number of pairs");

  DeterministicRng rng(seed);
  std::vector<RankingInstance> instances;
  instances.reserve(n_pairs);

  std::vector<std::size_t> others(n_pairs - 1);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    // Partial Fisher-Yates over all indices except i.
    std::size_t w = 0;
    for (std::size_t j = 0; j < n_pairs; ++j) {
      if (j != i) others[w++] = j;
    }
    RankingInstance inst;
    inst.context_index = i;
    inst.candidates.resize(m);
    for (std::size_t j = 0; j + 1 < m; ++j) {
      std::size_t pick = j + static_cast<std::size_t>(rng.below(others.size() - j));
      std::swap(others[j], others[pick]);
      inst.candidates[j] = others[j];
    }
    inst.gold_position = static_cast<std::size_t>(rng.below(m));
    // Shift negatives up to open the gold slot.
    for (std::size_t j = m - 1; j > inst.gold_position; --j) {
      inst.candidates[j] = inst.candidates[j - 1];
    }
    inst.candidates[inst.gold_position] = i;
    instances.push_back(std::move(inst));
  }
  return instances;
}

double roc_auc(std::span<const double> pos, std::span<const double> neg) {
  if (pos.empty() || neg.empty()) {
    fail(ErrorKind::parameter, "roc_auc: both score sets must be nonempty");
  }
  // Sort both sides and sweep; wins/ties stay exact integers.
  std::vector<double> p(pos.begin(), pos.end());
  std::vector<double> q(neg.begin(), neg.end());
  std::sort(p.begin(), p.end());
  std::sort(q.begin(), q.end());

  std::uint64_t wins2 = 0;  // 2 * wins + ties
  std::size_t lo = 0, hi = 0;
  for (double v : p) {
    while (lo < q.size() && q[lo] < v) ++lo;
    while (hi < q.size() && q[hi] <= v) ++hi;
    wins2 += 2 * static_cast<std::uint64_t>(lo) + static_cast<std::uint64_t>(hi - lo);
  }
  std::uint64_t denom2 = 2 * static_cast<std::uint64_t>(p.size()) * static_cast<std::uint64_t>(q.size());
  // Evaluate the larger of the complementary numerators and subtract from 1
  // for the other, so auc(a,b) + auc(b,a) sums to 1 exactly.
  std::uint64_t comp2 = denom2 - wins2;
  if (wins2 >= comp2) {
    return static_cast<double>(wins2) / static_cast<double>(denom2);
  }
  return 1.0 - static_cast<double>(comp2) / static_cast<double>(denom2);
}

MetricsReport mrr_and_recall(const std::vector<RankingInstance>& instances,
                             const std::vector<std::vector<double>>& candidate_scores,
                             std::span<const int> ks) {
  if (instances.size() != candidate_scores.size()) {
    fail(ErrorKind::parameter, "mrr_and_recall: score lists do not align with instances");
  }
  MetricsReport report;
  report.n_instances = instances.size();
  NeumaierSum rr_sum;
  std::map<int, std::size_t> hits;
  for (int k : ks) hits[k] = 0;

  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    const auto& scores = candidate_scores[i];
    if (scores.size() != inst.candidates.size()) {
      fail(ErrorKind::parameter, "mrr_and_recall: instance " + std::to_string(i) +
                                     " has " + std::to_string(scores.size()) + " scores for " +
                                     std::to_string(inst.candidates.size()) + " candidates");
    }
    double gold = scores[inst.gold_position];
    std::size_t rank = 1;
    for (std::size_t c = 0; c < scores.size(); ++c) {
      if (c == inst.gold_position) continue;
      if (scores[c] > gold || (scores[c] == gold && c < inst.gold_position)) ++rank;
    }
    rr_sum.add(1.0 / static_cast<double>(rank));
    for (auto& [k, count] : hits) {
      if (rank <= static_cast<std::size_t>(k)) ++count;
    }
  }

  double n = static_cast<double>(instances.size());
  report.mrr = instances.empty() ? 0.0 : rr_sum.value() / n;
  for (auto& [k, count] : hits) {
    report.recall_at[k] = instances.empty() ? 0.0 : static_cast<double>(count) / n;
  }
  return report;
}

namespace {

// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values) {
  std::size_t n = values.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
    double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::optional<double> spearman_rho(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    fail(ErrorKind::parameter, "spearman_rho: sequences must have equal length >= 2");
  }
  std::vector<double> ra = average_ranks(a);
  std::vector<double> rb = average_ranks(b);
  double n = static_cast<double>(a.size());
  double mean = (n + 1.0) / 2.0;
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double xa = ra[i] - mean;
    double xb = rb[i] - mean;
    num += xa * xb;
    da += xa * xa;
    db += xb * xb;
  }
  if (da == 0.0 || db == 0.0) return std::nullopt;  // constant sequence
  return num / std::sqrt(da * db);
}

SelectionResult select_top_k(std::span<const double> scores, std::size_t k) {
  if (k < 1 || k > scores.size()) {
    fail(ErrorKind::parameter, "select_top_k: k must be in [1, n]");
  }
  SelectionResult result;
  result.k = k;
  result.order.resize(scores.size());
  std::iota(result.order.begin(), result.order.end(), 0);
  std::sort(result.order.begin(), result.order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  result.sorted_scores.reserve(scores.size());
  for (std::size_t i : result.order) result.sorted_scores.push_back(scores[i]);
  return result;
}

}  // namespace phsic
