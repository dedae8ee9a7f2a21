#include "phsic/cli.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace phsic {

namespace {

constexpr std::uint64_t kNaiveGuard = 50'000;  // fit is O(n^2); require --force beyond this

double peak_rss_mb() {
  struct rusage usage {};
  getrusage(RUSAGE_SELF, &usage);
  return static_cast<double>(usage.ru_maxrss) / 1024.0;
}

KernelSpec kernel_x_of(const RunConfig& cfg) { return KernelSpec::parse(cfg.kernel_x_text); }

KernelSpec kernel_y_of(const RunConfig& cfg) {
  return cfg.kernel_y_text.empty() ? kernel_x_of(cfg) : KernelSpec::parse(cfg.kernel_y_text);
}

// Loads a pair file and embeds it with the configured tables and preprocessing.
PairedDataset load_embedded(const std::string& pairs_path, const RunConfig& cfg, bool lowercase,
                            bool normalize, std::ostream& log) {
  if (pairs_path.empty()) fail(ErrorKind::parameter, "missing --pairs");
  if (cfg.emb_x.empty()) fail(ErrorKind::parameter, "missing --emb-x");
  PairedDataset ds = load_pairs(pairs_path);
  if (ds.skipped_blank > 0) {
    log << "warning: skipped " << ds.skipped_blank << " blank line(s) in " << pairs_path << "\n";
  }
  if (ds.n() == 0) return ds;

  EmbeddingTable table_x = load_embeddings(cfg.emb_x);
  if (table_x.duplicate_count > 0) {
    log << "warning: " << table_x.duplicate_count << " duplicate token(s) in " << cfg.emb_x << "\n";
  }
  EmbedStats stats;
  if (cfg.emb_y.empty() || cfg.emb_y == cfg.emb_x) {
    ds = embed_dataset(std::move(ds), table_x, table_x, lowercase, &stats);
  } else {
    EmbeddingTable table_y = load_embeddings(cfg.emb_y);
    if (table_y.duplicate_count > 0) {
      log << "warning: " << table_y.duplicate_count << " duplicate token(s) in " << cfg.emb_y
          << "\n";
    }
    ds = embed_dataset(std::move(ds), table_x, table_y, lowercase, &stats);
  }
  if (stats.zero_pairs > 0) {
    log << "warning: " << stats.zero_pairs << " pair(s) embedded to a zero vector\n";
  }
  if (normalize) {
    normalize_rows(ds.x_vecs);
    normalize_rows(ds.y_vecs);
  }
  return ds;
}

std::vector<double> score_batch(const SavedModel& saved, const PairedDataset& ds) {
  if (const auto* fm = std::get_if<FeatureModel>(&saved.model)) {
    return score_feature_batch(*fm, ds);
  }
  if (const auto* im = std::get_if<IcdModel>(&saved.model)) {
    return score_icd_batch(*im, ds);
  }
  return score_naive_batch(std::get<NaiveModel>(saved.model), ds);
}

double score_one(const SavedModel& saved, const Eigen::Ref<const Eigen::VectorXd>& x,
                 const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (const auto* fm = std::get_if<FeatureModel>(&saved.model)) return score_feature(*fm, x, y);
  if (const auto* im = std::get_if<IcdModel>(&saved.model)) return score_icd(*im, x, y);
  return score_naive(std::get<NaiveModel>(saved.model), x, y);
}

std::size_t resolve_k(const RunConfig& cfg, std::size_t n) {
  if (cfg.top_k >= 0 && cfg.keep_frac >= 0.0) {
    fail(ErrorKind::parameter, "give either --k or --keep-frac, not both");
  }
  if (cfg.top_k >= 0) {
    if (cfg.top_k < 1 || static_cast<std::size_t>(cfg.top_k) > n) {
      fail(ErrorKind::parameter, "--k must be in [1, " + std::to_string(n) + "]");
    }
    return static_cast<std::size_t>(cfg.top_k);
  }
  if (cfg.keep_frac >= 0.0) {
    if (cfg.keep_frac <= 0.0 || cfg.keep_frac > 1.0) {
      fail(ErrorKind::parameter, "--keep-frac must be in (0, 1]");
    }
    auto k = static_cast<std::size_t>(std::llround(cfg.keep_frac * static_cast<double>(n)));
    return std::clamp<std::size_t>(k, 1, n);
  }
  fail(ErrorKind::parameter, "select needs --k or --keep-frac");
}

double parse_score_field(std::string_view field, const std::string& where) {
  if (field == "undef") return -std::numeric_limits<double>::infinity();
  if (field == "-inf") return -std::numeric_limits<double>::max();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    fail(ErrorKind::parse, where + ": bad score '" + std::string(field) + "'");
  }
  return v;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parameter:
    case ErrorKind::estimator_mismatch:
      return 1;
    case ErrorKind::parse:
    case ErrorKind::dimension:
    case ErrorKind::insufficient_data:
    case ErrorKind::corrupt_model:
    case ErrorKind::io:
      return 2;
    case ErrorKind::factorization:
      return 3;
  }
  return 2;
}

void print_report(const MetricsReport& report, std::ostream& out) {
  out << "instances  " << report.n_instances << "\n";
  if (report.roc_auc) out << "ROC-AUC    " << format_score(*report.roc_auc) << "\n";
  out << "MRR        " << format_score(report.mrr) << "\n";
  for (const auto& [k, v] : report.recall_at) {
    out << "Recall@" << k << "   " << format_score(v) << "\n";
  }
  out << "n_instances=" << report.n_instances << "\n";
  if (report.roc_auc) out << "roc_auc=" << format_score(*report.roc_auc) << "\n";
  out << "mrr=" << format_score(report.mrr) << "\n";
  for (const auto& [k, v] : report.recall_at) {
    out << "recall@" << k << "=" << format_score(v) << "\n";
  }
}

void cmd_fit(const RunConfig& cfg, std::ostream& log) {
  if (cfg.model.empty()) fail(ErrorKind::parameter, "fit needs --out MODEL");
  KernelSpec kx = kernel_x_of(cfg);
  KernelSpec ky = kernel_y_of(cfg);

  auto t0 = std::chrono::steady_clock::now();
  PairedDataset ds = load_embedded(cfg.pairs, cfg, cfg.lowercase, cfg.normalize, log);

  SavedModel saved;
  saved.kernel_x = kx;
  saved.kernel_y = ky;
  saved.normalized_inputs = cfg.normalize;
  saved.lowercased = cfg.lowercase;

  if (cfg.estimator == "feature") {
    saved.model = fit_feature(ds, kx, ky);
  } else if (cfg.estimator == "icd") {
    if (cfg.rank < 1) fail(ErrorKind::parameter, "--rank must be >= 1");
    std::optional<double> tol;
    if (cfg.tol >= 0.0) tol = cfg.tol;
    saved.model = fit_icd(ds, kx, ky, static_cast<Eigen::Index>(cfg.rank), tol);
  } else if (cfg.estimator == "naive") {
    if (ds.n() > kNaiveGuard && !cfg.force) {
      fail(ErrorKind::parameter, "naive estimator is O(n^2); n = " + std::to_string(ds.n()) +
                                     " exceeds " + std::to_string(kNaiveGuard) +
                                     " (pass --force to override)");
    }
    saved.model = fit_naive(ds, kx, ky);
  } else {
    fail(ErrorKind::parameter, "unknown estimator '" + cfg.estimator + "'");
  }

  save_model(saved, cfg.model);
  auto t1 = std::chrono::steady_clock::now();
  double secs = std::chrono::duration<double>(t1 - t0).count();
  log << "fit " << cfg.estimator << " n=" << ds.n() << " in " << format_score(secs)
      << " s (peak rss ~" << static_cast<long>(peak_rss_mb()) << " MB)\n";
}

void cmd_score(const RunConfig& cfg, std::ostream& log) {
  if (cfg.model.empty()) fail(ErrorKind::parameter, "score needs --model");
  if (cfg.output.empty()) fail(ErrorKind::parameter, "score needs --out");
  SavedModel saved = load_model(cfg.model);
  const std::string& pairs_path = cfg.score_pairs.empty() ? cfg.pairs : cfg.score_pairs;
  PairedDataset ds = load_embedded(pairs_path, cfg, saved.lowercased, saved.normalized_inputs, log);

  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write scores file: " + cfg.output);
  if (ds.n() == 0) return;

  std::vector<double> scores = score_batch(saved, ds);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out << (i + 1) << '\t' << format_score(scores[i]) << '\n';
  }
}

MetricsReport cmd_rank(const RunConfig& cfg, std::ostream& out) {
  if (cfg.model.empty()) fail(ErrorKind::parameter, "rank needs --model");
  if (cfg.m < 2) fail(ErrorKind::parameter, "--m must be >= 2");
  SavedModel saved = load_model(cfg.model);
  PairedDataset ds =
      load_embedded(cfg.pairs, cfg, saved.lowercased, saved.normalized_inputs, std::cerr);
  if (ds.n() < static_cast<std::size_t>(cfg.m)) {
    fail(ErrorKind::parameter, "rank needs at least m pairs");
  }

  auto instances = make_negatives(ds.n(), static_cast<std::size_t>(cfg.m), cfg.seed);
  std::vector<std::vector<double>> candidate_scores(instances.size());
  std::vector<double> pos, neg;
  pos.reserve(instances.size());
  neg.reserve(instances.size() * (static_cast<std::size_t>(cfg.m) - 1));

  parallel_for(instances.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& inst = instances[i];
      auto x = ds.x_vecs.row(static_cast<Eigen::Index>(inst.context_index)).transpose();
      auto& scores = candidate_scores[i];
      scores.resize(inst.candidates.size());
      for (std::size_t c = 0; c < inst.candidates.size(); ++c) {
        scores[c] = score_one(
            saved, x, ds.y_vecs.row(static_cast<Eigen::Index>(inst.candidates[c])).transpose());
      }
    }
  });
  for (std::size_t i = 0; i < instances.size(); ++i) {
    for (std::size_t c = 0; c < candidate_scores[i].size(); ++c) {
      (c == instances[i].gold_position ? pos : neg).push_back(candidate_scores[i][c]);
    }
  }

  MetricsReport report = mrr_and_recall(instances, candidate_scores, cfg.ks);
  report.roc_auc = roc_auc(pos, neg);

  if (!cfg.scores_out.empty()) {
    std::ofstream dump(cfg.scores_out, std::ios::binary);
    if (!dump) fail(ErrorKind::io, "cannot write scores file: " + cfg.scores_out);
    for (std::size_t i = 0; i < instances.size(); ++i) {
      for (std::size_t c = 0; c < candidate_scores[i].size(); ++c) {
        dump << i << '\t' << instances[i].candidates[c] << '\t'
             << format_score(candidate_scores[i][c]) << '\t'
             << (c == instances[i].gold_position ? 1 : 0) << '\n';
      }
    }
  }

  print_report(report, out);
  return report;
}

void cmd_select(const RunConfig& cfg, std::ostream& log) {
  if (cfg.model.empty()) fail(ErrorKind::parameter, "select needs --model");
  if (cfg.output.empty()) fail(ErrorKind::parameter, "select needs --out");
  SavedModel saved = load_model(cfg.model);
  PairedDataset ds = load_embedded(cfg.pairs, cfg, saved.lowercased, saved.normalized_inputs, log);
  if (ds.n() == 0) fail(ErrorKind::insufficient_data, "select: empty corpus");

  std::size_t k = resolve_k(cfg, ds.n());
  std::vector<double> scores = score_batch(saved, ds);
  SelectionResult sel = select_top_k(scores, k);

  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write selected pairs: " + cfg.output);
  for (std::size_t r = 0; r < sel.k; ++r) {
    std::size_t i = sel.order[r];
    out << ds.x_text[i] << '\t' << ds.y_text[i] << '\n';
  }

  if (!cfg.audit.empty()) {
    std::vector<char> kept(ds.n(), 0);
    for (std::size_t r = 0; r < sel.k; ++r) kept[sel.order[r]] = 1;
    std::ofstream audit(cfg.audit, std::ios::binary);
    if (!audit) fail(ErrorKind::io, "cannot write audit file: " + cfg.audit);
    for (std::size_t i = 0; i < ds.n(); ++i) {
      audit << i << '\t' << format_score(scores[i]) << '\t' << static_cast<int>(kept[i]) << '\n';
    }
  }
  log << "selected " << sel.k << " of " << ds.n() << " pairs\n";
}

void cmd_pmi(const RunConfig& cfg, std::ostream& log) {
  if (cfg.pairs.empty()) fail(ErrorKind::parameter, "pmi needs --pairs");
  if (cfg.output.empty()) fail(ErrorKind::parameter, "pmi needs --out");

  PmiKeyMode mode;
  if (cfg.key_mode == "surface") {
    mode = PmiKeyMode::surface;
  } else if (cfg.key_mode == "token-set") {
    mode = PmiKeyMode::token_set;
  } else {
    fail(ErrorKind::parameter, "--key-mode must be surface or token-set");
  }

  PairedDataset train = load_pairs(cfg.pairs);
  if (train.skipped_blank > 0) {
    log << "warning: skipped " << train.skipped_blank << " blank line(s)\n";
  }
  PmiCountModel model = fit_pmi(train, mode, cfg.add_k);

  const std::string& target_path = cfg.score_pairs.empty() ? cfg.pairs : cfg.score_pairs;
  PairedDataset target = load_pairs(target_path);

  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write scores file: " + cfg.output);
  for (std::size_t i = 0; i < target.n(); ++i) {
    PmiScore s = score_pmi(model, target.x_text[i], target.y_text[i]);
    if (cfg.ppmi && s.kind == PmiScore::Kind::finite) s.value = std::max(0.0, s.value);
    out << (i + 1) << '\t' << s.to_string() << '\n';
  }
}

MetricsReport cmd_eval(const RunConfig& cfg, std::ostream& out) {
  if (cfg.scores.empty()) fail(ErrorKind::parameter, "eval needs --scores");
  std::ifstream in(cfg.scores);
  if (!in) fail(ErrorKind::io, "cannot open scores file: " + cfg.scores);

  // instance-id -> order of first appearance
  std::unordered_map<std::string, std::size_t> instance_index;
  std::vector<RankingInstance> instances;
  std::vector<std::vector<double>> candidate_scores;
  std::vector<bool> has_gold;
  std::vector<double> pos, neg;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    std::string where = cfg.scores + ":" + std::to_string(line_no);
    if (fields.size() != 4) {
      fail(ErrorKind::parse, where + ": expected instance-id, candidate-id, score, is-gold");
    }
    double score = parse_score_field(fields[2], where);
    bool gold;
    if (fields[3] == "1") {
      gold = true;
    } else if (fields[3] == "0") {
      gold = false;
    } else {
      fail(ErrorKind::parse, where + ": is-gold must be 0 or 1");
    }

    auto [it, inserted] = instance_index.emplace(std::string(fields[0]), instances.size());
    if (inserted) {
      instances.emplace_back();
      instances.back().context_index = instances.size() - 1;
      candidate_scores.emplace_back();
      has_gold.push_back(false);
    }
    std::size_t idx = it->second;
    auto& inst = instances[idx];
    if (gold) {
      if (has_gold[idx]) {
        fail(ErrorKind::parse, where + ": instance has more than one gold candidate");
      }
      has_gold[idx] = true;
      inst.gold_position = inst.candidates.size();
      pos.push_back(score);
    } else {
      neg.push_back(score);
    }
    inst.candidates.push_back(inst.candidates.size());
    candidate_scores[idx].push_back(score);
  }
  if (instances.empty()) fail(ErrorKind::parse, cfg.scores + ": no instances");
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (!has_gold[i]) {
      fail(ErrorKind::parse, cfg.scores + ": an instance has no gold candidate");
    }
  }

  MetricsReport report = mrr_and_recall(instances, candidate_scores, cfg.ks);
  if (!pos.empty() && !neg.empty()) report.roc_auc = roc_auc(pos, neg);
  print_report(report, out);
  return report;
}

double cmd_hsic(const RunConfig& cfg, std::ostream& out) {
  KernelSpec kx = kernel_x_of(cfg);
  KernelSpec ky = kernel_y_of(cfg);
  PairedDataset ds = load_embedded(cfg.pairs, cfg, cfg.lowercase, cfg.normalize, std::cerr);
  if (ds.n() > kNaiveGuard && !cfg.force) {
    fail(ErrorKind::parameter,
         "hsic is O(n^2); n = " + std::to_string(ds.n()) + " (pass --force to override)");
  }
  NaiveModel model = fit_naive(ds, kx, ky);
  double value = hsic_empirical(model, ds);
  out << "hsic=" << format_score(value) << "\n";
  return value;
}

}  // namespace phsic
