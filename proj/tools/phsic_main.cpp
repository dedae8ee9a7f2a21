#include "phsic/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void add_embedding_flags(CLI::App* cmd, phsic::RunConfig& cfg) {
  cmd->add_option("--emb-x", cfg.emb_x, "Word embeddings for the x side (text format)");
  cmd->add_option("--emb-y", cfg.emb_y, "Word embeddings for the y side (defaults to --emb-x)");
}

void add_kernel_flags(CLI::App* cmd, phsic::RunConfig& cfg) {
  cmd->add_option("--kernel", cfg.kernel_x_text,
                  "Kernel: cos|linear|rbf[:SIGMA]|laplacian:GAMMA|poly:DEGREE:OFFSET "
                  "(rbf default sigma 1.0)")
      ->capture_default_str();
  cmd->add_option("--kernel-y", cfg.kernel_y_text, "Kernel for the y side (defaults to --kernel)");
}

void add_prep_flags(CLI::App* cmd, phsic::RunConfig& cfg) {
  cmd->add_flag("--lowercase", cfg.lowercase, "Lowercase tokens before embedding lookup");
  cmd->add_flag("--normalize", cfg.normalize, "Length-normalize sentence vectors after encoding");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PHSIC: kernel-smoothed co-occurrence scoring for paired data"};
  app.require_subcommand(1);
  phsic::RunConfig cfg;

  auto* fit = app.add_subcommand("fit", "Fit a model and write it to disk");
  fit->add_option("--pairs", cfg.pairs, "Training pairs (x TAB y per line)")->required();
  add_embedding_flags(fit, cfg);
  add_kernel_flags(fit, cfg);
  add_prep_flags(fit, cfg);
  fit->add_option("--estimator", cfg.estimator, "feature|icd|naive")->capture_default_str();
  fit->add_option("--rank", cfg.rank, "ICD rank d")->capture_default_str();
  fit->add_option("--tol", cfg.tol, "ICD residual-trace stop (default 1e-9 * initial trace)");
  fit->add_flag("--force", cfg.force, "Allow the O(n^2) naive estimator beyond 50000 pairs");
  fit->add_option("--out", cfg.model, "Output model file")->required();

  auto* score = app.add_subcommand("score", "Score pairs with a fitted model");
  score->add_option("--model", cfg.model, "Model file")->required();
  score->add_option("--pairs", cfg.pairs, "Pairs to score")->required();
  add_embedding_flags(score, cfg);
  score->add_option("--out", cfg.output, "Output TSV (line-no TAB score)")->required();

  auto* rank = app.add_subcommand("rank", "Multiple-choice ranking with pseudo-negatives");
  rank->add_option("--model", cfg.model, "Model file")->required();
  rank->add_option("--pairs", cfg.pairs, "Test pairs")->required();
  add_embedding_flags(rank, cfg);
  rank->add_option("-m,--m", cfg.m, "Candidates per instance")->capture_default_str();
  rank->add_option("--seed", cfg.seed, "Negative-sampling seed")->capture_default_str();
  rank->add_option("--ks", cfg.ks, "Recall cutoffs")->capture_default_str();
  rank->add_option("--scores-out", cfg.scores_out,
                   "Dump per-candidate scores (instance, candidate, score, is-gold)");

  auto* select = app.add_subcommand("select", "Keep the top-K pairs by in-sample score");
  select->add_option("--model", cfg.model, "Model file")->required();
  select->add_option("--pairs", cfg.pairs, "Corpus to filter")->required();
  add_embedding_flags(select, cfg);
  select->add_option("-k,--k", cfg.top_k, "Number of pairs to keep");
  select->add_option("--keep-frac", cfg.keep_frac, "Fraction of pairs to keep");
  select->add_option("--out", cfg.output, "Selected pairs file")->required();
  select->add_option("--audit", cfg.audit, "Audit TSV (index, score, kept)");

  auto* pmi = app.add_subcommand("pmi", "Counting-PMI baseline scores");
  pmi->add_option("--pairs", cfg.pairs, "Training pairs")->required();
  pmi->add_option("--score-pairs", cfg.score_pairs, "Pairs to score (defaults to --pairs)");
  pmi->add_option("--key-mode", cfg.key_mode, "surface|token-set")->capture_default_str();
  pmi->add_option("--add-k", cfg.add_k, "Add-k smoothing (0 = maximum likelihood)")
      ->capture_default_str();
  pmi->add_flag("--ppmi", cfg.ppmi, "Clamp finite scores at zero");
  pmi->add_option("--out", cfg.output, "Output TSV")->required();

  auto* eval = app.add_subcommand("eval", "Metrics from a per-candidate scores TSV");
  eval->add_option("--scores", cfg.scores, "TSV: instance-id, candidate-id, score, is-gold")
      ->required();
  eval->add_option("--ks", cfg.ks, "Recall cutoffs")->capture_default_str();

  auto* hsic = app.add_subcommand("hsic", "Print the empirical dependence value");
  hsic->add_option("--pairs", cfg.pairs, "Pairs")->required();
  add_embedding_flags(hsic, cfg);
  add_kernel_flags(hsic, cfg);
  add_prep_flags(hsic, cfg);
  hsic->add_flag("--force", cfg.force, "Allow n beyond 50000");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (fit->parsed()) {
      phsic::cmd_fit(cfg, std::cerr);
    } else if (score->parsed()) {
      phsic::cmd_score(cfg, std::cerr);
    } else if (rank->parsed()) {
      phsic::cmd_rank(cfg, std::cout);
    } else if (select->parsed()) {
      phsic::cmd_select(cfg, std::cerr);
    } else if (pmi->parsed()) {
      phsic::cmd_pmi(cfg, std::cerr);
    } else if (eval->parsed()) {
      phsic::cmd_eval(cfg, std::cout);
    } else if (hsic->parsed()) {
      phsic::cmd_hsic(cfg, std::cout);
    }
  } catch (const phsic::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return phsic::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
