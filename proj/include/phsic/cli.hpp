#pragma once

#include "phsic/eval.hpp"
#include "phsic/model_io.hpp"
#include "phsic/pmi.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace phsic {

// Parsed command-line state shared by all subcommands. Defaults follow the
// library defaults: sigma 1.0 inside kernel specs, ICD rank 100, m = 10.
struct RunConfig {
  std::string pairs;        // training / input pair file
  std::string score_pairs;  // pairs to score (score/pmi)
  std::string emb_x, emb_y;
  std::string model;        // model file path (input or output)
  std::string output;       // scores TSV / selected pairs
  std::string audit;        // selection audit TSV
  std::string scores;       // scores TSV consumed by eval
  std::string scores_out;   // optional per-candidate dump from rank

  std::string kernel_x_text = "cos";
  std::string kernel_y_text;  // empty: same as kernel_x
  std::string estimator = "feature";
  std::int64_t rank = 100;
  double tol = -1.0;  // < 0: default 1e-9 * initial trace
  std::uint64_t seed = 0;
  std::int64_t m = 10;
  std::int64_t top_k = -1;
  double keep_frac = -1.0;  // alternative to top_k
  std::vector<int> ks = {1, 2};
  std::string key_mode = "surface";
  double add_k = 0.0;
  bool ppmi = false;
  bool lowercase = false;
  bool normalize = false;
  bool force = false;
};

// Subcommand bodies. They throw Error on failure; main() maps kinds to exit
// codes (usage 1, data 2, numeric 3).
void cmd_fit(const RunConfig& cfg, std::ostream& log);
void cmd_score(const RunConfig& cfg, std::ostream& log);
MetricsReport cmd_rank(const RunConfig& cfg, std::ostream& out);
void cmd_select(const RunConfig& cfg, std::ostream& log);
void cmd_pmi(const RunConfig& cfg, std::ostream& log);
MetricsReport cmd_eval(const RunConfig& cfg, std::ostream& out);
double cmd_hsic(const RunConfig& cfg, std::ostream& out);

int exit_code_for(ErrorKind kind);

void print_report(const MetricsReport& report, std::ostream& out);

}  // namespace phsic
