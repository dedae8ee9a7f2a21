#include "phsic/pmi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace phsic {

double PmiScore::rank_value() const {
  switch (kind) {
    case Kind::finite:
      return value;
    case Kind::neg_inf:
      return -std::numeric_limits<double>::max();
    case Kind::undef:
      return -std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

std::string PmiScore::to_string() const {
  switch (kind) {
    case Kind::finite:
      return format_score(value);
    case Kind::neg_inf:
      return "-inf";
    case Kind::undef:
      return "undef";
  }
  return "undef";
}

std::string pmi_key(const std::string& text, PmiKeyMode mode) {
  if (mode == PmiKeyMode::surface) return text;
  std::vector<std::string> tokens = tokenize(text);
  std::sort(tokens.begin(), tokens.end());
  std::string key;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) key += ' ';
    key += tokens[i];
  }
  return key;
}

PmiCountModel fit_pmi(const PairedDataset& ds, PmiKeyMode mode, double add_k) {
  if (!ds.has_text()) fail(ErrorKind::parameter, "fit_pmi: dataset has no text pairs");
  if (ds.n() < 1) fail(ErrorKind::insufficient_data, "fit_pmi: need at least 1 pair");
  if (add_k < 0.0) fail(ErrorKind::parameter, "fit_pmi: add_k must be >= 0");

  PmiCountModel model;
  model.key_mode = mode;
  model.add_k = add_k;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    std::string xk = pmi_key(ds.x_text[i], mode);
    std::string yk = pmi_key(ds.y_text[i], mode);
    ++model.pair_counts[xk + '\t' + yk];
    ++model.x_counts[xk];
    ++model.y_counts[yk];
    ++model.n;
  }
  return model;
}

PmiScore score_pmi(const PmiCountModel& model, const std::string& x_text,
                   const std::string& y_text) {
  std::string xk = pmi_key(x_text, model.key_mode);
  std::string yk = pmi_key(y_text, model.key_mode);

  auto xit = model.x_counts.find(xk);
  auto yit = model.y_counts.find(yk);
  if (xit == model.x_counts.end() || yit == model.y_counts.end()) {
    return PmiScore{PmiScore::Kind::undef, 0.0};
  }

  auto pit = model.pair_counts.find(xk + '\t' + yk);
  double joint = pit == model.pair_counts.end() ? 0.0 : static_cast<double>(pit->second);

  if (model.add_k > 0.0) {
    // Add-k over the observed key vocabularies; keeps marginal sums consistent.
    double vx = static_cast<double>(model.x_counts.size());
    double vy = static_cast<double>(model.y_counts.size());
    double n = static_cast<double>(model.n) + model.add_k * vx * vy;
    double cx = static_cast<double>(xit->second) + model.add_k * vy;
    double cy = static_cast<double>(yit->second) + model.add_k * vx;
    return PmiScore{PmiScore::Kind::finite, std::log(n * (joint + model.add_k) / (cx * cy))};
  }

  if (joint == 0.0) return PmiScore{PmiScore::Kind::neg_inf, 0.0};
  double value = std::log(static_cast<double>(model.n) * joint /
                          (static_cast<double>(xit->second) * static_cast<double>(yit->second)));
  return PmiScore{PmiScore::Kind::finite, value};
}

}  // namespace phsic
