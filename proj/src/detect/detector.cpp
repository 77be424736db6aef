#include "fleam/detect/detector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "fleam/core/errors.hpp"

namespace fleam::detect {

double BaselineProfile::threshold_at(std::size_t scored_pos) const {
  if (thresholds.empty()) throw ConfigError("baseline profile has no thresholds");
  if (!per_position) return thresholds[0];
  return thresholds[std::min(scored_pos, thresholds.size() - 1)];
}

void BaselineProfile::save(const std::string& path) const {
  nlohmann::json j;
  j["thresholds"] = thresholds;
  j["per_position"] = per_position;
  j["quantile"] = quantile;
  j["context_len"] = context_len;
  j["window_len"] = window_len;
  j["anomaly_trigger"] = anomaly_trigger;
  j["model_layout_id"] = model_layout_id;
  j["codec"] = codec.to_json();
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write baseline profile: " + path);
  out << j.dump(2) << '\n';
}

BaselineProfile BaselineProfile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open baseline profile: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("baseline profile is not valid json: " + std::string(e.what()));
  }
  BaselineProfile p;
  try {
    p.thresholds = j.at("thresholds").get<std::vector<double>>();
    p.per_position = j.at("per_position").get<bool>();
    p.quantile = j.at("quantile").get<double>();
    p.context_len = j.at("context_len").get<int>();
    p.window_len = j.at("window_len").get<int>();
    p.anomaly_trigger = j.at("anomaly_trigger").get<double>();
    p.model_layout_id = j.at("model_layout_id").get<std::uint64_t>();
    p.codec = SymbolCodec::from_json(j.at("codec"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("baseline profile is missing fields: " + std::string(e.what()));
  }
  return p;
}

WindowScores score_sequence(const nn::GruModel& model, const SymbolCodec& codec,
                            const FlowWindow& window, int context_len) {
  if (context_len < 1) throw ConfigError("context length must be >= 1");
  const int n = static_cast<int>(window.packets.size());
  if (n <= context_len) {
    throw InputError("window must contain more packets than the context length");
  }
  std::vector<nn::Vector> encoded;
  encoded.reserve(window.packets.size());
  for (const SymbolVector& sv : window.packets) encoded.push_back(codec.encode(sv));

  WindowScores out;
  out.model_layout_id = model.layout_id();
  out.partial_window = window.partial();
  out.scores.reserve(static_cast<std::size_t>(n - context_len));
  for (int i = context_len; i < n; ++i) {
    nn::Vector h = nn::Vector::Zero(model.hidden_dim);
    for (int t = i - context_len; t < i; ++t) h = nn::gru_step(model, h, encoded[t]);
    nn::Vector logits = model.w_out * h + model.b_out;
    nn::Vector probs = (logits.array() - logits.maxCoeff()).exp();
    probs /= probs.sum();
    const int cls = codec.symbol_class(window.packets[static_cast<std::size_t>(i)]);
    if (cls >= model.n_classes) {
      throw LayoutError("symbol class exceeds the model's class count");
    }
    out.scores.push_back(probs(cls));
  }
  return out;
}

namespace {

// Nearest-rank quantile on an ascending copy of the scores.
double nearest_rank(std::vector<double> scores, double q) {
  std::sort(scores.begin(), scores.end());
  const std::size_t n = scores.size();
  const std::size_t rank = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(q * static_cast<double>(n))));
  return scores[std::min(rank, n) - 1];
}

}  // namespace

BaselineProfile build_baseline(const nn::GruModel& model, const SymbolCodec& codec,
                               const std::vector<FlowWindow>& benign_windows, double quantile,
                               int context_len, int window_len, double anomaly_trigger,
                               bool per_position) {
  if (benign_windows.empty()) {
    throw ConfigError("baseline construction needs at least one benign window");
  }
  if (!(quantile >= 0.0 && quantile < 1.0)) {
    throw ConfigError("baseline quantile must lie in [0, 1)");
  }
  if (!(anomaly_trigger > 0.0 && anomaly_trigger < 1.0)) {
    throw ConfigError("anomaly trigger must lie in (0, 1)");
  }
  BaselineProfile profile;
  profile.per_position = per_position;
  profile.quantile = quantile;
  profile.context_len = context_len;
  profile.window_len = window_len;
  profile.anomaly_trigger = anomaly_trigger;
  profile.model_layout_id = model.layout_id();
  profile.codec = codec;

  std::vector<std::vector<double>> by_position;
  std::vector<double> pooled;
  for (const FlowWindow& w : benign_windows) {
    const WindowScores s = score_sequence(model, codec, w, context_len);
    for (std::size_t i = 0; i < s.scores.size(); ++i) {
      pooled.push_back(s.scores[i]);
      if (per_position) {
        if (by_position.size() <= i) by_position.resize(i + 1);
        by_position[i].push_back(s.scores[i]);
      }
    }
  }
  if (pooled.empty()) throw ConfigError("benign windows produced no scores");
  if (per_position) {
    profile.thresholds.reserve(by_position.size());
    for (auto& scores : by_position) {
      profile.thresholds.push_back(scores.empty() ? nearest_rank(pooled, quantile)
                                                  : nearest_rank(std::move(scores), quantile));
    }
  } else {
    profile.thresholds = {nearest_rank(std::move(pooled), quantile)};
  }
  return profile;
}

Classification classify_window(const WindowScores& scores, const BaselineProfile& profile) {
  if (scores.model_layout_id != profile.model_layout_id) {
    throw ConfigError("scores were produced by a different model than the baseline profile");
  }
  if (scores.scores.empty()) throw InputError("cannot classify a window with no scores");
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < scores.scores.size(); ++i) {
    if (scores.scores[i] < profile.threshold_at(i)) ++flagged;
  }
  Classification out;
  out.flagged_fraction =
      static_cast<double>(flagged) / static_cast<double>(scores.scores.size());
  out.anomaly = out.flagged_fraction > profile.anomaly_trigger;
  out.low_confidence = scores.partial_window;
  return out;
}

Classification classify(const nn::GruModel& model, const FlowWindow& window,
                        const BaselineProfile& profile) {
  if (model.layout_id() != profile.model_layout_id) {
    throw ConfigError("model does not match the baseline profile's layout");
  }
  return classify_window(score_sequence(model, profile.codec, window, profile.context_len),
                         profile);
}

int classify_supervised(const nn::GruModel& model, const nn::Vector& encoded) {
  const nn::ForwardResult fw = forward_sequence(model, {encoded});
  const nn::Vector& p = fw.probs.back();
  int best = 0;
  for (Eigen::Index c = 1; c < p.size(); ++c) {
    if (p(c) > p(best)) best = static_cast<int>(c);  // strict: ties stay benign
  }
  return best;
}

std::vector<nn::Sequence> context_samples(const SymbolCodec& codec,
                                          const std::vector<FlowWindow>& windows,
                                          int context_len) {
  std::vector<nn::Sequence> samples;
  for (const FlowWindow& w : windows) {
    const int n = static_cast<int>(w.packets.size());
    if (n <= context_len) continue;
    std::vector<nn::Vector> encoded;
    std::vector<int> classes;
    encoded.reserve(w.packets.size());
    classes.reserve(w.packets.size());
    for (const SymbolVector& sv : w.packets) {
      encoded.push_back(codec.encode(sv));
      classes.push_back(codec.symbol_class(sv));
    }
    for (int i = context_len; i < n; ++i) {
      nn::Sequence s;
      for (int t = i - context_len; t < i; ++t) {
        s.inputs.push_back(encoded[static_cast<std::size_t>(t)]);
        s.labels.push_back(t == i - 1 ? classes[static_cast<std::size_t>(i)] : nn::kUnlabeled);
      }
      samples.push_back(std::move(s));
    }
  }
  return samples;
}

}  // namespace fleam::detect
