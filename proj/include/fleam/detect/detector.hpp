#pragma once

#include <string>
#include <vector>

#include "fleam/detect/symbol.hpp"
#include "fleam/nn/model.hpp"
#include "fleam/nn/train.hpp"

namespace fleam::detect {

// Detection thresholds learned from benign traffic: per-score thresholds
// (pooled by default, per-position optionally) plus the window-level
// anomaly trigger fraction.
struct BaselineProfile {
  std::vector<double> thresholds;  // pooled: one entry; per-position: one per scored slot
  bool per_position = false;
  double quantile = 0.05;
  int context_len = 5;
  int window_len = 100;
  double anomaly_trigger = 0.2;
  std::uint64_t model_layout_id = 0;
  SymbolCodec codec;

  // threshold applying to the i-th scored position (0-based)
  double threshold_at(std::size_t scored_pos) const;

  void save(const std::string& path) const;
  static BaselineProfile load(const std::string& path);
};

// Occurrence probabilities of each packet's symbol class given the
// preceding context_len packets; the first context_len packets receive no
// score. The model restarts from a zero hidden state for every position,
// so exactly context_len packets of context feed each score.
struct WindowScores {
  std::vector<double> scores;  // scores[i] belongs to packet context_len + i
  std::uint64_t model_layout_id = 0;
  bool partial_window = false;
};

WindowScores score_sequence(const nn::GruModel& model, const SymbolCodec& codec,
                            const FlowWindow& window, int context_len);

// Pooled (or per-position) nearest-rank quantile of benign scores.
// quantile 0 yields the benign minimum, so nothing benign from the fit
// set is flagged by the strict comparison.
BaselineProfile build_baseline(const nn::GruModel& model, const SymbolCodec& codec,
                               const std::vector<FlowWindow>& benign_windows, double quantile,
                               int context_len, int window_len, double anomaly_trigger,
                               bool per_position = false);

struct Classification {
  bool anomaly = false;
  double flagged_fraction = 0.0;
  bool low_confidence = false;  // partial window
};

// Window is anomalous iff (#scores strictly below threshold) / #scores is
// strictly above the trigger.
Classification classify_window(const WindowScores& scores, const BaselineProfile& profile);

Classification classify(const nn::GruModel& model, const FlowWindow& window,
                        const BaselineProfile& profile);

// Supervised binary head: argmax class with ties resolved toward class 0
// (benign).
int classify_supervised(const nn::GruModel& model, const nn::Vector& encoded);

// (context -> next symbol class) training samples for the occurrence model;
// each sample is a context_len-step sequence labeled on its final step.
std::vector<nn::Sequence> context_samples(const SymbolCodec& codec,
                                          const std::vector<FlowWindow>& windows,
                                          int context_len);

}  // namespace fleam::detect
