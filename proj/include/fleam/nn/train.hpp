#pragma once

#include <cstdint>
#include <vector>

#include "fleam/core/rng.hpp"
#include "fleam/nn/model.hpp"

namespace fleam::nn {

struct TrainConfig {
  double learning_rate = 0.01;
  int batch_size = 64;
  int epochs = 20;
  double reg_weight = 0.0;  // L2 coefficient, in [0, 1]
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError on out-of-range values
};

// One training example: a sequence of encoded inputs with per-step labels.
// A label of kUnlabeled excludes that step from the loss.
struct Sequence {
  std::vector<Vector> inputs;
  std::vector<int> labels;
};

constexpr int kUnlabeled = -1;

// Single GRU step: gates in (0,1), candidate in (-1,1).
Vector gru_step(const GruModel& model, const Vector& h_prev, const Vector& x);

struct ForwardResult {
  std::vector<Vector> probs;  // per-step class distributions, each sums to 1
  Vector h_final;
};

ForwardResult forward_sequence(const GruModel& model, const std::vector<Vector>& xs);

struct BackwardResult {
  ParamVector grad;
  double loss = 0.0;
};

// Loss is mean cross-entropy over labeled steps plus reg_weight * 0.5*||w||^2.
// A batch with no labeled step degenerates to the pure L2 term.
BackwardResult backward(const GruModel& model, const Sequence& seq, double reg_weight);
BackwardResult backward_batch(const GruModel& model, const std::vector<Sequence>& data,
                              const std::vector<int>& indices, double reg_weight);

struct EpochStats {
  int batches = 0;
  double mean_loss = 0.0;
  bool empty_shard = false;
};

// One pass over the shard in shuffled batch order; mutates the model.
// Deterministic given the rng state; the rng advances one shuffle per call.
EpochStats sgd_epoch_inplace(GruModel& model, const std::vector<Sequence>& data,
                             const std::vector<int>& shard, const TrainConfig& config,
                             Rng& rng);

// Value-semantics variant; shuffle stream seeded from config.seed.
GruModel sgd_epoch(const GruModel& model, const std::vector<Sequence>& data,
                   const std::vector<int>& shard, const TrainConfig& config);

// Mean cross-entropy over labeled steps plus the L2 term (one Eq-style
// objective evaluation; no gradient).
double dataset_loss(const GruModel& model, const std::vector<Sequence>& data,
                    const std::vector<int>& indices, double reg_weight);

// Fraction of sequences whose final labeled step is classified correctly;
// argmax with ties resolved toward the lowest class index.
double accuracy(const GruModel& model, const std::vector<Sequence>& data,
                const std::vector<int>& indices);

int argmax_class(const Vector& probs);

// Multi-epoch trainer with a persistent shuffle stream, so that a run of
// N epochs equals N successive sgd_epoch_inplace calls on the same Rng.
struct Trainer {
  GruModel model;
  TrainConfig config;
  Rng rng;

  Trainer(GruModel m, const TrainConfig& c) : model(std::move(m)), config(c), rng(c.seed) {}

  // Runs config.epochs passes; returns per-epoch stats.
  std::vector<EpochStats> fit(const std::vector<Sequence>& data, const std::vector<int>& shard);
};

}  // namespace fleam::nn
