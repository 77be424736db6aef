#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fleam/core/rng.hpp"
#include "fleam/nn/model.hpp"
#include "fleam/nn/train.hpp"

namespace fleam::fl {

// One collaborator: a coordinator with its worker pool, local shard, and a
// persistent shuffle stream, so successive rounds continue the same
// deterministic epoch sequence the centralized trainer would follow.
struct Collaborator {
  int id = 0;
  std::vector<int> shard;       // indices into the shared training set
  nn::TrainConfig config;       // config.epochs = local epochs per round
  int lam_count = 1;            // available local analysis workers
  bool available = true;
  double sim_seconds_per_epoch = 0.0;  // simulated wall time per local epoch
  Rng rng{0};

  Collaborator() = default;
  Collaborator(int id_, std::vector<int> shard_, const nn::TrainConfig& cfg)
      : id(id_), shard(std::move(shard_)), config(cfg), rng(cfg.seed) {}

  bool accepts_invitation() const { return available && lam_count >= 1; }
};

// Seed convention: worker i trains with base_seed + i, so a one-worker
// federation shares the centralized trainer's exact shuffle stream.
std::vector<Collaborator> make_collaborators(const std::vector<std::vector<int>>& shards,
                                             const nn::TrainConfig& base);

enum class RoundStatus { inviting, training, aggregating, done, aborted };

struct RoundState {
  int round = 0;
  nn::ParamVector global;
  std::vector<int> participants;
  std::map<int, nn::ParamVector> received;
  RoundStatus status = RoundStatus::inviting;
};

struct SelectionPolicy {
  enum class Kind { all_available, sample_k };
  Kind kind = Kind::all_available;
  int k = 0;
};

// Invitation pass: every invited coordinator accepts iff it has a worker
// available; returns accepting ids sorted ascending. Deterministic under
// the seed.
std::vector<int> schedule_round(const std::vector<Collaborator>& pool,
                                const SelectionPolicy& policy, std::uint64_t seed);

struct LocalUpdate {
  nn::ParamVector params;
  double sim_seconds = 0.0;
  bool empty_shard = false;
};

// E epochs of SGD on the collaborator's shard starting from the global
// parameters; the collaborator's shuffle stream advances, the global
// vector is left untouched.
LocalUpdate local_update(Collaborator& c, const nn::ParamVector& global,
                         const nn::GruLayout& layout, const std::vector<nn::Sequence>& data);

// Elementwise weighted mean. Entries are reduced in ascending id order so
// the result is independent of report arrival order, bit for bit.
nn::ParamVector aggregate(const std::map<int, nn::ParamVector>& received,
                          const std::map<int, double>& weights);

struct FederationConfig {
  int rounds = 20;
  SelectionPolicy policy;
  enum class Weighting { by_shard_size, uniform } weighting = Weighting::by_shard_size;
  double round_timeout_s = 0.0;  // 0 disables the simulated-time barrier
  std::uint64_t seed = 0;
  bool track_loss = true;  // per-round global objective (full pass, costs time)
};

struct RoundRecord {
  int round = 0;  // 0 is the pre-training snapshot
  RoundStatus status = RoundStatus::done;
  double loss = 0.0;
  double accuracy = 0.0;
  std::vector<int> participants;
};

struct FederationResult {
  nn::GruModel model;
  std::vector<RoundRecord> history;
};

// Synchronous rounds of select / train / aggregate. Aborted rounds (no
// acceptances, or a straggler past the simulated timeout) leave the global
// model untouched and are recorded; the federation moves on.
FederationResult run_federation(std::vector<Collaborator>& pool, const nn::GruModel& init,
                                const std::vector<nn::Sequence>& data,
                                const std::vector<int>& eval_indices,
                                const FederationConfig& config);

// Size-weighted mean of per-shard losses; the objective the federation
// optimizes. Matches dataset_loss on the union of shards up to summation
// order.
double federated_objective(const nn::GruModel& model, const std::vector<nn::Sequence>& data,
                           const std::vector<Collaborator>& pool, double reg_weight);

}  // namespace fleam::fl
