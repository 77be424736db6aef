#include "fleam/fl/federation.hpp"

#include <algorithm>
#include <cmath>

#include "fleam/core/errors.hpp"

namespace fleam::fl {

std::vector<Collaborator> make_collaborators(const std::vector<std::vector<int>>& shards,
                                             const nn::TrainConfig& base) {
  std::vector<Collaborator> pool;
  pool.reserve(shards.size());
  for (std::size_t i = 0; i < shards.size(); ++i) {
    nn::TrainConfig cfg = base;
    cfg.seed = base.seed + static_cast<std::uint64_t>(i);
    pool.emplace_back(static_cast<int>(i), shards[i], cfg);
  }
  return pool;
}

std::vector<int> schedule_round(const std::vector<Collaborator>& pool,
                                const SelectionPolicy& policy, std::uint64_t seed) {
  if (pool.empty()) throw ConfigError("collaborator pool is empty");
  std::vector<int> invited;
  if (policy.kind == SelectionPolicy::Kind::all_available) {
    for (const Collaborator& c : pool) invited.push_back(c.id);
  } else {
    if (policy.k < 1) throw ConfigError("sample_k policy needs k >= 1");
    std::vector<int> ids;
    for (const Collaborator& c : pool) ids.push_back(c.id);
    Rng rng(seed);
    rng.shuffle(ids);
    ids.resize(std::min<std::size_t>(ids.size(), static_cast<std::size_t>(policy.k)));
    invited = std::move(ids);
  }
  std::vector<int> accepted;
  for (int id : invited) {
    const auto it = std::find_if(pool.begin(), pool.end(),
                                 [id](const Collaborator& c) { return c.id == id; });
    if (it != pool.end() && it->accepts_invitation()) accepted.push_back(id);
  }
  std::sort(accepted.begin(), accepted.end());
  return accepted;
}

LocalUpdate local_update(Collaborator& c, const nn::ParamVector& global,
                         const nn::GruLayout& layout, const std::vector<nn::Sequence>& data) {
  LocalUpdate out;
  if (c.shard.empty()) {
    out.params = global;
    out.empty_shard = true;
    return out;
  }
  nn::GruModel model = nn::GruModel::unflatten(global, layout);
  for (int e = 0; e < c.config.epochs; ++e) {
    nn::sgd_epoch_inplace(model, data, c.shard, c.config, c.rng);
  }
  out.params = model.flatten();
  out.sim_seconds = c.sim_seconds_per_epoch * c.config.epochs;
  return out;
}

nn::ParamVector aggregate(const std::map<int, nn::ParamVector>& received,
                          const std::map<int, double>& weights) {
  if (received.empty()) throw ProtocolError("aggregate called with no reports");
  if (received.size() != weights.size()) {
    throw ProtocolError("aggregation barrier violated: report/weight sets differ");
  }
  double total = 0.0;
  for (const auto& [id, w] : weights) {
    if (received.find(id) == received.end()) {
      throw ProtocolError("aggregation barrier violated: participant " + std::to_string(id) +
                          " has not reported");
    }
    if (w < 0) throw ProtocolError("negative aggregation weight");
    total += w;
  }
  if (!(total > 0)) throw ProtocolError("aggregation weights sum to zero");

  const auto& first = received.begin()->second;
  nn::ParamVector out;
  out.layout_id = first.layout_id;
  out.values.assign(first.values.size(), 0.0);
  // std::map iterates ascending by id: sorted reduction
  for (const auto& [id, params] : received) {
    if (params.layout_id != out.layout_id) {
      throw ProtocolError("parameter layout mismatch in aggregation");
    }
    if (params.values.size() != out.values.size()) {
      throw ProtocolError("parameter length mismatch in aggregation");
    }
    const double w = weights.at(id) / total;
    for (std::size_t k = 0; k < out.values.size(); ++k) {
      out.values[k] += w * params.values[k];
    }
  }
  return out;
}

double federated_objective(const nn::GruModel& model, const std::vector<nn::Sequence>& data,
                           const std::vector<Collaborator>& pool, double reg_weight) {
  double total_records = 0;
  for (const Collaborator& c : pool) total_records += static_cast<double>(c.shard.size());
  if (total_records == 0) return 0.0;
  double objective = 0.0;
  for (const Collaborator& c : pool) {
    if (c.shard.empty()) continue;
    const double local = nn::dataset_loss(model, data, c.shard, reg_weight);
    objective += (static_cast<double>(c.shard.size()) / total_records) * local;
  }
  return objective;
}

FederationResult run_federation(std::vector<Collaborator>& pool, const nn::GruModel& init,
                                const std::vector<nn::Sequence>& data,
                                const std::vector<int>& eval_indices,
                                const FederationConfig& config) {
  if (pool.empty()) throw ConfigError("collaborator pool is empty");
  const nn::GruLayout layout = init.layout();

  RoundState state;
  state.global = init.flatten();

  FederationResult result;
  auto snapshot = [&](int round, RoundStatus status, const std::vector<int>& participants) {
    RoundRecord rec;
    rec.round = round;
    rec.status = status;
    rec.participants = participants;
    const nn::GruModel m = nn::GruModel::unflatten(state.global, layout);
    rec.accuracy = eval_indices.empty() ? 0.0 : nn::accuracy(m, data, eval_indices);
    rec.loss = config.track_loss
                   ? federated_objective(m, data, pool, pool.front().config.reg_weight)
                   : 0.0;
    result.history.push_back(std::move(rec));
  };

  snapshot(0, RoundStatus::done, {});

  for (int t = 1; t <= config.rounds; ++t) {
    state.round = t;
    state.status = RoundStatus::inviting;
    state.participants =
        schedule_round(pool, config.policy, mix_seed(config.seed, static_cast<std::uint64_t>(t)));
    state.received.clear();
    if (state.participants.empty()) {
      state.status = RoundStatus::aborted;
      snapshot(t, RoundStatus::aborted, {});
      continue;
    }

    state.status = RoundStatus::training;
    bool timed_out = false;
    std::map<int, double> weights;
    for (int id : state.participants) {
      Collaborator& c = *std::find_if(pool.begin(), pool.end(),
                                      [id](const Collaborator& x) { return x.id == id; });
      LocalUpdate update = local_update(c, state.global, layout, data);
      if (config.round_timeout_s > 0 && update.sim_seconds > config.round_timeout_s) {
        timed_out = true;
        break;
      }
      state.received.emplace(id, std::move(update.params));
      weights[id] = config.weighting == FederationConfig::Weighting::uniform
                        ? 1.0
                        : static_cast<double>(c.shard.size());
    }
    if (timed_out) {
      // synchronous barrier: a straggler aborts the whole round; no
      // partial averaging
      state.status = RoundStatus::aborted;
      snapshot(t, RoundStatus::aborted, state.participants);
      continue;
    }

    state.status = RoundStatus::aggregating;
    state.global = aggregate(state.received, weights);
    state.status = RoundStatus::done;
    snapshot(t, RoundStatus::done, state.participants);
  }

  result.model = nn::GruModel::unflatten(state.global, layout);
  return result;
}

}  // namespace fleam::fl
