#include "fleam/sim/accuracy.hpp"

#include <algorithm>
#include <cmath>

#include "fleam/core/errors.hpp"
#include "fleam/core/rng.hpp"
#include "fleam/fl/federation.hpp"

namespace fleam::sim {

namespace {

detect::SymbolVector symbol_template(int k, int defender, Rng& rng) {
  detect::SymbolVector sv;
  sv.application = "app" + std::to_string(k);
  sv.policy = "policy" + std::to_string(k % 3);
  sv.outbound = k % 2 == 0;
  sv.dest_ip_port = "10.1.0." + std::to_string(k) + ":80";
  sv.source_ip = "10.0." + std::to_string(defender) + "." + std::to_string(k);
  sv.protocol = "proto" + std::to_string(k % 4);
  sv.sla_class = "sla" + std::to_string(k % 2);
  sv.packet_length = 200.0 + 60.0 * k + rng.uniform(-15.0, 15.0);
  sv.inter_arrival = 0.01 + 0.002 * k + rng.uniform(0.0, 0.002);
  return sv;
}

// defender d's pattern: a rotation of cycle_len consecutive templates
int pattern_symbol(const TrafficConfig& cfg, int defender, int pos) {
  const int base = (defender * 3) % cfg.alphabet;
  return (base + pos % cfg.cycle_len) % cfg.alphabet;
}

detect::FlowWindow make_window(const TrafficConfig& cfg, int pattern_owner, int source_defender,
                               bool malicious, Rng& rng, const std::string& id) {
  detect::FlowWindow w;
  w.window_id = id;
  w.declared_len = cfg.window_len;
  int pos = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cfg.cycle_len)));
  for (int i = 0; i < cfg.window_len; ++i) {
    int sym;
    if (malicious && rng.next_double() >= cfg.stealth) {
      // order violation: any symbol of the owner's vocabulary
      const int r = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cfg.cycle_len)));
      sym = pattern_symbol(cfg, pattern_owner, r);
      pos = r + 1;
    } else if (!malicious && rng.next_double() < cfg.pattern_noise) {
      const int r = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cfg.cycle_len)));
      sym = pattern_symbol(cfg, pattern_owner, r);
      pos = r + 1;
    } else {
      sym = pattern_symbol(cfg, pattern_owner, pos);
      ++pos;
    }
    w.packets.push_back(symbol_template(sym, source_defender, rng));
  }
  return w;
}

}  // namespace

void TrafficConfig::validate() const {
  if (defenders < 1) throw ConfigError("traffic needs at least one defender");
  if (window_len < 2) throw ConfigError("window length must be >= 2");
  if (cycle_len < 2 || cycle_len > alphabet) {
    throw ConfigError("cycle length must lie in [2, alphabet]");
  }
  if (!(pattern_noise >= 0 && pattern_noise < 1)) {
    throw ConfigError("pattern noise must lie in [0, 1)");
  }
  if (!(stealth >= 0 && stealth < 1)) throw ConfigError("stealth must lie in [0, 1)");
  if (!(frac_cross >= 0 && frac_cross <= 1)) throw ConfigError("frac_cross must lie in [0, 1]");
}

std::vector<detect::FlowWindow> synth_benign_windows(const TrafficConfig& cfg, int defender,
                                                     int count, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  std::vector<detect::FlowWindow> windows;
  windows.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    windows.push_back(make_window(cfg, defender, defender, false, rng,
                                  "benign-d" + std::to_string(defender) + "-" + std::to_string(i)));
  }
  return windows;
}

TrafficStream synth_traffic(const TrafficConfig& cfg, int benign_per_defender,
                            int malicious_total) {
  cfg.validate();
  TrafficStream stream;
  stream.n_defenders = cfg.defenders;
  Rng rng(mix_seed(cfg.seed, 0xe7a1));
  for (int d = 0; d < cfg.defenders; ++d) {
    for (int i = 0; i < benign_per_defender; ++i) {
      TrafficWindow tw;
      tw.window = make_window(cfg, d, d, false, rng,
                              "eval-benign-d" + std::to_string(d) + "-" + std::to_string(i));
      tw.malicious = false;
      tw.observer = d;
      tw.target = d;
      stream.windows.push_back(std::move(tw));
    }
  }
  for (int i = 0; i < malicious_total; ++i) {
    TrafficWindow tw;
    tw.malicious = true;
    tw.observer = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cfg.defenders)));
    if (rng.next_double() < cfg.frac_cross && cfg.defenders > 1) {
      // aim at some other defender's victim
      int t = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cfg.defenders - 1)));
      if (t >= tw.observer) ++t;
      tw.target = t;
    } else {
      tw.target = tw.observer;
    }
    // bot traffic mimics the victim's pattern, emitted from the observer's net
    tw.window = make_window(cfg, tw.target, tw.observer, true, rng,
                            "eval-mal-" + std::to_string(i));
    stream.windows.push_back(std::move(tw));
  }
  return stream;
}

DetectorSet train_detector_set(const TrafficConfig& traffic, const DetectorTrainConfig& train) {
  traffic.validate();
  // per-defender benign training windows
  std::vector<std::vector<detect::FlowWindow>> benign(static_cast<std::size_t>(traffic.defenders));
  std::vector<detect::FlowWindow> pooled;
  for (int d = 0; d < traffic.defenders; ++d) {
    benign[static_cast<std::size_t>(d)] = synth_benign_windows(
        traffic, d, train.benign_windows_per_defender, mix_seed(train.seed, static_cast<std::uint64_t>(d)));
    pooled.insert(pooled.end(), benign[static_cast<std::size_t>(d)].begin(),
                  benign[static_cast<std::size_t>(d)].end());
  }

  // the alliance standardizes one encoding; training data is what differs
  detect::SymbolCodec::Options codec_opt;
  codec_opt.max_symbol_classes = traffic.alphabet + 4;
  const detect::SymbolCodec codec = detect::SymbolCodec::fit(pooled, codec_opt);

  nn::TrainConfig base;
  base.learning_rate = train.learning_rate;
  base.batch_size = train.batch_size;
  base.seed = train.seed;

  DetectorSet set;

  // federated joint detector: one shard of context samples per defender
  std::vector<nn::Sequence> all_samples;
  std::vector<std::vector<int>> shards(static_cast<std::size_t>(traffic.defenders));
  for (int d = 0; d < traffic.defenders; ++d) {
    auto samples = detect::context_samples(codec, benign[static_cast<std::size_t>(d)],
                                           train.context_len);
    for (auto& s : samples) {
      shards[static_cast<std::size_t>(d)].push_back(static_cast<int>(all_samples.size()));
      all_samples.push_back(std::move(s));
    }
  }
  nn::TrainConfig fed_cfg = base;
  fed_cfg.epochs = 1;
  std::vector<fl::Collaborator> pool = fl::make_collaborators(shards, fed_cfg);
  fl::FederationConfig fcfg;
  fcfg.rounds = train.federated_rounds;
  fcfg.seed = train.seed;
  fcfg.track_loss = false;
  const nn::GruModel init = nn::GruModel::random_init(codec.input_width(), train.hidden_dim,
                                                      codec.n_symbol_classes(), train.seed);
  fl::FederationResult fed = fl::run_federation(pool, init, all_samples, {}, fcfg);
  DefenderDetector shared;
  shared.model = fed.model;
  shared.profile = detect::build_baseline(fed.model, codec, pooled, train.quantile,
                                          train.context_len, traffic.window_len,
                                          train.anomaly_trigger);
  set.shared = std::move(shared);

  // local detectors: same architecture, but only the lone defender's
  // shallow capture and a smaller epoch budget
  for (int d = 0; d < traffic.defenders; ++d) {
    const auto& all_windows = benign[static_cast<std::size_t>(d)];
    const std::vector<detect::FlowWindow> windows(
        all_windows.begin(),
        all_windows.begin() + std::min<std::size_t>(all_windows.size(),
                                                    static_cast<std::size_t>(
                                                        std::max(1, train.local_windows))));
    auto samples = detect::context_samples(codec, windows, train.context_len);
    std::vector<int> idx(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) idx[i] = static_cast<int>(i);
    nn::TrainConfig local_cfg = base;
    local_cfg.epochs = train.local_epochs;
    local_cfg.seed = mix_seed(train.seed, 100 + static_cast<std::uint64_t>(d));
    nn::Trainer trainer(nn::GruModel::random_init(codec.input_width(), train.hidden_dim,
                                                  codec.n_symbol_classes(), local_cfg.seed),
                        local_cfg);
    trainer.fit(samples, idx);
    DefenderDetector det;
    det.model = trainer.model;
    det.profile = detect::build_baseline(trainer.model, codec, windows, train.quantile,
                                         train.context_len, traffic.window_len,
                                         train.anomaly_trigger);
    set.local.push_back(std::move(det));
  }
  return set;
}

AccuracyReport run_accuracy_simulation(const TrafficStream& stream, Cooperation cooperation,
                                       DelayModel placement, const DetectorSet& detectors) {
  if (!detectors.shared && detectors.local.empty()) {
    throw ConfigError("accuracy simulation needs at least one detector");
  }
  auto detector_for = [&](int observer) -> const DefenderDetector& {
    if (cooperation == Cooperation::individual && !detectors.local.empty()) {
      if (observer < 0 || observer >= static_cast<int>(detectors.local.size())) {
        throw ConfigError("observer has no local detector");
      }
      return detectors.local[static_cast<std::size_t>(observer)];
    }
    if (detectors.shared) return *detectors.shared;
    return detectors.local[static_cast<std::size_t>(observer)];
  };

  AccuracyReport rep;
  rep.cooperation = cooperation == Cooperation::individual ? "individual" : "joint";
  rep.placement = delay_model_name(placement);
  for (const TrafficWindow& tw : stream.windows) {
    const DefenderDetector& det = detector_for(tw.observer);
    if (tw.malicious) {
      ++rep.malicious_total;
      const bool catchable = cooperation == Cooperation::joint || tw.target == tw.observer;
      if (catchable && detect::classify(det.model, tw.window, det.profile).anomaly) {
        ++rep.malicious_dropped;
      }
    } else {
      ++rep.benign_total;
      if (!detect::classify(det.model, tw.window, det.profile).anomaly) {
        ++rep.benign_passed;
      }
    }
  }
  rep.bpr_defined = rep.benign_total > 0;
  rep.mdr_defined = rep.malicious_total > 0;
  rep.benign_pass_rate =
      rep.bpr_defined ? static_cast<double>(rep.benign_passed) / rep.benign_total : 0.0;
  rep.malicious_drop_rate =
      rep.mdr_defined ? static_cast<double>(rep.malicious_dropped) / rep.malicious_total : 0.0;
  rep.system_accuracy = (rep.benign_pass_rate + rep.malicious_drop_rate) / 2.0;
  return rep;
}

}  // namespace fleam::sim
