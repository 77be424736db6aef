#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fleam/detect/detector.hpp"
#include "fleam/sim/delay.hpp"

namespace fleam::sim {

// One window in the labeled stream. The observer is the defender in whose
// network the traffic appears; malicious windows carry the defender they
// aim at.
struct TrafficWindow {
  detect::FlowWindow window;
  bool malicious = false;
  int observer = 0;
  int target = 0;
};

struct TrafficStream {
  std::vector<TrafficWindow> windows;
  int n_defenders = 0;
};

// Each defender's benign traffic cycles through its own symbol pattern with
// occasional noise jumps; malicious traffic reuses the target's vocabulary
// but breaks the order with probability (1 - stealth), so detection hinges
// on how sharply a model has learned the transition structure.
struct TrafficConfig {
  int defenders = 4;
  int window_len = 40;
  int alphabet = 12;        // global symbol templates
  int cycle_len = 6;        // per-defender pattern length
  double pattern_noise = 0.06;
  double stealth = 0.55;    // fraction of malicious steps that follow the pattern
  double frac_cross = 0.5;  // malicious windows aimed at a non-local victim
  std::uint64_t seed = 11;

  void validate() const;
};

// count benign windows generated by the given defender's process
std::vector<detect::FlowWindow> synth_benign_windows(const TrafficConfig& cfg, int defender,
                                                     int count, std::uint64_t seed);

// Mixed evaluation stream: benign windows observed at their own defender
// plus malicious windows whose observer is the bot-side defender.
TrafficStream synth_traffic(const TrafficConfig& cfg, int benign_per_defender,
                            int malicious_total);

struct DefenderDetector {
  nn::GruModel model;
  detect::BaselineProfile profile;
};

struct DetectorSet {
  std::optional<DefenderDetector> shared;        // federated model + shared policy
  std::vector<DefenderDetector> local;           // one per defender; may be empty
};

struct DetectorTrainConfig {
  int hidden_dim = 16;
  int context_len = 4;
  double quantile = 0.05;
  double anomaly_trigger = 0.18;
  double learning_rate = 0.15;
  int batch_size = 32;
  int local_epochs = 1;       // individual-mode training budget
  int local_windows = 4;      // capture depth available to a lone defender
  int federated_rounds = 16;  // joint-mode rounds (one local epoch each)
  int benign_windows_per_defender = 12;
  std::uint64_t seed = 5;
};

// Trains the bundle the two defense modes compare: weak per-defender
// detectors from each defender's own benign windows, and one federated
// detector over all defenders' windows, sharing a common codec.
DetectorSet train_detector_set(const TrafficConfig& traffic, const DetectorTrainConfig& train);

enum class Cooperation { individual, joint };

struct AccuracyReport {
  double benign_pass_rate = 0;
  double malicious_drop_rate = 0;
  double system_accuracy = 0;  // exactly (bpr + mdr) / 2
  bool bpr_defined = false;
  bool mdr_defined = false;
  long benign_total = 0, benign_passed = 0;
  long malicious_total = 0, malicious_dropped = 0;
  std::string cooperation;
  std::string placement;
};

// Individual mode: each observer polices with its own detector and can only
// drop attacks aimed at itself; cross-defender attacks pass. Joint mode:
// the shared detector and policies cover every observer, so all attacks are
// catchable. The placement axis is carried through for reporting; catch
// rules follow the cooperation axis.
AccuracyReport run_accuracy_simulation(const TrafficStream& stream, Cooperation cooperation,
                                       DelayModel placement, const DetectorSet& detectors);

}  // namespace fleam::sim
