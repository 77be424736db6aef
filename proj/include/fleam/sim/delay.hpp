#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fleam::sim {

enum class DelayModel { victim_centric, attacker_centric };

std::string delay_model_name(DelayModel m);

// Per-pattern mitigation delays in milliseconds plus nominal emission
// intervals; pattern 0 is the stealthiest, pattern 2 the most intense.
struct PatternTable {
  std::array<double, 3> victim_ms = {1900, 2800, 4400};
  std::array<double, 3> attacker_ms = {600, 800, 1200};
  std::array<double, 3> emission_interval = {5, 10, 15};

  double delay_seconds(DelayModel model, std::size_t pattern) const {
    const auto& ms = model == DelayModel::victim_centric ? victim_ms : attacker_ms;
    return ms[pattern] * 1e-3;
  }
};

struct AttackScenario {
  long bot_count = 1000;
  std::array<double, 3> pattern_mix = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  PatternTable patterns;
  DelayModel delay_model = DelayModel::victim_centric;
  double analysis_time = 7.0;   // per-flow analysis service time
  double emission_jitter = 0.2; // uniform +-20% around the nominal interval
  int trials = 1000;
  std::uint64_t seed = 1;

  void validate() const;
};

struct DelayReport {
  double mean_delay_s = 0;
  double stdev_delay_s = 0;
  double ci95_halfwidth_s = 0;
  double per_1000_bots_s = 0;
  double mean_queue_makespan = 0;  // FIFO analysis-queue trace, scenario time units
  int trials = 0;
  long bot_count = 0;
  std::string model;
  std::vector<double> trial_delays_s;
};

// Monte-Carlo total mitigation delay: per trial, bots draw patterns from
// the mix and the headline figure is the plain sum of per-flow delays.
// Emission jitter and the FIFO analysis queue only shape the makespan
// trace, not the headline sum.
DelayReport run_delay_simulation(const AttackScenario& scenario);

// Expected attacker-centric / victim-centric delay ratio for a mix.
double closed_form_delay_ratio(const AttackScenario& scenario);

struct DelayComparison {
  DelayReport victim;
  DelayReport attacker;
  double ratio = 0;             // attacker mean / victim mean
  double closed_form_ratio = 0;
};

DelayComparison compare_delay_models(AttackScenario scenario);

}  // namespace fleam::sim
