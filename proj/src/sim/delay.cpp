#include "fleam/sim/delay.hpp"

#include <algorithm>
#include <cmath>

#include "fleam/core/errors.hpp"
#include "fleam/core/rng.hpp"

namespace fleam::sim {

std::string delay_model_name(DelayModel m) {
  return m == DelayModel::victim_centric ? "victim-centric" : "attacker-centric";
}

void AttackScenario::validate() const {
  if (bot_count < 0) throw ConfigError("bot count must be non-negative");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  double mix = 0;
  for (double f : pattern_mix) {
    if (f < 0) throw ConfigError("pattern fractions must be non-negative");
    mix += f;
  }
  if (std::abs(mix - 1.0) > 1e-9) throw ConfigError("pattern fractions must sum to 1");
  if (!(analysis_time > 0)) throw ConfigError("analysis time must be positive");
  for (double v : patterns.victim_ms) {
    if (!(v > 0)) throw ConfigError("mitigation delays must be positive");
  }
  for (double v : patterns.attacker_ms) {
    if (!(v > 0)) throw ConfigError("mitigation delays must be positive");
  }
  for (double v : patterns.emission_interval) {
    if (!(v > 0)) throw ConfigError("emission intervals must be positive");
  }
  if (!(emission_jitter >= 0 && emission_jitter < 1)) {
    throw ConfigError("emission jitter must lie in [0, 1)");
  }
}

DelayReport run_delay_simulation(const AttackScenario& scenario) {
  scenario.validate();
  DelayReport report;
  report.trials = scenario.trials;
  report.bot_count = scenario.bot_count;
  report.model = delay_model_name(scenario.delay_model);
  report.trial_delays_s.reserve(static_cast<std::size_t>(scenario.trials));

  const std::vector<double> mix(scenario.pattern_mix.begin(), scenario.pattern_mix.end());
  double makespan_sum = 0;
  for (int trial = 0; trial < scenario.trials; ++trial) {
    Rng rng(mix_seed(scenario.seed, static_cast<std::uint64_t>(trial)));
    std::array<double, 3> counts{0, 0, 0};
    std::vector<double> arrivals;
    arrivals.reserve(static_cast<std::size_t>(scenario.bot_count));
    for (long b = 0; b < scenario.bot_count; ++b) {
      const std::size_t pattern = rng.categorical(mix);
      counts[pattern] += 1;
      const double nominal = scenario.patterns.emission_interval[pattern];
      const double jitter =
          scenario.emission_jitter > 0
              ? rng.uniform(1.0 - scenario.emission_jitter, 1.0 + scenario.emission_jitter)
              : 1.0;
      arrivals.push_back(nominal * jitter);
    }
    // count * per-flow delay, the same form the economics module sums
    double delay = 0;
    for (std::size_t p = 0; p < 3; ++p) {
      delay += counts[p] * scenario.patterns.delay_seconds(scenario.delay_model, p);
    }
    report.trial_delays_s.push_back(delay);

    // single-server FIFO analysis queue; trace metric only
    std::sort(arrivals.begin(), arrivals.end());
    double server_free = 0;
    for (double a : arrivals) {
      server_free = std::max(server_free, a) + scenario.analysis_time;
    }
    makespan_sum += server_free;
  }

  double sum = 0;
  for (double d : report.trial_delays_s) sum += d;
  report.mean_delay_s = sum / scenario.trials;
  double var = 0;
  for (double d : report.trial_delays_s) {
    var += (d - report.mean_delay_s) * (d - report.mean_delay_s);
  }
  var = scenario.trials > 1 ? var / (scenario.trials - 1) : 0;
  report.stdev_delay_s = std::sqrt(var);
  report.ci95_halfwidth_s =
      1.959963984540054 * report.stdev_delay_s / std::sqrt(static_cast<double>(scenario.trials));
  report.per_1000_bots_s = scenario.bot_count > 0
                               ? report.mean_delay_s * 1000.0 / static_cast<double>(scenario.bot_count)
                               : 0;
  report.mean_queue_makespan = makespan_sum / scenario.trials;
  return report;
}

double closed_form_delay_ratio(const AttackScenario& scenario) {
  double victim = 0, attacker = 0;
  for (std::size_t p = 0; p < 3; ++p) {
    victim += scenario.pattern_mix[p] * scenario.patterns.delay_seconds(DelayModel::victim_centric, p);
    attacker +=
        scenario.pattern_mix[p] * scenario.patterns.delay_seconds(DelayModel::attacker_centric, p);
  }
  if (victim == 0) throw DomainError("victim-centric expected delay is zero");
  return attacker / victim;
}

DelayComparison compare_delay_models(AttackScenario scenario) {
  DelayComparison cmp;
  scenario.delay_model = DelayModel::victim_centric;
  cmp.victim = run_delay_simulation(scenario);
  scenario.delay_model = DelayModel::attacker_centric;
  cmp.attacker = run_delay_simulation(scenario);
  if (cmp.victim.mean_delay_s == 0) throw DomainError("victim-centric mean delay is zero");
  cmp.ratio = cmp.attacker.mean_delay_s / cmp.victim.mean_delay_s;
  cmp.closed_form_ratio = closed_form_delay_ratio(scenario);
  return cmp;
}

}  // namespace fleam::sim
