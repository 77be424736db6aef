#pragma once

#include <string>
#include <vector>

namespace fleam::econ {

// One botnet-for-hire offer from the price list.
struct BotnetOffer {
  std::string name;
  std::string bot_type;
  long population = 0;
  double rental_usd = 0.0;
  double setup_usd = 0.0;
};

// price list csv: name,bot_type,population,rental_usd,setup_usd
std::vector<BotnetOffer> load_price_list(const std::string& path);
void save_price_list(const std::string& path, const std::vector<BotnetOffer>& offers);
std::vector<BotnetOffer> builtin_price_list();

struct Ratio {
  double value = 0.0;
  bool weak = false;  // amplification at or below 1
};

// Attack output per unit of control traffic; flags ratios <= 1.
Ratio offensive_firepower(double code_out, double code_in);

struct Flow {
  double count = 0;          // malicious codes of this kind
  double per_flow_delay = 0; // seconds to defeat one
};

// Total mitigation delay: sum of count * per-flow delay.
double mitigation_time(const std::vector<Flow>& flows);

// Attacker's running cost in dollars per second. The firepower constant is
// calibrated as population / (rental + setup), which reduces the rate to
// (rental + setup) / mitigation seconds; pass firepower_constant > 0 to use
// a different calibration.
double attack_cost_rate(const BotnetOffer& offer, double mitigation_seconds,
                        double firepower_constant = 0.0);

struct ProfitResult {
  double profit = 0.0;
  bool viable = false;  // strictly positive profit and a non-empty target set
};

ProfitResult profit(double value_attack, double cost_attack, bool attackable_set_nonempty);

// Cost table mirroring the per-second and per-hour report layout.
struct CostRow {
  std::string name;
  double classic_per_sec = 0;
  double fleam_per_sec = 0;
  double classic_per_hour = 0;
  double fleam_per_hour = 0;
};

std::vector<CostRow> cost_table(const std::vector<BotnetOffer>& offers,
                                double classic_mitigation_s, double fleam_mitigation_s);

// Lotka-Volterra dynamics between idle resources and the bot population:
//   dI/dt = a1*I - a2*I*N
//   dN/dt = a3*I*N - a4*N
struct LotkaVolterraParams {
  double a1 = 1.0, a2 = 0.1, a3 = 0.1, a4 = 1.0;
  double step = 1e-3;

  void validate() const;
};

struct LvPoint {
  double t = 0, idle = 0, bots = 0;
};

// Fixed-step RK4. Throws IntegrationError if the state leaves the positive
// quadrant, which signals too coarse a step.
std::vector<LvPoint> lv_dynamics(const LotkaVolterraParams& p, double idle0, double bots0,
                                 double horizon);

// Conserved quantity of the system; constant along exact trajectories.
double lv_first_integral(const LotkaVolterraParams& p, double idle, double bots);

}  // namespace fleam::econ
