#include "fleam/econ/economics.hpp"

#include <cmath>

#include "fleam/core/csv.hpp"
#include "fleam/core/errors.hpp"

namespace fleam::econ {

std::vector<BotnetOffer> load_price_list(const std::string& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw ConfigError("price list is empty: " + path);
  const auto header = csv::split(lines[0]);
  const std::vector<std::string> expected = {"name", "bot_type", "population", "rental_usd",
                                             "setup_usd"};
  if (header.size() != expected.size()) {
    throw ConfigError("price list must have columns name,bot_type,population,rental_usd,setup_usd");
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (csv::trim(header[i]) != expected[i]) {
      throw ConfigError("price list header mismatch at column " + std::to_string(i + 1));
    }
  }
  std::vector<BotnetOffer> offers;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = csv::split(lines[i]);
    if (f.size() != expected.size()) {
      throw ConfigError("price list row " + std::to_string(i + 1) + ": wrong field count");
    }
    BotnetOffer o;
    o.name = csv::trim(f[0]);
    o.bot_type = csv::trim(f[1]);
    try {
      o.population = std::stol(csv::trim(f[2]));
      o.rental_usd = std::stod(csv::trim(f[3]));
      o.setup_usd = std::stod(csv::trim(f[4]));
    } catch (const std::exception&) {
      throw ConfigError("price list row " + std::to_string(i + 1) + ": bad numeric field");
    }
    if (o.population < 1) throw ConfigError("price list: population must be >= 1");
    if (o.rental_usd < 0 || o.setup_usd < 0) {
      throw ConfigError("price list: prices must be non-negative");
    }
    offers.push_back(std::move(o));
  }
  return offers;
}

void save_price_list(const std::string& path, const std::vector<BotnetOffer>& offers) {
  std::vector<std::string> lines;
  lines.push_back("name,bot_type,population,rental_usd,setup_usd");
  for (const BotnetOffer& o : offers) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%ld,%g,%g", o.population, o.rental_usd, o.setup_usd);
    lines.push_back(o.name + "," + o.bot_type + "," + buf);
  }
  csv::write_lines(path, lines);
}

std::vector<BotnetOffer> builtin_price_list() {
  return {
      {"Botnet-Canada", "Computers", 1000, 270, 0},
      {"Botnet-the U.K.", "Computers", 1000, 240, 0},
      {"Botnet-France", "Computers", 1000, 200, 0},
      {"Botnet-the U.S.", "Computers", 1000, 180, 0},
      {"Boy Webcam", "Hacked IIoT device", 100, 1, 0},
      {"Girl Webcam", "Hacked IIoT device", 100, 100, 0},
      {"Remote controller", "Administration tool", 1, 40, 0},
  };
}

Ratio offensive_firepower(double code_out, double code_in) {
  if (code_in == 0.0) throw DomainError("offensive firepower needs code_in > 0");
  if (code_in < 0 || code_out < 0) throw DomainError("traffic rates must be non-negative");
  Ratio r;
  r.value = code_out / code_in;
  r.weak = r.value <= 1.0;
  return r;
}

double mitigation_time(const std::vector<Flow>& flows) {
  double total = 0.0;
  for (const Flow& f : flows) {
    if (f.count < 0 || f.per_flow_delay < 0) {
      throw DomainError("flow counts and delays must be non-negative");
    }
    total += f.per_flow_delay * f.count;
  }
  return total;
}

double attack_cost_rate(const BotnetOffer& offer, double mitigation_seconds,
                        double firepower_constant) {
  if (!(mitigation_seconds > 0)) {
    throw DomainError("mitigation time must be positive");
  }
  const double price = offer.rental_usd + offer.setup_usd;
  double firepower = firepower_constant;
  if (firepower <= 0) {
    if (price <= 0) return 0.0;  // free botnet: no running cost
    firepower = static_cast<double>(offer.population) / price;
  }
  return (1.0 / firepower) * (static_cast<double>(offer.population) / mitigation_seconds);
}

ProfitResult profit(double value_attack, double cost_attack, bool attackable_set_nonempty) {
  ProfitResult r;
  r.profit = value_attack - cost_attack;
  r.viable = attackable_set_nonempty && r.profit > 0.0;
  return r;
}

std::vector<CostRow> cost_table(const std::vector<BotnetOffer>& offers,
                                double classic_mitigation_s, double fleam_mitigation_s) {
  std::vector<CostRow> rows;
  rows.reserve(offers.size());
  for (const BotnetOffer& o : offers) {
    CostRow row;
    row.name = o.name;
    row.classic_per_sec = attack_cost_rate(o, classic_mitigation_s);
    row.fleam_per_sec = attack_cost_rate(o, fleam_mitigation_s);
    row.classic_per_hour = row.classic_per_sec * 3600.0;
    row.fleam_per_hour = row.fleam_per_sec * 3600.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

void LotkaVolterraParams::validate() const {
  // zero coupling is allowed: it decouples the system into plain
  // exponential growth/decay, a useful calibration case
  if (!(a1 >= 0 && a2 >= 0 && a3 >= 0 && a4 >= 0)) {
    throw ConfigError("lotka-volterra constants must be non-negative");
  }
  if (!(step > 0)) throw ConfigError("integration step must be positive");
}

namespace {

struct LvDeriv {
  double di, dn;
};

LvDeriv lv_rhs(const LotkaVolterraParams& p, double idle, double bots) {
  return {p.a1 * idle - p.a2 * idle * bots, p.a3 * idle * bots - p.a4 * bots};
}

}  // namespace

std::vector<LvPoint> lv_dynamics(const LotkaVolterraParams& p, double idle0, double bots0,
                                 double horizon) {
  p.validate();
  if (!(idle0 > 0 && bots0 > 0)) throw ConfigError("initial populations must be positive");
  if (!(horizon > 0)) throw ConfigError("horizon must be positive");

  const std::size_t steps = static_cast<std::size_t>(std::ceil(horizon / p.step));
  std::vector<LvPoint> trajectory;
  trajectory.reserve(steps + 1);
  double t = 0, idle = idle0, bots = bots0;
  trajectory.push_back({t, idle, bots});
  for (std::size_t s = 0; s < steps; ++s) {
    const double h = std::min(p.step, horizon - t);
    const LvDeriv k1 = lv_rhs(p, idle, bots);
    const LvDeriv k2 = lv_rhs(p, idle + 0.5 * h * k1.di, bots + 0.5 * h * k1.dn);
    const LvDeriv k3 = lv_rhs(p, idle + 0.5 * h * k2.di, bots + 0.5 * h * k2.dn);
    const LvDeriv k4 = lv_rhs(p, idle + h * k3.di, bots + h * k3.dn);
    idle += h / 6.0 * (k1.di + 2 * k2.di + 2 * k3.di + k4.di);
    bots += h / 6.0 * (k1.dn + 2 * k2.dn + 2 * k3.dn + k4.dn);
    t += h;
    if (!(idle > 0) || !(bots > 0) || !std::isfinite(idle) || !std::isfinite(bots)) {
      throw IntegrationError("state left the positive quadrant at t=" + std::to_string(t) +
                             "; retry with a smaller step");
    }
    trajectory.push_back({t, idle, bots});
  }
  return trajectory;
}

double lv_first_integral(const LotkaVolterraParams& p, double idle, double bots) {
  return p.a3 * idle - p.a4 * std::log(idle) + p.a2 * bots - p.a1 * std::log(bots);
}

}  // namespace fleam::econ
