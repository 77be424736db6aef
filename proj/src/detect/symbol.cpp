#include "fleam/detect/symbol.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <nlohmann/json.hpp>

#include "fleam/core/csv.hpp"
#include "fleam/core/errors.hpp"

namespace fleam::detect {

namespace {

// FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

double scale_clamped(double v, double lo, double hi) {
  if (hi <= lo) return 0.0;  // degenerate range observed during fit
  const double s = (v - lo) / (hi - lo);
  return std::clamp(s, 0.0, 1.0);
}

const std::array<std::string, 9> kColumns = {
    "application", "policy", "direction", "dest_ip_port", "source_ip",
    "protocol", "packet_length", "inter_arrival", "sla"};

}  // namespace

SymbolCodec SymbolCodec::fit(const std::vector<FlowWindow>& windows, const Options& opt) {
  SymbolCodec codec;
  codec.opt_ = opt;
  bool first = true;
  std::map<std::string, int> seen[4];
  std::map<std::string, int> symbols;
  auto admit = [&](int f, const std::string& v) {
    if (seen[f].count(v)) return;
    if (static_cast<int>(codec.vocabs_[f].size()) >= opt.max_vocab) return;
    seen[f][v] = static_cast<int>(codec.vocabs_[f].size());
    codec.vocabs_[f].push_back(v);
  };
  for (const FlowWindow& w : windows) {
    for (const SymbolVector& sv : w.packets) {
      admit(0, sv.application);
      admit(1, sv.policy);
      admit(2, sv.protocol);
      admit(3, sv.sla_class);
      if (first) {
        codec.len_min_ = codec.len_max_ = sv.packet_length;
        codec.gap_min_ = codec.gap_max_ = sv.inter_arrival;
        first = false;
      } else {
        codec.len_min_ = std::min(codec.len_min_, sv.packet_length);
        codec.len_max_ = std::max(codec.len_max_, sv.packet_length);
        codec.gap_min_ = std::min(codec.gap_min_, sv.inter_arrival);
        codec.gap_max_ = std::max(codec.gap_max_, sv.inter_arrival);
      }
    }
  }
  // symbol-class vocabulary needs the categorical codes, so second pass
  for (const FlowWindow& w : windows) {
    for (const SymbolVector& sv : w.packets) {
      const std::string key = codec.symbol_key(sv);
      if (symbols.count(key)) continue;
      if (static_cast<int>(codec.symbol_vocab_.size()) >= opt.max_symbol_classes - 1) continue;
      symbols[key] = static_cast<int>(codec.symbol_vocab_.size());
      codec.symbol_vocab_.push_back(key);
    }
  }
  return codec;
}

int SymbolCodec::input_width() const {
  int w = 0;
  for (const auto& v : vocabs_) w += static_cast<int>(v.size()) + 1;  // +1 unknown slot
  w += 1;                    // direction
  w += 2 * opt_.hash_buckets;  // dest, source
  w += 2;                    // packet_length, inter_arrival
  return w;
}

nn::Vector SymbolCodec::encode(const SymbolVector& sv) const {
  if (sv.packet_length < 0 || sv.inter_arrival < 0) {
    throw InputError("packet_length and inter_arrival must be non-negative");
  }
  nn::Vector out = nn::Vector::Zero(input_width());
  int base = 0;
  const std::string* values[4] = {&sv.application, &sv.policy, &sv.protocol, &sv.sla_class};
  for (int f = 0; f < 4; ++f) {
    const auto& vocab = vocabs_[f];
    auto it = std::find(vocab.begin(), vocab.end(), *values[f]);
    const int slot = it == vocab.end() ? 0 : 1 + static_cast<int>(it - vocab.begin());
    out(base + slot) = 1.0;
    base += static_cast<int>(vocab.size()) + 1;
  }
  out(base++) = sv.outbound ? 1.0 : 0.0;
  out(base + static_cast<int>(fnv1a(sv.dest_ip_port) % opt_.hash_buckets)) = 1.0;
  base += opt_.hash_buckets;
  out(base + static_cast<int>(fnv1a(sv.source_ip) % opt_.hash_buckets)) = 1.0;
  base += opt_.hash_buckets;
  out(base++) = scale_clamped(sv.packet_length, len_min_, len_max_);
  out(base++) = scale_clamped(sv.inter_arrival, gap_min_, gap_max_);
  return out;
}

std::string SymbolCodec::symbol_key(const SymbolVector& sv) const {
  auto code = [this](int f, const std::string& v) {
    const auto& vocab = vocabs_[f];
    auto it = std::find(vocab.begin(), vocab.end(), v);
    return it == vocab.end() ? 0 : 1 + static_cast<int>(it - vocab.begin());
  };
  std::string key;
  key += std::to_string(code(0, sv.application)) + '|';
  key += std::to_string(code(1, sv.policy)) + '|';
  key += (sv.outbound ? "1|" : "0|");
  key += std::to_string(fnv1a(sv.dest_ip_port) % opt_.hash_buckets) + '|';
  key += std::to_string(fnv1a(sv.source_ip) % opt_.hash_buckets) + '|';
  key += std::to_string(code(2, sv.protocol)) + '|';
  key += std::to_string(code(3, sv.sla_class));
  return key;
}

int SymbolCodec::symbol_class(const SymbolVector& sv) const {
  const std::string key = symbol_key(sv);
  auto it = std::find(symbol_vocab_.begin(), symbol_vocab_.end(), key);
  return it == symbol_vocab_.end() ? 0 : 1 + static_cast<int>(it - symbol_vocab_.begin());
}

nlohmann::json SymbolCodec::to_json() const {
  nlohmann::json j;
  j["max_vocab"] = opt_.max_vocab;
  j["hash_buckets"] = opt_.hash_buckets;
  j["max_symbol_classes"] = opt_.max_symbol_classes;
  j["vocabs"] = vocabs_;
  j["symbol_vocab"] = symbol_vocab_;
  j["len_min"] = len_min_;
  j["len_max"] = len_max_;
  j["gap_min"] = gap_min_;
  j["gap_max"] = gap_max_;
  return j;
}

SymbolCodec SymbolCodec::from_json(const nlohmann::json& j) {
  SymbolCodec c;
  c.opt_.max_vocab = j.at("max_vocab").get<int>();
  c.opt_.hash_buckets = j.at("hash_buckets").get<int>();
  c.opt_.max_symbol_classes = j.at("max_symbol_classes").get<int>();
  c.vocabs_ = j.at("vocabs").get<std::vector<std::vector<std::string>>>();
  c.symbol_vocab_ = j.at("symbol_vocab").get<std::vector<std::string>>();
  c.len_min_ = j.at("len_min").get<double>();
  c.len_max_ = j.at("len_max").get<double>();
  c.gap_min_ = j.at("gap_min").get<double>();
  c.gap_max_ = j.at("gap_max").get<double>();
  if (c.vocabs_.size() != 4) throw ConfigError("codec json: expected 4 vocabularies");
  return c;
}

bool operator==(const SymbolCodec& a, const SymbolCodec& b) {
  return a.opt_.max_vocab == b.opt_.max_vocab && a.opt_.hash_buckets == b.opt_.hash_buckets &&
         a.opt_.max_symbol_classes == b.opt_.max_symbol_classes && a.vocabs_ == b.vocabs_ &&
         a.symbol_vocab_ == b.symbol_vocab_ && a.len_min_ == b.len_min_ &&
         a.len_max_ == b.len_max_ && a.gap_min_ == b.gap_min_ && a.gap_max_ == b.gap_max_;
}

std::vector<FlowWindow> windows_from_csv(const std::string& path, int window_len) {
  if (window_len < 1) throw ConfigError("window length must be >= 1");
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw ConfigError("window csv is empty: " + path);
  const auto header = csv::split(lines[0]);
  if (header.size() != kColumns.size()) {
    throw ConfigError("window csv header must have 9 columns");
  }
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    if (csv::trim(header[i]) != kColumns[i]) {
      throw ConfigError("window csv header mismatch at column " + std::to_string(i + 1) +
                        ": expected '" + kColumns[i] + "'");
    }
  }
  std::vector<FlowWindow> windows;
  FlowWindow current;
  current.declared_len = window_len;
  double clock = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = csv::split(lines[i]);
    if (f.size() != kColumns.size()) {
      throw ConfigError("window csv row " + std::to_string(i + 1) + ": wrong field count");
    }
    SymbolVector sv;
    sv.application = csv::trim(f[0]);
    sv.policy = csv::trim(f[1]);
    const std::string dir = csv::trim(f[2]);
    if (dir != "in" && dir != "out") {
      throw ConfigError("window csv row " + std::to_string(i + 1) +
                        ": direction must be 'in' or 'out'");
    }
    sv.outbound = dir == "out";
    sv.dest_ip_port = csv::trim(f[3]);
    sv.source_ip = csv::trim(f[4]);
    sv.protocol = csv::trim(f[5]);
    try {
      sv.packet_length = std::stod(f[6]);
      sv.inter_arrival = std::stod(f[7]);
    } catch (const std::exception&) {
      throw ConfigError("window csv row " + std::to_string(i + 1) + ": bad numeric field");
    }
    sv.sla_class = csv::trim(f[8]);
    if (current.packets.empty()) current.t_begin = clock;
    clock += sv.inter_arrival;
    current.t_end = clock;
    current.packets.push_back(std::move(sv));
    if (static_cast<int>(current.packets.size()) == window_len) {
      current.window_id = "w" + std::to_string(windows.size());
      windows.push_back(std::move(current));
      current = FlowWindow{};
      current.declared_len = window_len;
    }
  }
  if (!current.packets.empty()) {
    current.window_id = "w" + std::to_string(windows.size());
    windows.push_back(std::move(current));
  }
  return windows;
}

void windows_to_csv(const std::string& path, const std::vector<FlowWindow>& windows) {
  std::vector<std::string> lines;
  lines.push_back(csv::join({kColumns.begin(), kColumns.end()}));
  for (const FlowWindow& w : windows) {
    for (const SymbolVector& sv : w.packets) {
      lines.push_back(csv::join({sv.application, sv.policy, sv.outbound ? "out" : "in",
                                 sv.dest_ip_port, sv.source_ip, sv.protocol,
                                 std::to_string(sv.packet_length),
                                 std::to_string(sv.inter_arrival), sv.sla_class}));
    }
  }
  csv::write_lines(path, lines);
}

}  // namespace fleam::detect
