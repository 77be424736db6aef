#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "fleam/nn/model.hpp"

namespace fleam::detect {

// One packet's nine-feature profile; the unit of anomaly detection.
struct SymbolVector {
  std::string application;   // x1
  std::string policy;        // x2
  bool outbound = false;     // x3, false = inbound
  std::string dest_ip_port;  // x4
  std::string source_ip;     // x5
  std::string protocol;      // x6
  double packet_length = 0;  // x7, bytes, >= 0
  double inter_arrival = 0;  // x8, seconds, >= 0
  std::string sla_class;     // x9
};

struct FlowWindow {
  std::vector<SymbolVector> packets;
  std::string window_id;
  int declared_len = 0;  // expected packet count; a shorter window is partial
  double t_begin = 0;
  double t_end = 0;

  bool partial() const {
    return static_cast<int>(packets.size()) < declared_len;
  }
};

// Fixed-width encoding of symbols plus a symbol-class vocabulary. Low-
// cardinality categoricals get capped one-hot slots with a reserved
// unknown slot; destination and source identifiers are hashed into a
// fixed number of buckets; the two reals are min-max scaled on the fit
// data and clamped to [0,1] afterwards.
class SymbolCodec {
 public:
  struct Options {
    int max_vocab = 16;          // per low-cardinality feature
    int hash_buckets = 64;       // for dest_ip_port / source_ip
    int max_symbol_classes = 32; // capped vocabulary of categorical tuples
  };

  SymbolCodec() = default;

  static SymbolCodec fit(const std::vector<FlowWindow>& windows, const Options& opt);
  static SymbolCodec fit(const std::vector<FlowWindow>& windows) {
    return fit(windows, Options{});
  }

  nn::Vector encode(const SymbolVector& sv) const;

  // Class id of the symbol's categorical tuple; 0 is the reserved
  // unknown/other class.
  int symbol_class(const SymbolVector& sv) const;

  int input_width() const;
  int n_symbol_classes() const { return static_cast<int>(symbol_vocab_.size()) + 1; }
  const Options& options() const { return opt_; }

  nlohmann::json to_json() const;
  static SymbolCodec from_json(const nlohmann::json& j);

 private:
  Options opt_;
  // vocabularies in first-seen order: application, policy, protocol, sla
  std::vector<std::vector<std::string>> vocabs_{4};
  std::vector<std::string> symbol_vocab_;
  double len_min_ = 0, len_max_ = 0;
  double gap_min_ = 0, gap_max_ = 0;

  std::string symbol_key(const SymbolVector& sv) const;
  friend bool operator==(const SymbolCodec&, const SymbolCodec&);
};

bool operator==(const SymbolCodec& a, const SymbolCodec& b);

// Reads packet rows (application,policy,direction,dest_ip_port,source_ip,
// protocol,packet_length,inter_arrival,sla) and groups them into windows of
// window_len rows; the trailing short window, if any, is kept and marked
// partial.
std::vector<FlowWindow> windows_from_csv(const std::string& path, int window_len);

void windows_to_csv(const std::string& path, const std::vector<FlowWindow>& windows);

}  // namespace fleam::detect
