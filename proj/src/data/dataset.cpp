#include "fleam/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "fleam/core/csv.hpp"
#include "fleam/core/errors.hpp"
#include "fleam/core/rng.hpp"

namespace fleam::data {

namespace {

using Kind = Field::Kind;

// ip/port-like columns that get hashed rather than enumerated
const std::set<std::string> kHashedColumns = {"srcip", "sport", "dstip", "dsport"};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<Field> make_unsw_fields() {
  auto C = Kind::categorical;
  auto N = Kind::numeric;
  return {
      {"srcip", C},       {"sport", C},        {"dstip", C},
      {"dsport", C},      {"proto", C},        {"state", C},
      {"dur", N},         {"sbytes", N},       {"dbytes", N},
      {"sttl", N},        {"dttl", N},         {"sloss", N},
      {"dloss", N},       {"service", C},      {"sload", N},
      {"dload", N},       {"spkts", N},        {"dpkts", N},
      {"swin", N},        {"dwin", N},         {"stcpb", N},
      {"dtcpb", N},       {"smeansz", N},      {"dmeansz", N},
      {"trans_depth", N}, {"res_bdy_len", N},  {"sjit", N},
      {"djit", N},        {"stime", N},        {"ltime", N},
      {"sintpkt", N},     {"dintpkt", N},      {"tcprtt", N},
      {"synack", N},      {"ackdat", N},       {"is_sm_ips_ports", N},
      {"ct_state_ttl", N},{"ct_flw_http_mthd", N}, {"is_ftp_login", N},
      {"ct_ftp_cmd", N},  {"ct_srv_src", N},   {"ct_srv_dst", N},
      {"ct_dst_ltm", N},  {"ct_src_ltm", N},   {"ct_src_dport_ltm", N},
      {"ct_dst_sport_ltm", N}, {"ct_dst_src_ltm", N},
  };
}

}  // namespace

const std::vector<Field>& unsw_fields() {
  static const std::vector<Field> fields = make_unsw_fields();
  return fields;
}

std::vector<std::string> unsw_header() {
  std::vector<std::string> names;
  for (const Field& f : unsw_fields()) names.push_back(f.name);
  names.push_back("attack_cat");
  names.push_back("label");
  return names;
}

LoadedData load_csv(const std::string& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw ConfigError("dataset csv is empty: " + path);
  const auto expected = unsw_header();
  const auto header = csv::split(lines[0]);
  if (header.size() != expected.size()) {
    throw ConfigError("dataset header has " + std::to_string(header.size()) +
                      " columns, expected " + std::to_string(expected.size()));
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (csv::trim(header[i]) != expected[i]) {
      throw ConfigError("dataset header mismatch at column " + std::to_string(i + 1) +
                        ": expected '" + expected[i] + "', got '" + csv::trim(header[i]) + "'");
    }
  }

  const auto& fields = unsw_fields();
  LoadedData out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    ++out.report.rows_seen;
    const auto f = csv::split(lines[li]);
    if (f.size() != expected.size()) {
      ++out.report.rejected;
      continue;
    }
    Record r;
    bool ok = true;
    for (std::size_t c = 0; c < fields.size() && ok; ++c) {
      if (fields[c].kind == Kind::numeric) {
        try {
          std::size_t pos = 0;
          const std::string v = csv::trim(f[c]);
          r.numeric.push_back(v.empty() ? 0.0 : std::stod(v, &pos));
          if (!v.empty() && pos != v.size()) ok = false;
        } catch (const std::exception&) {
          ok = false;
        }
      } else {
        r.categorical.push_back(csv::trim(f[c]));
      }
    }
    const std::string label = csv::trim(f.back());
    if (label == "0") {
      r.label = 0;
    } else if (label == "1") {
      r.label = 1;
    } else {
      ok = false;
    }
    r.attack_cat = csv::trim(f[f.size() - 2]);
    if (!ok) {
      ++out.report.rejected;
      continue;
    }
    ++out.report.accepted;
    out.records.push_back(std::move(r));
  }
  return out;
}

void write_csv(const std::string& path, const std::vector<Record>& records) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write dataset csv: " + path);
  const auto header = unsw_header();
  out << csv::join(header) << '\n';
  const auto& fields = unsw_fields();
  for (const Record& r : records) {
    std::size_t ni = 0, ci = 0;
    std::string line;
    for (const Field& f : fields) {
      if (!line.empty()) line.push_back(',');
      if (f.kind == Kind::numeric) {
        std::ostringstream v;
        v << r.numeric[ni++];
        line += v.str();
      } else {
        line += r.categorical[ci++];
      }
    }
    line.push_back(',');
    line += r.attack_cat;
    line.push_back(',');
    line += std::to_string(r.label);
    out << line << '\n';
  }
}

EncodingDictionary EncodingDictionary::fit(const std::vector<Record>& records,
                                           const std::vector<int>& fit_indices,
                                           const Options& opt) {
  if (fit_indices.empty()) throw ConfigError("encoding fit needs at least one record");
  const auto& fields = unsw_fields();
  EncodingDictionary d;
  d.opt_ = opt;

  std::size_t n_numeric = 0, n_categorical = 0;
  for (const Field& f : fields) {
    (f.kind == Kind::numeric ? n_numeric : n_categorical)++;
  }
  d.num_min_.assign(n_numeric, 0.0);
  d.num_max_.assign(n_numeric, 0.0);
  d.num_constant_.assign(n_numeric, true);
  d.vocabs_.resize(n_categorical);
  d.hashed_.assign(n_categorical, false);
  {
    std::size_t ci = 0;
    for (const Field& f : fields) {
      if (f.kind != Kind::categorical) continue;
      d.hashed_[ci] = kHashedColumns.count(f.name) > 0;
      ++ci;
    }
  }

  bool first = true;
  for (int idx : fit_indices) {
    const Record& r = records[static_cast<std::size_t>(idx)];
    for (std::size_t ni = 0; ni < n_numeric; ++ni) {
      const double v = r.numeric[ni];
      if (first) {
        d.num_min_[ni] = d.num_max_[ni] = v;
      } else {
        d.num_min_[ni] = std::min(d.num_min_[ni], v);
        d.num_max_[ni] = std::max(d.num_max_[ni], v);
      }
    }
    for (std::size_t ci = 0; ci < n_categorical; ++ci) {
      if (d.hashed_[ci]) continue;
      auto& vocab = d.vocabs_[ci];
      if (static_cast<int>(vocab.size()) >= opt.max_vocab) continue;
      if (std::find(vocab.begin(), vocab.end(), r.categorical[ci]) == vocab.end()) {
        vocab.push_back(r.categorical[ci]);
      }
    }
    first = false;
  }
  for (std::size_t ni = 0; ni < n_numeric; ++ni) {
    d.num_constant_[ni] = d.num_max_[ni] <= d.num_min_[ni];
  }
  return d;
}

int EncodingDictionary::width() const {
  int w = static_cast<int>(num_min_.size());
  for (std::size_t ci = 0; ci < vocabs_.size(); ++ci) {
    w += hashed_[ci] ? opt_.hash_buckets : static_cast<int>(vocabs_[ci].size()) + 1;
  }
  return w;
}

bool EncodingDictionary::any_constant_numeric() const {
  return std::find(num_constant_.begin(), num_constant_.end(), true) != num_constant_.end();
}

nn::Vector EncodingDictionary::encode(const Record& r) const {
  nn::Vector out = nn::Vector::Zero(width());
  int base = 0;
  for (std::size_t ni = 0; ni < num_min_.size(); ++ni) {
    double v = 0.0;  // constant columns scale to 0
    if (!num_constant_[ni]) {
      v = (r.numeric[ni] - num_min_[ni]) / (num_max_[ni] - num_min_[ni]);
      v = std::clamp(v, 0.0, 1.0);
    }
    out(base++) = v;
  }
  for (std::size_t ci = 0; ci < vocabs_.size(); ++ci) {
    if (hashed_[ci]) {
      out(base + static_cast<int>(fnv1a(r.categorical[ci]) %
                                  static_cast<std::uint64_t>(opt_.hash_buckets))) = 1.0;
      base += opt_.hash_buckets;
    } else {
      const auto& vocab = vocabs_[ci];
      auto it = std::find(vocab.begin(), vocab.end(), r.categorical[ci]);
      const int slot = it == vocab.end() ? 0 : 1 + static_cast<int>(it - vocab.begin());
      out(base + slot) = 1.0;
      base += static_cast<int>(vocab.size()) + 1;
    }
  }
  return out;
}

std::vector<nn::Sequence> EncodingDictionary::encode_dataset(
    const std::vector<Record>& records) const {
  std::vector<nn::Sequence> out;
  out.reserve(records.size());
  for (const Record& r : records) {
    nn::Sequence s;
    s.inputs.push_back(encode(r));
    s.labels.push_back(r.label);
    out.push_back(std::move(s));
  }
  return out;
}

nlohmann::json EncodingDictionary::to_json() const {
  nlohmann::json j;
  j["max_vocab"] = opt_.max_vocab;
  j["hash_buckets"] = opt_.hash_buckets;
  j["num_min"] = num_min_;
  j["num_max"] = num_max_;
  j["num_constant"] = num_constant_;
  j["vocabs"] = vocabs_;
  j["hashed"] = hashed_;
  return j;
}

EncodingDictionary EncodingDictionary::from_json(const nlohmann::json& j) {
  EncodingDictionary d;
  d.opt_.max_vocab = j.at("max_vocab").get<int>();
  d.opt_.hash_buckets = j.at("hash_buckets").get<int>();
  d.num_min_ = j.at("num_min").get<std::vector<double>>();
  d.num_max_ = j.at("num_max").get<std::vector<double>>();
  d.num_constant_ = j.at("num_constant").get<std::vector<bool>>();
  d.vocabs_ = j.at("vocabs").get<std::vector<std::vector<std::string>>>();
  d.hashed_ = j.at("hashed").get<std::vector<bool>>();
  return d;
}

void EncodingDictionary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write encoding dictionary: " + path);
  out << to_json().dump(2) << '\n';
}

EncodingDictionary EncodingDictionary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open encoding dictionary: " + path);
  nlohmann::json j;
  try {
    in >> j;
    return from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad encoding dictionary: " + std::string(e.what()));
  }
}

void ShardPlan::validate(std::size_t n_records) const {
  if (n_workers < 1) throw ConfigError("shard plan needs at least one worker");
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test fraction must lie in [0, 1)");
  }
  if (n_folds < 1 || fold < 0 || fold >= n_folds) {
    throw ConfigError("fold index out of range");
  }
  if (static_cast<std::size_t>(n_workers) > n_records) {
    throw ConfigError("more workers than records");
  }
  if (!(alpha > 0.0)) throw ConfigError("dirichlet alpha must be positive");
}

std::vector<int> record_labels(const std::vector<Record>& records) {
  std::vector<int> labels;
  labels.reserve(records.size());
  for (const Record& r : records) labels.push_back(r.label);
  return labels;
}

std::vector<int> subsample_indices(std::size_t n_records, std::size_t cap, std::uint64_t seed) {
  std::vector<int> idx(n_records);
  for (std::size_t i = 0; i < n_records; ++i) idx[i] = static_cast<int>(i);
  if (cap >= n_records) return idx;
  Rng rng(mix_seed(seed, 0x5ab5e7));
  rng.shuffle(idx);
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  return idx;
}

namespace {

Partition draw_partition(const std::vector<int>& labels, const ShardPlan& plan,
                         std::uint64_t seed) {
  const std::size_t n = labels.size();
  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  Rng rng(seed);
  rng.shuffle(order);

  // test fold: the plan.fold-th of n_folds equal blocks of the shuffled
  // order, sized by test_fraction of the whole
  const std::size_t test_size =
      static_cast<std::size_t>(std::llround(plan.test_fraction * static_cast<double>(n)));
  const std::size_t fold_begin = (static_cast<std::size_t>(plan.fold) * n) /
                                 static_cast<std::size_t>(plan.n_folds);
  Partition p;
  p.shards.resize(static_cast<std::size_t>(plan.n_workers));
  std::vector<int> remaining;
  remaining.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t pos = (fold_begin + i) % n;
    if (i < test_size) {
      p.test.push_back(order[pos]);
    } else {
      remaining.push_back(order[pos]);
    }
  }

  if (plan.mode == ShardPlan::Mode::uniform_random) {
    for (int idx : remaining) {
      p.shards[rng.next_below(static_cast<std::uint64_t>(plan.n_workers))].push_back(idx);
    }
  } else {
    // label-skewed: per class, worker proportions drawn from Dirichlet(alpha)
    std::vector<std::vector<double>> class_weights;
    for (int c = 0; c < 2; ++c) {
      class_weights.push_back(
          rng.dirichlet(std::vector<double>(static_cast<std::size_t>(plan.n_workers),
                                            plan.alpha)));
    }
    for (int idx : remaining) {
      const auto& w = class_weights[static_cast<std::size_t>(labels[static_cast<std::size_t>(idx)])];
      p.shards[rng.categorical(w)].push_back(idx);
    }
  }
  for (auto& shard : p.shards) std::sort(shard.begin(), shard.end());
  std::sort(p.test.begin(), p.test.end());
  return p;
}

bool all_shards_have_both_classes(const Partition& p, const std::vector<int>& labels) {
  for (const auto& shard : p.shards) {
    bool has0 = false, has1 = false;
    for (int idx : shard) {
      (labels[static_cast<std::size_t>(idx)] ? has1 : has0) = true;
    }
    if (!has0 || !has1) return false;
  }
  return true;
}

}  // namespace

Partition partition(const std::vector<int>& labels, const ShardPlan& plan) {
  plan.validate(labels.size());
  if (plan.mode == ShardPlan::Mode::dirichlet_skewed) {
    return draw_partition(labels, plan, plan.seed);
  }
  for (int attempt = 0; attempt < 10; ++attempt) {
    Partition p = draw_partition(labels, plan, mix_seed(plan.seed, static_cast<std::uint64_t>(attempt)));
    if (plan.n_workers == 1 || all_shards_have_both_classes(p, labels)) return p;
  }
  throw ConfigError("could not draw a uniform partition with both classes in every shard");
}

void write_manifest(const std::string& path, const Partition& p) {
  std::vector<std::string> lines;
  lines.push_back("# shard manifest: record indices per worker plus the test fold");
  auto row = [](const std::string& head, const std::vector<int>& idx) {
    std::string line = head;
    for (int i : idx) {
      line.push_back(' ');
      line += std::to_string(i);
    }
    return line;
  };
  lines.push_back(row("test:", p.test));
  for (std::size_t w = 0; w < p.shards.size(); ++w) {
    lines.push_back(row("worker " + std::to_string(w) + ":", p.shards[w]));
  }
  csv::write_lines(path, lines);
}

Partition read_manifest(const std::string& path) {
  Partition p;
  for (const std::string& line : csv::read_lines(path)) {
    if (line.empty() || line[0] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ConfigError("bad manifest line: " + line);
    std::istringstream rest(line.substr(colon + 1));
    std::vector<int> idx;
    int v;
    while (rest >> v) idx.push_back(v);
    const std::string head = line.substr(0, colon);
    if (head == "test") {
      p.test = std::move(idx);
    } else if (head.rfind("worker ", 0) == 0) {
      p.shards.push_back(std::move(idx));
    } else {
      throw ConfigError("bad manifest line: " + line);
    }
  }
  return p;
}

}  // namespace fleam::data
