#pragma once

#include <cstdint>
#include <map>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "fleam/nn/model.hpp"
#include "fleam/nn/train.hpp"

namespace fleam::data {

// UNSW NB-15 raw schema: 47 feature columns plus attack_cat and label.
struct Field {
  enum class Kind { numeric, categorical };
  std::string name;
  Kind kind;
};

const std::vector<Field>& unsw_fields();  // the 47 feature columns, in file order
std::vector<std::string> unsw_header();   // all 49 column names

// One typed row. Numeric and categorical values are stored in schema slot
// order (slot indexes skip columns of the other kind).
struct Record {
  std::vector<double> numeric;
  std::vector<std::string> categorical;
  int label = 0;               // 0 benign, 1 attack
  std::string attack_cat;
};

struct LoadReport {
  std::size_t rows_seen = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

struct LoadedData {
  std::vector<Record> records;
  LoadReport report;
};

// Header must match the schema exactly; malformed rows are counted and
// skipped, never fatal.
LoadedData load_csv(const std::string& path);

void write_csv(const std::string& path, const std::vector<Record>& records);

// Min-max statistics for numerics plus capped/hashed categorical
// vocabularies, fitted on the given subset only.
class EncodingDictionary {
 public:
  struct Options {
    int max_vocab = 32;     // per low-cardinality categorical
    int hash_buckets = 32;  // for ip/port-like columns

    bool operator==(const Options&) const = default;
  };

  EncodingDictionary() = default;

  static EncodingDictionary fit(const std::vector<Record>& records,
                                const std::vector<int>& fit_indices, const Options& opt);
  static EncodingDictionary fit(const std::vector<Record>& records,
                                const std::vector<int>& fit_indices) {
    return fit(records, fit_indices, Options{});
  }

  int width() const;
  bool any_constant_numeric() const;
  nn::Vector encode(const Record& r) const;

  // convenience: every record as a single-step labeled sequence
  std::vector<nn::Sequence> encode_dataset(const std::vector<Record>& records) const;

  void save(const std::string& path) const;
  static EncodingDictionary load(const std::string& path);
  nlohmann::json to_json() const;
  static EncodingDictionary from_json(const nlohmann::json& j);

  bool operator==(const EncodingDictionary&) const = default;

 private:
  Options opt_;
  std::vector<double> num_min_, num_max_;
  std::vector<bool> num_constant_;
  // one vocabulary per categorical slot; hashed slots have empty vocab
  std::vector<std::vector<std::string>> vocabs_;
  std::vector<bool> hashed_;
};

// Shard assignment across collaborators plus the held-out test fold.
struct ShardPlan {
  enum class Mode { uniform_random, dirichlet_skewed };
  int n_workers = 4;
  Mode mode = Mode::uniform_random;
  double alpha = 0.2;          // dirichlet concentration for the skewed mode
  double test_fraction = 0.10;
  int fold = 0;                // which of n_folds blocks becomes the test set
  int n_folds = 10;
  std::uint64_t seed = 0;

  void validate(std::size_t n_records) const;
};

struct Partition {
  std::vector<std::vector<int>> shards;  // pairwise disjoint, cover non-test records
  std::vector<int> test;
};

// Deterministic under (labels, plan). Uniform mode re-draws (up to 10
// times) until every shard holds both classes.
Partition partition(const std::vector<int>& labels, const ShardPlan& plan);

std::vector<int> record_labels(const std::vector<Record>& records);

// Seeded subsample of at most cap records (identity when cap >= size).
std::vector<int> subsample_indices(std::size_t n_records, std::size_t cap, std::uint64_t seed);

void write_manifest(const std::string& path, const Partition& p);
Partition read_manifest(const std::string& path);

}  // namespace fleam::data
