#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "fleam/core/csv.hpp"
#include "fleam/core/errors.hpp"
#include "fleam/data/dataset.hpp"
#include "fleam/data/synth.hpp"

using namespace fleam;
using namespace fleam::data;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::vector<int> all_indices(std::size_t n) {
  std::vector<int> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<int>(i);
  return idx;
}

}  // namespace

TEST_CASE("schema: 49 columns, 40 numeric + 7 categorical features") {
  CHECK(unsw_header().size() == 49);
  int numeric = 0, categorical = 0;
  for (const Field& f : unsw_fields()) {
    (f.kind == Field::Kind::numeric ? numeric : categorical)++;
  }
  CHECK(numeric == 40);
  CHECK(categorical == 7);
}

TEST_CASE("load_csv: empty body, rejected rows, count bookkeeping") {
  const std::string path = temp_path("fleam_data_empty.csv");
  {
    std::ofstream out(path);
    out << csv::join(unsw_header()) << "\n";
  }
  LoadedData empty = load_csv(path);
  CHECK(empty.records.empty());
  CHECK(empty.report.rows_seen == 0);
  CHECK(empty.report.rejected == 0);
  std::filesystem::remove(path);

  // a real batch: write synthetic rows, corrupt one numeric field
  const std::string path2 = temp_path("fleam_data_rows.csv");
  SynthOptions opt;
  opt.rows = 50;
  auto records = synth_records(opt);
  write_csv(path2, records);
  {
    std::ofstream out(path2, std::ios::app);
    // duration is not a number -> row rejected, not fatal
    std::vector<std::string> fields(49, "x");
    out << csv::join(fields) << "\n";
  }
  LoadedData loaded = load_csv(path2);
  CHECK(loaded.report.rows_seen == 51);
  CHECK(loaded.report.accepted == 50);
  CHECK(loaded.report.rejected == 1);
  CHECK(loaded.records.size() == loaded.report.rows_seen - loaded.report.rejected);
  std::filesystem::remove(path2);
}

TEST_CASE("load_csv: missing file and header mismatch are fatal") {
  CHECK_THROWS_AS(load_csv("/nonexistent/unsw.csv"), ConfigError);
  const std::string path = temp_path("fleam_data_badheader.csv");
  {
    std::ofstream out(path);
    out << "a,b,c\n";
  }
  CHECK_THROWS_AS(load_csv(path), ConfigError);
  std::filesystem::remove(path);
}

TEST_CASE("round-trip: written records load back with equal labels") {
  SynthOptions opt;
  opt.rows = 30;
  opt.seed = 3;
  auto records = synth_records(opt);
  const std::string path = temp_path("fleam_data_roundtrip.csv");
  write_csv(path, records);
  LoadedData loaded = load_csv(path);
  REQUIRE(loaded.records.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(loaded.records[i].label == records[i].label);
    CHECK(loaded.records[i].categorical == records[i].categorical);
  }
  std::filesystem::remove(path);
}

TEST_CASE("encoding: degenerate single-record fit scales numerics to zero") {
  SynthOptions opt;
  opt.rows = 1;
  auto records = synth_records(opt);
  EncodingDictionary d = EncodingDictionary::fit(records, {0});
  CHECK(d.any_constant_numeric());
  const nn::Vector e = d.encode(records[0]);
  for (int i = 0; i < 40; ++i) CHECK(e(i) == 0.0);
}

TEST_CASE("encoding: two records differing in one numeric hit the endpoints") {
  SynthOptions opt;
  opt.rows = 2;
  opt.seed = 9;
  auto records = synth_records(opt);
  records[1] = records[0];
  records[1].numeric[0] = records[0].numeric[0] + 5.0;
  EncodingDictionary d = EncodingDictionary::fit(records, {0, 1});
  CHECK(d.encode(records[0])(0) == 0.0);
  CHECK(d.encode(records[1])(0) == 1.0);
}

TEST_CASE("encoding: fit on the training subset leaks nothing from test rows") {
  SynthOptions opt;
  opt.rows = 200;
  opt.seed = 12;
  auto records = synth_records(opt);
  std::vector<int> train_idx, test_idx;
  for (int i = 0; i < 200; ++i) (i % 5 == 0 ? test_idx : train_idx).push_back(i);

  EncodingDictionary fit_with_split = EncodingDictionary::fit(records, train_idx);
  std::vector<Record> train_only;
  for (int i : train_idx) train_only.push_back(records[static_cast<std::size_t>(i)]);
  EncodingDictionary fit_train_alone = EncodingDictionary::fit(train_only, all_indices(train_only.size()));
  CHECK(fit_with_split == fit_train_alone);

  // out-of-range test values clamp instead of stretching the scale
  const nn::Vector e = fit_with_split.encode(records[static_cast<std::size_t>(test_idx[0])]);
  for (int i = 0; i < e.size(); ++i) {
    CHECK(e(i) >= 0.0);
    CHECK(e(i) <= 1.0);
  }
}

TEST_CASE("encoding dictionary json round-trip") {
  SynthOptions opt;
  opt.rows = 40;
  auto records = synth_records(opt);
  EncodingDictionary d = EncodingDictionary::fit(records, all_indices(records.size()));
  const std::string path = temp_path("fleam_dict.json");
  d.save(path);
  EncodingDictionary back = EncodingDictionary::load(path);
  CHECK(back == d);
  CHECK(back.width() == d.width());
  std::filesystem::remove(path);
}

TEST_CASE("partition: m=1 takes every non-test record") {
  SynthOptions opt;
  opt.rows = 100;
  auto labels = record_labels(synth_records(opt));
  ShardPlan plan;
  plan.n_workers = 1;
  plan.seed = 5;
  Partition p = partition(labels, plan);
  CHECK(p.shards.size() == 1);
  CHECK(p.test.size() == 10);
  CHECK(p.shards[0].size() == 90);
}

TEST_CASE("partition: disjoint cover, determinism, both classes present") {
  SynthOptions opt;
  opt.rows = 2000;
  opt.seed = 77;
  auto labels = record_labels(synth_records(opt));
  ShardPlan plan;
  plan.n_workers = 4;
  plan.seed = 13;
  Partition p = partition(labels, plan);
  Partition q = partition(labels, plan);
  CHECK(p.shards == q.shards);
  CHECK(p.test == q.test);

  std::set<int> seen(p.test.begin(), p.test.end());
  std::size_t total = p.test.size();
  for (const auto& shard : p.shards) {
    for (int idx : shard) {
      CHECK(seen.insert(idx).second);  // no index appears twice
    }
    total += shard.size();
    bool has0 = false, has1 = false;
    for (int idx : shard) (labels[static_cast<std::size_t>(idx)] ? has1 : has0) = true;
    CHECK(has0);
    CHECK(has1);
  }
  CHECK(total == labels.size());
}

TEST_CASE("partition: uniform shards concentrate near equal sizes") {
  std::vector<int> labels(100000);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 2);
  ShardPlan plan;
  plan.n_workers = 4;
  plan.test_fraction = 0.0;
  plan.seed = 21;
  Partition p = partition(labels, plan);
  for (const auto& shard : p.shards) {
    const double frac = static_cast<double>(shard.size()) / 100000.0;
    CHECK(frac > 0.23);
    CHECK(frac < 0.27);
  }
}

TEST_CASE("partition: dirichlet skew produces unbalanced shards for most seeds") {
  SynthOptions opt;
  opt.rows = 4000;
  opt.seed = 3;
  auto labels = record_labels(synth_records(opt));
  int skewed = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ShardPlan plan;
    plan.n_workers = 4;
    plan.mode = ShardPlan::Mode::dirichlet_skewed;
    plan.alpha = 0.2;
    plan.seed = seed;
    Partition p = partition(labels, plan);
    std::size_t mx = 0, mn = labels.size();
    for (const auto& shard : p.shards) {
      mx = std::max(mx, shard.size());
      mn = std::min(mn, shard.size());
    }
    if (mn == 0 || static_cast<double>(mx) / static_cast<double>(std::max<std::size_t>(mn, 1)) > 2.0) {
      ++skewed;
    }
  }
  CHECK(skewed > 10);
}

TEST_CASE("partition: validation errors") {
  std::vector<int> labels(10, 0);
  ShardPlan plan;
  plan.n_workers = 20;
  CHECK_THROWS_AS(partition(labels, plan), ConfigError);
  plan.n_workers = 2;
  plan.fold = 12;
  CHECK_THROWS_AS(partition(labels, plan), ConfigError);
}

TEST_CASE("partition: folds are disjoint test sets") {
  std::vector<int> labels(300);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 2);
  std::set<int> seen;
  for (int fold = 0; fold < 10; ++fold) {
    ShardPlan plan;
    plan.n_workers = 2;
    plan.fold = fold;
    plan.seed = 9;
    Partition p = partition(labels, plan);
    CHECK(p.test.size() == 30);
    for (int idx : p.test) CHECK(seen.insert(idx).second);
  }
  CHECK(seen.size() == 300);
}

TEST_CASE("manifest round-trip") {
  SynthOptions opt;
  opt.rows = 60;
  auto labels = record_labels(synth_records(opt));
  ShardPlan plan;
  plan.n_workers = 3;
  plan.seed = 2;
  Partition p = partition(labels, plan);
  const std::string path = temp_path("fleam_manifest.txt");
  write_manifest(path, p);
  Partition back = read_manifest(path);
  CHECK(back.shards == p.shards);
  CHECK(back.test == p.test);
  std::filesystem::remove(path);
}

TEST_CASE("subsample: identity under cap, deterministic otherwise") {
  auto full = subsample_indices(100, 200, 5);
  CHECK(full.size() == 100);
  auto a = subsample_indices(1000, 100, 5);
  auto b = subsample_indices(1000, 100, 5);
  CHECK(a == b);
  CHECK(a.size() == 100);
  auto c = subsample_indices(1000, 100, 6);
  CHECK(a != c);
}

TEST_CASE("synthetic records: label mix and schema arity") {
  SynthOptions opt;
  opt.rows = 5000;
  opt.seed = 31;
  auto records = synth_records(opt);
  CHECK(records.size() == 5000);
  double attack = 0;
  for (const Record& r : records) {
    CHECK(r.numeric.size() == 40);
    CHECK(r.categorical.size() == 7);
    attack += r.label;
    if (r.label == 1) CHECK_FALSE(r.attack_cat.empty());
  }
  attack /= 5000.0;
  CHECK(attack > 0.35);
  CHECK(attack < 0.45);
}

TEST_CASE("partition: all-but-one single-class data exhausts the redraws") {
  std::vector<int> labels(400, 0);
  labels[0] = 1;  // one worker at most can hold the lone attack record
  ShardPlan plan;
  plan.n_workers = 4;
  plan.seed = 1;
  CHECK_THROWS_AS(partition(labels, plan), ConfigError);
}
