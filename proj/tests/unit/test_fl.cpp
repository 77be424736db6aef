#include <doctest.h>

#include <cmath>
#include <cstring>

#include "fleam/core/errors.hpp"
#include "fleam/core/rng.hpp"
#include "fleam/data/dataset.hpp"
#include "fleam/data/synth.hpp"
#include "fleam/fl/federation.hpp"
#include "fleam/nn/train.hpp"

using namespace fleam;
using namespace fleam::fl;
using fleam::nn::GruModel;
using fleam::nn::ParamVector;
using fleam::nn::Sequence;
using fleam::nn::TrainConfig;
using fleam::nn::Vector;

namespace {

std::vector<Sequence> toy_dataset(int n, int input_dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Sequence> data;
  for (int i = 0; i < n; ++i) {
    Vector x(input_dim);
    for (int k = 0; k < input_dim; ++k) x(k) = rng.uniform(-1, 1);
    Sequence s;
    s.inputs = {x};
    s.labels = {x.sum() > 0 ? 1 : 0};
    data.push_back(std::move(s));
  }
  return data;
}

bool bit_identical(const ParamVector& a, const ParamVector& b) {
  return a.values.size() == b.values.size() &&
         std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("schedule_round: select-all, rejection, and seeded sampling") {
  TrainConfig cfg;
  std::vector<Collaborator> pool = make_collaborators({{0}, {1}, {2}, {3}}, cfg);
  SelectionPolicy all;
  CHECK(schedule_round(pool, all, 1) == std::vector<int>{0, 1, 2, 3});

  pool[2].lam_count = 0;  // no worker available: rejects the invitation
  CHECK(schedule_round(pool, all, 1) == std::vector<int>{0, 1, 3});

  pool[2].lam_count = 1;
  SelectionPolicy two{SelectionPolicy::Kind::sample_k, 2};
  const auto a = schedule_round(pool, two, 7);
  const auto b = schedule_round(pool, two, 7);
  CHECK(a == b);
  CHECK(a.size() == 2);

  for (auto& c : pool) c.available = false;
  CHECK(schedule_round(pool, all, 1).empty());
}

TEST_CASE("local_update: zero epochs or zero rate return the globals unchanged") {
  auto data = toy_dataset(20, 3, 5);
  GruModel init = GruModel::random_init(3, 4, 2, 9);
  ParamVector global = init.flatten();

  TrainConfig cfg;
  cfg.epochs = 0;
  std::vector<Collaborator> pool = make_collaborators({{0, 1, 2, 3, 4}}, cfg);
  LocalUpdate u = local_update(pool[0], global, init.layout(), data);
  CHECK(bit_identical(u.params, global));

  cfg.epochs = 3;
  cfg.learning_rate = 0.0;
  pool = make_collaborators({{0, 1, 2, 3, 4}}, cfg);
  u = local_update(pool[0], global, init.layout(), data);
  CHECK(bit_identical(u.params, global));

  // empty shard: globals handed back with a warning
  pool = make_collaborators({{}}, cfg);
  u = local_update(pool[0], global, init.layout(), data);
  CHECK(u.empty_shard);
  CHECK(bit_identical(u.params, global));
}

TEST_CASE("aggregate: fixed point, symmetry, and a hand-computed weighted mean") {
  ParamVector v;
  v.layout_id = 1;
  v.values = {1.0, -2.0, 3.5};
  std::map<int, ParamVector> received{{0, v}, {1, v}, {2, v}};
  std::map<int, double> weights{{0, 0.2}, {1, 0.3}, {2, 0.5}};
  ParamVector out = aggregate(received, weights);
  for (std::size_t k = 0; k < v.values.size(); ++k) {
    CHECK(out.values[k] == doctest::Approx(v.values[k]).epsilon(1e-15));
  }

  ParamVector neg = v;
  for (double& x : neg.values) x = -x;
  out = aggregate({{0, v}, {1, neg}}, {{0, 0.5}, {1, 0.5}});
  for (double x : out.values) CHECK(x == 0.0);

  // shard-size weights 0.7/0.1/0.1/0.1 against direct arithmetic
  Rng rng(3);
  std::map<int, ParamVector> parts;
  std::map<int, double> sizes{{0, 700}, {1, 100}, {2, 100}, {3, 100}};
  std::vector<std::vector<double>> raw;
  for (int i = 0; i < 4; ++i) {
    ParamVector p;
    p.layout_id = 9;
    for (int k = 0; k < 5; ++k) p.values.push_back(rng.uniform(-2, 2));
    raw.push_back(p.values);
    parts[i] = std::move(p);
  }
  out = aggregate(parts, sizes);
  for (int k = 0; k < 5; ++k) {
    const double expected =
        0.7 * raw[0][static_cast<std::size_t>(k)] + 0.1 * raw[1][static_cast<std::size_t>(k)] +
        0.1 * raw[2][static_cast<std::size_t>(k)] + 0.1 * raw[3][static_cast<std::size_t>(k)];
    CHECK(std::abs(out.values[static_cast<std::size_t>(k)] - expected) <= 1e-12);
  }
}

TEST_CASE("aggregate: barrier and layout violations") {
  ParamVector v;
  v.layout_id = 1;
  v.values = {1.0};
  ParamVector w = v;
  w.layout_id = 2;

  CHECK_THROWS_AS(aggregate({}, {}), ProtocolError);
  // weight entry for a participant that never reported
  CHECK_THROWS_AS(aggregate({{0, v}}, {{0, 0.5}, {1, 0.5}}), ProtocolError);
  CHECK_THROWS_AS(aggregate({{0, v}, {1, w}}, {{0, 0.5}, {1, 0.5}}), ProtocolError);
}

TEST_CASE("aggregate: permutation invariance via sorted reduction") {
  Rng rng(11);
  std::map<int, ParamVector> parts;
  std::map<int, double> weights;
  for (int i = 0; i < 6; ++i) {
    ParamVector p;
    p.layout_id = 4;
    for (int k = 0; k < 32; ++k) p.values.push_back(rng.uniform(-1, 1));
    parts[i] = std::move(p);
    weights[i] = rng.next_double() + 0.1;
  }
  const ParamVector base = aggregate(parts, weights);
  // rebuild the maps in scrambled insertion order; std::map re-sorts by id,
  // so the reduction order and hence every bit of the result is unchanged
  std::map<int, ParamVector> scrambled;
  for (int i = 5; i >= 0; --i) scrambled[i] = parts[i];
  CHECK(bit_identical(aggregate(scrambled, weights), base));
}

TEST_CASE("run_federation: zero rounds yields only the initial snapshot") {
  auto data = toy_dataset(30, 3, 5);
  TrainConfig cfg;
  cfg.epochs = 1;
  std::vector<Collaborator> pool = make_collaborators({{0, 1, 2}, {3, 4, 5}}, cfg);
  FederationConfig fcfg;
  fcfg.rounds = 0;
  GruModel init = GruModel::random_init(3, 4, 2, 1);
  FederationResult res = run_federation(pool, init, data, {6, 7, 8}, fcfg);
  CHECK(res.history.size() == 1);
  CHECK(res.history[0].round == 0);
  CHECK(res.model == init);
}

TEST_CASE("run_federation: one worker equals centralized training bit for bit") {
  auto data = toy_dataset(60, 3, 8);
  std::vector<int> shard;
  for (int i = 0; i < 50; ++i) shard.push_back(i);
  std::vector<int> eval;
  for (int i = 50; i < 60; ++i) eval.push_back(i);

  TrainConfig cfg;
  cfg.epochs = 2;  // per round
  cfg.learning_rate = 0.1;
  cfg.batch_size = 8;
  cfg.seed = 42;

  GruModel init = GruModel::random_init(3, 5, 2, 42);

  // centralized: rounds * epochs sequential passes on one shuffle stream
  nn::Trainer trainer(init, cfg);
  trainer.config.epochs = 5 * cfg.epochs;
  trainer.fit(data, shard);

  std::vector<Collaborator> pool = make_collaborators({shard}, cfg);
  FederationConfig fcfg;
  fcfg.rounds = 5;
  fcfg.seed = 42;
  FederationResult res = run_federation(pool, init, data, eval, fcfg);

  CHECK(bit_identical(res.model.flatten(), trainer.model.flatten()));
}

TEST_CASE("run_federation: straggler aborts the round, never a partial average") {
  auto data = toy_dataset(40, 3, 9);
  TrainConfig cfg;
  cfg.epochs = 1;
  std::vector<Collaborator> pool =
      make_collaborators({{0, 1, 2, 3}, {4, 5, 6, 7}, {8, 9, 10, 11}}, cfg);
  pool[1].sim_seconds_per_epoch = 100.0;  // blows the 10s budget

  FederationConfig fcfg;
  fcfg.rounds = 3;
  fcfg.round_timeout_s = 10.0;
  GruModel init = GruModel::random_init(3, 4, 2, 2);
  FederationResult res = run_federation(pool, init, data, {}, fcfg);
  REQUIRE(res.history.size() == 4);
  for (std::size_t t = 1; t < res.history.size(); ++t) {
    CHECK(res.history[t].status == RoundStatus::aborted);
  }
  // aborted everywhere: the global model never moved
  CHECK(bit_identical(res.model.flatten(), init.flatten()));
}

TEST_CASE("run_federation: aborted rounds are skipped, training continues") {
  auto data = toy_dataset(40, 3, 10);
  TrainConfig cfg;
  cfg.epochs = 1;
  std::vector<Collaborator> pool = make_collaborators({{0, 1, 2, 3}, {4, 5, 6, 7}}, cfg);
  pool[0].sim_seconds_per_epoch = 1.0;
  pool[1].sim_seconds_per_epoch = 1.0;

  FederationConfig fcfg;
  fcfg.rounds = 2;
  fcfg.round_timeout_s = 5.0;
  GruModel init = GruModel::random_init(3, 4, 2, 3);
  FederationResult res = run_federation(pool, init, data, {}, fcfg);
  for (std::size_t t = 1; t < res.history.size(); ++t) {
    CHECK(res.history[t].status == RoundStatus::done);
  }
  CHECK_FALSE(bit_identical(res.model.flatten(), init.flatten()));
}

TEST_CASE("objective accounting: weighted local losses equal the global loss") {
  auto data = toy_dataset(90, 3, 12);
  std::vector<std::vector<int>> shards{{}, {}, {}};
  std::vector<int> all;
  for (int i = 0; i < 90; ++i) {
    shards[static_cast<std::size_t>(i % 3)].push_back(i);
    all.push_back(i);
  }
  // unequal shards: move a chunk from worker 2 to worker 0
  for (int k = 0; k < 10; ++k) {
    shards[0].push_back(shards[2].back());
    shards[2].pop_back();
  }
  TrainConfig cfg;
  std::vector<Collaborator> pool = make_collaborators(shards, cfg);
  GruModel m = GruModel::random_init(3, 6, 2, 77);
  const double global = nn::dataset_loss(m, data, all, 0.0);
  const double federated = federated_objective(m, data, pool, 0.0);
  CHECK(std::abs(global - federated) <= 1e-9);
}

TEST_CASE("weight conservation: normalized weights sum to one") {
  Rng rng(5);
  std::map<int, ParamVector> parts;
  std::map<int, double> weights;
  double total = 0;
  for (int i = 0; i < 5; ++i) {
    ParamVector p;
    p.layout_id = 3;
    p.values = {1.0};  // aggregate of all-ones = sum of normalized weights
    parts[i] = std::move(p);
    weights[i] = rng.next_double() * 10 + 0.5;
    total += weights[i];
  }
  (void)total;
  ParamVector out = aggregate(parts, weights);
  CHECK(std::abs(out.values[0] - 1.0) <= 1e-12);
}

TEST_CASE("dirichlet shards produce divergent local-only accuracies") {
  // workers training alone on label-skewed shards spread apart on a common
  // test fold; the skew is what a weak collaborator looks like
  data::SynthOptions synth;
  synth.rows = 4000;
  synth.seed = 5;
  const auto records = data::synth_records(synth);

  data::ShardPlan plan;
  plan.n_workers = 4;
  plan.mode = data::ShardPlan::Mode::dirichlet_skewed;
  plan.alpha = 0.2;
  plan.seed = 19;
  const data::Partition part = data::partition(data::record_labels(records), plan);
  const auto dict = data::EncodingDictionary::fit(
      records, [&] {
        std::vector<int> idx;
        for (const auto& s : part.shards) idx.insert(idx.end(), s.begin(), s.end());
        return idx;
      }());
  const auto sequences = dict.encode_dataset(records);

  double best = 0.0, worst = 1.0;
  for (std::size_t w = 0; w < part.shards.size(); ++w) {
    TrainConfig cfg;
    cfg.learning_rate = 0.05;
    cfg.batch_size = 32;
    cfg.epochs = 5;
    cfg.seed = 3 + w;
    nn::Trainer trainer(GruModel::random_init(dict.width(), 16, 2, 3), cfg);
    if (!part.shards[w].empty()) trainer.fit(sequences, part.shards[w]);
    const double acc = nn::accuracy(trainer.model, sequences, part.test);
    best = std::max(best, acc);
    worst = std::min(worst, acc);
  }
  CHECK(best - worst > 0.10);
}
