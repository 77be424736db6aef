// fleam: scenario runner for federated DDoS-mitigation experiments.
//
// Subcommands: synth-data, train-centralized, train-federated, detect,
// simulate-mitigation, economics, placement, report. Every command prints
// its effective configuration before running and is deterministic under
// --seed. Exit codes: 0 success, 1 runtime failure, 2 bad configuration.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "fleam/core/csv.hpp"
#include "fleam/core/errors.hpp"
#include "fleam/data/dataset.hpp"
#include "fleam/data/synth.hpp"
#include "fleam/detect/detector.hpp"
#include "fleam/econ/economics.hpp"
#include "fleam/fl/federation.hpp"
#include "fleam/graph/placement.hpp"
#include "fleam/nn/train.hpp"
#include "fleam/sim/accuracy.hpp"
#include "fleam/sim/delay.hpp"

namespace fs = std::filesystem;
using namespace fleam;

namespace {

struct CommonOpts {
  std::string out_dir = "out";
  std::uint64_t seed = 7;
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "base seed for every randomized step");
  cmd->add_flag("-v,--verbose", opts.verbose, "chattier progress output");
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + dir);
}

void print_config(const std::string& command,
                  const std::vector<std::pair<std::string, std::string>>& entries) {
  std::cout << "# " << command << " effective config\n";
  for (const auto& [k, v] : entries) std::cout << "#   " << k << " = " << v << "\n";
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// shared dataset pipeline
// ---------------------------------------------------------------------------

struct PipelineOpts {
  std::string dataset_path;
  long subset = 50000;  // 0 = full data
  int workers = 1;
  std::string shard_mode = "uniform";  // uniform | dirichlet
  double alpha = 0.2;
  int fold = 0;
  double test_fraction = 0.10;
};

struct PreparedData {
  std::vector<nn::Sequence> sequences;
  data::Partition partition;
  std::vector<int> train_union;
  data::EncodingDictionary dictionary;
  std::size_t loaded = 0, rejected = 0;
};

PreparedData prepare(const PipelineOpts& pipe, std::uint64_t seed, bool verbose) {
  data::LoadedData loaded = data::load_csv(pipe.dataset_path);
  if (loaded.records.empty()) throw ConfigError("dataset has no usable rows");
  if (verbose) {
    std::cout << "loaded " << loaded.report.accepted << " rows, rejected "
              << loaded.report.rejected << "\n";
  }
  std::vector<data::Record> records = std::move(loaded.records);
  if (pipe.subset > 0 && static_cast<std::size_t>(pipe.subset) < records.size()) {
    const auto keep =
        data::subsample_indices(records.size(), static_cast<std::size_t>(pipe.subset), seed);
    std::vector<data::Record> sampled;
    sampled.reserve(keep.size());
    for (int idx : keep) sampled.push_back(std::move(records[static_cast<std::size_t>(idx)]));
    records = std::move(sampled);
  }

  data::ShardPlan plan;
  plan.n_workers = pipe.workers;
  plan.mode = pipe.shard_mode == "dirichlet" ? data::ShardPlan::Mode::dirichlet_skewed
                                             : data::ShardPlan::Mode::uniform_random;
  plan.alpha = pipe.alpha;
  plan.fold = pipe.fold;
  plan.test_fraction = pipe.test_fraction;
  plan.seed = seed;

  PreparedData out;
  out.loaded = loaded.report.accepted;
  out.rejected = loaded.report.rejected;
  out.partition = data::partition(data::record_labels(records), plan);
  for (const auto& shard : out.partition.shards) {
    out.train_union.insert(out.train_union.end(), shard.begin(), shard.end());
  }
  out.dictionary = data::EncodingDictionary::fit(records, out.train_union);
  out.sequences = out.dictionary.encode_dataset(records);
  return out;
}

// ---------------------------------------------------------------------------
// synth-data
// ---------------------------------------------------------------------------

int cmd_synth_data(const CommonOpts& common, long rows, double attack_fraction,
                   const std::string& out_file) {
  print_config("synth-data", {{"rows", std::to_string(rows)},
                              {"attack_fraction", fmt(attack_fraction)},
                              {"seed", std::to_string(common.seed)},
                              {"out_file", out_file}});
  data::SynthOptions opt;
  opt.rows = static_cast<std::size_t>(rows);
  opt.attack_fraction = attack_fraction;
  opt.seed = common.seed;
  const auto records = data::synth_records(opt);
  data::write_csv(out_file, records);
  std::cout << "wrote " << records.size() << " rows to " << out_file << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train-centralized
// ---------------------------------------------------------------------------

struct TrainOpts {
  int hidden = 100;
  double lr = 0.01;
  int batch = 64;
  int epochs = 20;
  double reg = 0.0;
};

int cmd_train_centralized(const CommonOpts& common, const PipelineOpts& pipe,
                          const TrainOpts& train) {
  PipelineOpts p = pipe;
  p.workers = 1;
  print_config("train-centralized", {{"dataset", p.dataset_path},
                                     {"subset", std::to_string(p.subset)},
                                     {"fold", std::to_string(p.fold)},
                                     {"hidden", std::to_string(train.hidden)},
                                     {"lr", fmt(train.lr)},
                                     {"batch", std::to_string(train.batch)},
                                     {"epochs", std::to_string(train.epochs)},
                                     {"seed", std::to_string(common.seed)},
                                     {"out", common.out_dir}});
  ensure_out_dir(common.out_dir);
  PreparedData prep = prepare(p, common.seed, common.verbose);

  nn::TrainConfig cfg;
  cfg.learning_rate = train.lr;
  cfg.batch_size = train.batch;
  cfg.epochs = train.epochs;
  cfg.reg_weight = train.reg;
  cfg.seed = common.seed;
  cfg.validate();

  nn::GruModel model = nn::GruModel::random_init(prep.dictionary.width(), train.hidden, 2,
                                                 common.seed);
  Rng rng(cfg.seed);
  std::vector<std::string> rows{"epoch,mean_loss,test_accuracy"};
  const std::vector<int>& shard = prep.partition.shards[0];
  for (int e = 1; e <= cfg.epochs; ++e) {
    const nn::EpochStats stats = nn::sgd_epoch_inplace(model, prep.sequences, shard, cfg, rng);
    const double acc = nn::accuracy(model, prep.sequences, prep.partition.test);
    rows.push_back(std::to_string(e) + "," + fmt(stats.mean_loss) + "," + fmt(acc));
    if (common.verbose) {
      std::cout << "epoch " << e << " loss " << fmt(stats.mean_loss) << " acc " << fmt(acc)
                << "\n";
    }
  }
  csv::write_lines(common.out_dir + "/central_epochs.csv", rows);
  model.save(common.out_dir + "/model.bin");
  prep.dictionary.save(common.out_dir + "/encoding.json");
  const double final_acc = nn::accuracy(model, prep.sequences, prep.partition.test);
  std::cout << "final test accuracy " << fmt(final_acc) << "\n";
  std::cout << "wrote " << common.out_dir << "/model.bin, central_epochs.csv, encoding.json\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train-federated
// ---------------------------------------------------------------------------

struct FederatedOpts {
  int rounds = 20;
  int local_epochs = 1;
  int select_k = 0;         // 0 = invite every collaborator
  std::string manifest;     // reuse a previous shard assignment
  bool local_eval = false;  // also train every worker alone for the spread report
  bool uniform_weights = false;
  bool no_track_loss = false;  // skip the per-round objective pass
};

int cmd_train_federated(const CommonOpts& common, const PipelineOpts& pipe,
                        const TrainOpts& train, const FederatedOpts& fed) {
  print_config("train-federated", {{"dataset", pipe.dataset_path},
                                   {"subset", std::to_string(pipe.subset)},
                                   {"workers", std::to_string(pipe.workers)},
                                   {"shard_mode", pipe.shard_mode},
                                   {"alpha", fmt(pipe.alpha)},
                                   {"fold", std::to_string(pipe.fold)},
                                   {"hidden", std::to_string(train.hidden)},
                                   {"lr", fmt(train.lr)},
                                   {"batch", std::to_string(train.batch)},
                                   {"rounds", std::to_string(fed.rounds)},
                                   {"local_epochs", std::to_string(fed.local_epochs)},
                                   {"seed", std::to_string(common.seed)},
                                   {"out", common.out_dir}});
  ensure_out_dir(common.out_dir);
  PreparedData prep = prepare(pipe, common.seed, common.verbose);
  if (!fed.manifest.empty()) {
    // replay an earlier run's exact shard assignment
    data::Partition replay = data::read_manifest(fed.manifest);
    if (replay.shards.size() != static_cast<std::size_t>(pipe.workers)) {
      throw ConfigError("manifest worker count does not match --workers");
    }
    std::size_t max_idx = 0;
    for (const auto& shard : replay.shards) {
      for (int i : shard) max_idx = std::max(max_idx, static_cast<std::size_t>(i));
    }
    for (int i : replay.test) max_idx = std::max(max_idx, static_cast<std::size_t>(i));
    if (max_idx >= prep.sequences.size()) {
      throw ConfigError("manifest indexes past the end of the dataset");
    }
    prep.partition = std::move(replay);
  }

  nn::TrainConfig base;
  base.learning_rate = train.lr;
  base.batch_size = train.batch;
  base.epochs = fed.local_epochs;
  base.reg_weight = train.reg;
  base.seed = common.seed;
  base.validate();

  std::vector<fl::Collaborator> pool = fl::make_collaborators(prep.partition.shards, base);
  fl::FederationConfig fcfg;
  fcfg.rounds = fed.rounds;
  fcfg.seed = common.seed;
  fcfg.track_loss = !fed.no_track_loss;
  fcfg.weighting = fed.uniform_weights ? fl::FederationConfig::Weighting::uniform
                                       : fl::FederationConfig::Weighting::by_shard_size;
  if (fed.select_k > 0) {
    fcfg.policy = {fl::SelectionPolicy::Kind::sample_k, fed.select_k};
  }

  nn::GruModel init = nn::GruModel::random_init(prep.dictionary.width(), train.hidden, 2,
                                                common.seed);
  fl::FederationResult result =
      fl::run_federation(pool, init, prep.sequences, prep.partition.test, fcfg);

  std::vector<std::string> rows{"round,status,loss,test_accuracy,participants"};
  for (const fl::RoundRecord& rec : result.history) {
    std::string participants;
    for (int id : rec.participants) {
      if (!participants.empty()) participants.push_back(' ');
      participants += std::to_string(id);
    }
    rows.push_back(std::to_string(rec.round) + "," +
                   (rec.status == fl::RoundStatus::done ? "done" : "aborted") + "," +
                   fmt(rec.loss) + "," + fmt(rec.accuracy) + "," + participants);
    if (common.verbose) {
      std::cout << "round " << rec.round << " acc " << fmt(rec.accuracy) << "\n";
    }
  }
  csv::write_lines(common.out_dir + "/federated_rounds.csv", rows);
  data::write_manifest(common.out_dir + "/shards.manifest", prep.partition);
  result.model.save(common.out_dir + "/model.bin");
  prep.dictionary.save(common.out_dir + "/encoding.json");

  if (fed.local_eval) {
    // each worker trains alone on its shard for the same total epoch
    // budget; the per-worker spread mirrors how unbalanced shards hurt
    std::vector<std::string> local_rows{"worker,shard_size,local_accuracy"};
    for (std::size_t w = 0; w < prep.partition.shards.size(); ++w) {
      nn::TrainConfig solo = base;
      solo.epochs = fed.rounds * fed.local_epochs;
      solo.seed = base.seed + static_cast<std::uint64_t>(w);
      nn::Trainer trainer(init, solo);
      trainer.fit(prep.sequences, prep.partition.shards[w]);
      const double acc = nn::accuracy(trainer.model, prep.sequences, prep.partition.test);
      local_rows.push_back(std::to_string(w) + "," +
                           std::to_string(prep.partition.shards[w].size()) + "," + fmt(acc));
    }
    csv::write_lines(common.out_dir + "/local_accuracy.csv", local_rows);
  }

  std::cout << "final federated test accuracy " << fmt(result.history.back().accuracy) << "\n";
  std::cout << "wrote " << common.out_dir
            << "/model.bin, federated_rounds.csv, shards.manifest, encoding.json\n";
  return 0;
}

// ---------------------------------------------------------------------------
// detect
// ---------------------------------------------------------------------------

struct DetectOpts {
  std::string fit_csv;
  std::string score_csv;
  std::string model_path;
  std::string profile_path;
  int window_len = 100;
  int context = 5;
  double quantile = 0.05;
  double trigger = 0.2;
  bool per_position = false;
  int hidden = 32;
  int epochs = 10;
  double lr = 0.1;
  int batch = 32;
};

int cmd_detect(const CommonOpts& common, const DetectOpts& opt) {
  if (opt.fit_csv.empty() == opt.score_csv.empty()) {
    throw ConfigError("detect needs exactly one of --fit <benign.csv> or --score <windows.csv>");
  }
  ensure_out_dir(common.out_dir);
  if (!opt.fit_csv.empty()) {
    print_config("detect --fit", {{"benign", opt.fit_csv},
                                  {"window_len", std::to_string(opt.window_len)},
                                  {"context", std::to_string(opt.context)},
                                  {"quantile", fmt(opt.quantile)},
                                  {"trigger", fmt(opt.trigger)},
                                  {"hidden", std::to_string(opt.hidden)},
                                  {"epochs", std::to_string(opt.epochs)},
                                  {"seed", std::to_string(common.seed)},
                                  {"out", common.out_dir}});
    const auto windows = detect::windows_from_csv(opt.fit_csv, opt.window_len);
    const detect::SymbolCodec codec = detect::SymbolCodec::fit(windows);
    const auto samples = detect::context_samples(codec, windows, opt.context);
    if (samples.empty()) throw ConfigError("benign capture is too short for the context length");
    std::vector<int> idx(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) idx[i] = static_cast<int>(i);

    nn::TrainConfig cfg;
    cfg.learning_rate = opt.lr;
    cfg.batch_size = opt.batch;
    cfg.epochs = opt.epochs;
    cfg.seed = common.seed;
    cfg.validate();
    nn::Trainer trainer(nn::GruModel::random_init(codec.input_width(), opt.hidden,
                                                  codec.n_symbol_classes(), common.seed),
                        cfg);
    trainer.fit(samples, idx);
    const detect::BaselineProfile profile =
        detect::build_baseline(trainer.model, codec, windows, opt.quantile, opt.context,
                               opt.window_len, opt.trigger, opt.per_position);
    trainer.model.save(common.out_dir + "/detector.bin");
    profile.save(common.out_dir + "/profile.json");
    std::cout << "fitted detector on " << windows.size() << " windows ("
              << codec.n_symbol_classes() << " symbol classes); threshold "
              << fmt(profile.thresholds[0]) << "\n";
    std::cout << "wrote " << common.out_dir << "/detector.bin, profile.json\n";
    return 0;
  }

  print_config("detect --score", {{"input", opt.score_csv},
                                  {"model", opt.model_path},
                                  {"profile", opt.profile_path},
                                  {"out", common.out_dir}});
  if (opt.model_path.empty() || opt.profile_path.empty()) {
    throw ConfigError("--score needs --model and --profile");
  }
  const nn::GruModel model = nn::GruModel::load(opt.model_path);
  const detect::BaselineProfile profile = detect::BaselineProfile::load(opt.profile_path);
  const auto windows = detect::windows_from_csv(opt.score_csv, profile.window_len);
  std::vector<std::string> rows{"window_id,packets,flagged_fraction,anomaly,low_confidence"};
  std::size_t anomalies = 0;
  for (const auto& w : windows) {
    if (static_cast<int>(w.packets.size()) <= profile.context_len) continue;
    const detect::Classification c = detect::classify(model, w, profile);
    anomalies += c.anomaly;
    rows.push_back(w.window_id + "," + std::to_string(w.packets.size()) + "," +
                   fmt(c.flagged_fraction) + "," + (c.anomaly ? "1" : "0") + "," +
                   (c.low_confidence ? "1" : "0"));
  }
  csv::write_lines(common.out_dir + "/window_scores.csv", rows);
  std::cout << anomalies << " of " << rows.size() - 1 << " windows flagged anomalous\n";
  std::cout << "wrote " << common.out_dir << "/window_scores.csv\n";
  return 0;
}

// ---------------------------------------------------------------------------
// simulate-mitigation
// ---------------------------------------------------------------------------

struct SimulateOpts {
  std::string kind = "delay";  // delay | accuracy
  long bots = 1000;
  int trials = 1000;
  std::string mix = "0.3333,0.3333,0.3334";
  std::string delays_victim;    // override per-pattern ms, e.g. 1900,2800,4400
  std::string delays_attacker;  // override per-pattern ms, e.g. 600,800,1200
  double jitter = 0.2;
  // accuracy settings
  int defenders = 4;
  double stealth = 0.55;
  double frac_cross = 0.5;
  int benign_windows = 15;
  int malicious_windows = 200;
  int federated_rounds = 16;
  int local_epochs = 1;
  int local_windows = 4;
};

std::array<double, 3> parse_triple(const std::string& flag, const std::string& value) {
  const auto parts = csv::split(value);
  if (parts.size() != 3) throw ConfigError(flag + " needs three comma-separated numbers");
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = std::stod(parts[static_cast<std::size_t>(i)]);
    } catch (const std::exception&) {
      throw ConfigError(flag + " entries must be numbers");
    }
  }
  return out;
}

nlohmann::json delay_report_json(const sim::DelayReport& r) {
  return {{"model", r.model},
          {"mean_delay_s", r.mean_delay_s},
          {"stdev_delay_s", r.stdev_delay_s},
          {"ci95_halfwidth_s", r.ci95_halfwidth_s},
          {"per_1000_bots_s", r.per_1000_bots_s},
          {"mean_queue_makespan", r.mean_queue_makespan},
          {"trials", r.trials},
          {"bots", r.bot_count}};
}

int cmd_simulate(const CommonOpts& common, const SimulateOpts& opt) {
  ensure_out_dir(common.out_dir);
  if (opt.kind == "delay") {
    print_config("simulate-mitigation --kind delay",
                 {{"bots", std::to_string(opt.bots)},
                  {"trials", std::to_string(opt.trials)},
                  {"mix", opt.mix},
                  {"jitter", fmt(opt.jitter)},
                  {"seed", std::to_string(common.seed)},
                  {"out", common.out_dir}});
    sim::AttackScenario scenario;
    scenario.bot_count = opt.bots;
    scenario.trials = opt.trials;
    scenario.pattern_mix = parse_triple("--mix", opt.mix);
    if (!opt.delays_victim.empty()) {
      scenario.patterns.victim_ms = parse_triple("--delays-victim", opt.delays_victim);
    }
    if (!opt.delays_attacker.empty()) {
      scenario.patterns.attacker_ms = parse_triple("--delays-attacker", opt.delays_attacker);
    }
    const double mix_sum = scenario.pattern_mix[0] + scenario.pattern_mix[1] +
                           scenario.pattern_mix[2];
    for (auto& f : scenario.pattern_mix) f /= mix_sum;
    scenario.emission_jitter = opt.jitter;
    scenario.seed = common.seed;
    const sim::DelayComparison cmp = sim::compare_delay_models(scenario);

    std::vector<std::string> rows{
        "model,mean_delay_s,stdev_delay_s,ci95_halfwidth_s,per_1000_bots_s,trials"};
    for (const sim::DelayReport* r : {&cmp.victim, &cmp.attacker}) {
      rows.push_back(r->model + "," + fmt(r->mean_delay_s) + "," + fmt(r->stdev_delay_s) + "," +
                     fmt(r->ci95_halfwidth_s) + "," + fmt(r->per_1000_bots_s) + "," +
                     std::to_string(r->trials));
    }
    csv::write_lines(common.out_dir + "/delay_report.csv", rows);

    nlohmann::json summary{{"victim", delay_report_json(cmp.victim)},
                           {"attacker", delay_report_json(cmp.attacker)},
                           {"delay_ratio", cmp.ratio},
                           {"closed_form_ratio", cmp.closed_form_ratio}};
    std::ofstream js(common.out_dir + "/delay_summary.json");
    js << summary.dump(2) << "\n";
    std::cout << "victim-centric mean delay " << fmt(cmp.victim.mean_delay_s)
              << " s; attacker-centric " << fmt(cmp.attacker.mean_delay_s) << " s; ratio "
              << fmt(cmp.ratio, 4) << " (closed form " << fmt(cmp.closed_form_ratio, 4) << ")\n";
    std::cout << "wrote " << common.out_dir << "/delay_report.csv, delay_summary.json\n";
    return 0;
  }
  if (opt.kind != "accuracy") throw ConfigError("--kind must be delay or accuracy");

  print_config("simulate-mitigation --kind accuracy",
               {{"defenders", std::to_string(opt.defenders)},
                {"stealth", fmt(opt.stealth)},
                {"frac_cross", fmt(opt.frac_cross)},
                {"benign_windows", std::to_string(opt.benign_windows)},
                {"malicious_windows", std::to_string(opt.malicious_windows)},
                {"federated_rounds", std::to_string(opt.federated_rounds)},
                {"local_epochs", std::to_string(opt.local_epochs)},
                {"local_windows", std::to_string(opt.local_windows)},
                {"seed", std::to_string(common.seed)},
                {"out", common.out_dir}});
  sim::TrafficConfig traffic;
  traffic.defenders = opt.defenders;
  traffic.stealth = opt.stealth;
  traffic.frac_cross = opt.frac_cross;
  traffic.seed = common.seed;
  sim::DetectorTrainConfig train;
  train.federated_rounds = opt.federated_rounds;
  train.local_epochs = opt.local_epochs;
  train.local_windows = opt.local_windows;
  train.seed = common.seed;
  const sim::DetectorSet detectors = sim::train_detector_set(traffic, train);
  const sim::TrafficStream stream =
      sim::synth_traffic(traffic, opt.benign_windows, opt.malicious_windows);

  std::vector<std::string> rows{"cooperation,placement,bpr,mdr,system_accuracy"};
  nlohmann::json summary = nlohmann::json::array();
  for (const auto coop : {sim::Cooperation::individual, sim::Cooperation::joint}) {
    for (const auto placement :
         {sim::DelayModel::victim_centric, sim::DelayModel::attacker_centric}) {
      const sim::AccuracyReport rep =
          sim::run_accuracy_simulation(stream, coop, placement, detectors);
      rows.push_back(rep.cooperation + "," + rep.placement + "," + fmt(rep.benign_pass_rate) +
                     "," + fmt(rep.malicious_drop_rate) + "," + fmt(rep.system_accuracy));
      summary.push_back({{"cooperation", rep.cooperation},
                         {"placement", rep.placement},
                         {"bpr", rep.benign_pass_rate},
                         {"mdr", rep.malicious_drop_rate},
                         {"system_accuracy", rep.system_accuracy}});
      std::cout << rep.cooperation << " / " << rep.placement << ": bpr "
                << fmt(rep.benign_pass_rate, 4) << " mdr " << fmt(rep.malicious_drop_rate, 4)
                << " accuracy " << fmt(rep.system_accuracy, 4) << "\n";
    }
  }
  csv::write_lines(common.out_dir + "/accuracy_report.csv", rows);
  std::ofstream js(common.out_dir + "/accuracy_summary.json");
  js << summary.dump(2) << "\n";
  std::cout << "wrote " << common.out_dir << "/accuracy_report.csv, accuracy_summary.json\n";
  return 0;
}

// ---------------------------------------------------------------------------
// economics
// ---------------------------------------------------------------------------

struct EconOpts {
  std::string prices_path;
  double time_classic = 1715.91;
  double time_fleam = 483.74;
  double value_attack = 0.0;
  bool lv = false;
  double a1 = 1.0, a2 = 0.1, a3 = 0.1, a4 = 1.0;
  double idle0 = 5.0, bots0 = 5.0, step = 1e-3, horizon = 20.0;
};

int cmd_economics(const CommonOpts& common, const EconOpts& opt) {
  print_config("economics", {{"prices", opt.prices_path.empty() ? "(builtin)" : opt.prices_path},
                             {"time_classic", fmt(opt.time_classic)},
                             {"time_fleam", fmt(opt.time_fleam)},
                             {"value_attack", fmt(opt.value_attack)},
                             {"out", common.out_dir}});
  ensure_out_dir(common.out_dir);
  const auto offers = opt.prices_path.empty() ? econ::builtin_price_list()
                                              : econ::load_price_list(opt.prices_path);
  const auto rows = econ::cost_table(offers, opt.time_classic, opt.time_fleam);
  std::vector<std::string> lines{
      "botnet,classic_per_sec,fleam_per_sec,classic_per_hour,fleam_per_hour"};
  for (const econ::CostRow& r : rows) {
    std::ostringstream os;
    os << r.name << "," << std::fixed << std::setprecision(3) << r.classic_per_sec << ","
       << r.fleam_per_sec << "," << r.classic_per_hour << "," << r.fleam_per_hour;
    lines.push_back(os.str());
    std::cout << os.str() << "\n";
  }
  csv::write_lines(common.out_dir + "/cost_table.csv", lines);

  if (opt.value_attack > 0) {
    std::vector<std::string> viability{"botnet,defense,cost_total,profit,viable"};
    for (const econ::CostRow& r : rows) {
      for (const auto& [defense, rate, seconds] :
           {std::tuple{"classic", r.classic_per_sec, opt.time_classic},
            std::tuple{"fleam", r.fleam_per_sec, opt.time_fleam}}) {
        const double cost = rate * seconds;
        const econ::ProfitResult pr = econ::profit(opt.value_attack, cost, true);
        viability.push_back(r.name + std::string(",") + defense + "," + fmt(cost) + "," +
                            fmt(pr.profit) + "," + (pr.viable ? "1" : "0"));
      }
    }
    csv::write_lines(common.out_dir + "/viability.csv", viability);
    std::cout << "wrote " << common.out_dir << "/viability.csv\n";
  }

  if (opt.lv) {
    econ::LotkaVolterraParams p;
    p.a1 = opt.a1;
    p.a2 = opt.a2;
    p.a3 = opt.a3;
    p.a4 = opt.a4;
    p.step = opt.step;
    const auto traj = econ::lv_dynamics(p, opt.idle0, opt.bots0, opt.horizon);
    std::vector<std::string> lv{"t,idle_resources,bots,first_integral"};
    const std::size_t stride = std::max<std::size_t>(1, traj.size() / 2000);
    for (std::size_t i = 0; i < traj.size(); i += stride) {
      lv.push_back(fmt(traj[i].t) + "," + fmt(traj[i].idle) + "," + fmt(traj[i].bots) + "," +
                   fmt(econ::lv_first_integral(p, traj[i].idle, traj[i].bots), 12));
    }
    csv::write_lines(common.out_dir + "/lv_trajectory.csv", lv);
    std::cout << "wrote " << common.out_dir << "/lv_trajectory.csv (" << traj.size()
              << " steps)\n";
  }
  std::cout << "wrote " << common.out_dir << "/cost_table.csv\n";
  return 0;
}

// ---------------------------------------------------------------------------
// placement
// ---------------------------------------------------------------------------

int cmd_placement(const CommonOpts& common, const std::string& topology_path, int budget) {
  print_config("placement", {{"topology", topology_path},
                             {"budget", std::to_string(budget)},
                             {"out", common.out_dir}});
  ensure_out_dir(common.out_dir);
  const graph::TopologyFile tf = graph::parse_topology_file(topology_path);
  const graph::CentralityReport rep = graph::centrality_report(tf.topology);

  std::vector<std::string> rows{"node,role,degree,betweenness,closeness,closeness_defined"};
  for (int i = 0; i < tf.topology.node_count(); ++i) {
    rows.push_back(tf.topology.name_of(i) + "," +
                   graph::role_to_string(tf.topology.role_of(i)) + "," +
                   std::to_string(rep.degree[static_cast<std::size_t>(i)]) + "," +
                   fmt(rep.betweenness[static_cast<std::size_t>(i)]) + "," +
                   fmt(rep.closeness[static_cast<std::size_t>(i)]) + "," +
                   (rep.closeness_defined[static_cast<std::size_t>(i)] ? "1" : "0"));
  }
  csv::write_lines(common.out_dir + "/centrality.csv", rows);
  if (rep.centralization_defined) {
    std::cout << "degree centralization " << fmt(rep.centralization, 4) << " over "
              << tf.topology.node_count() << " nodes, " << rep.components << " component(s)\n";
  }

  if (!tf.routes.empty()) {
    const graph::PlacementResult pr = graph::select_checkpoints(tf.topology, tf.routes, budget);
    if (pr.no_candidates) {
      std::cout << "warning: no fog node lies on any attack route; nothing to place\n";
    }
    std::vector<std::string> picks{"rank,node,newly_covered_routes"};
    for (std::size_t i = 0; i < pr.picks.size(); ++i) {
      picks.push_back(std::to_string(i + 1) + "," + tf.topology.name_of(pr.picks[i]) + "," +
                      std::to_string(pr.covered_per_pick[i]));
      std::cout << "checkpoint " << i + 1 << ": " << tf.topology.name_of(pr.picks[i]) << "\n";
    }
    csv::write_lines(common.out_dir + "/placement.csv", picks);
    std::cout << pr.covered_routes << " of " << tf.routes.size() << " routes covered\n";
  } else {
    std::cout << "no routes in the topology file; emitted centrality only\n";
  }
  std::cout << "wrote " << common.out_dir << "/centrality.csv\n";
  return 0;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

int cmd_report(const CommonOpts& common) {
  print_config("report", {{"out", common.out_dir}});
  const std::vector<std::pair<std::string, std::string>> sections = {
      {"central_epochs.csv", "centralized training"},
      {"federated_rounds.csv", "federated training"},
      {"local_accuracy.csv", "per-worker local training"},
      {"delay_report.csv", "mitigation delay"},
      {"accuracy_report.csv", "system accuracy"},
      {"cost_table.csv", "attack economics"},
      {"centrality.csv", "node centrality"},
      {"placement.csv", "checkpoint placement"},
  };
  bool any = false;
  std::vector<std::string> merged;
  for (const auto& [file, title] : sections) {
    const std::string path = common.out_dir + "/" + file;
    if (!fs::exists(path)) continue;
    any = true;
    merged.push_back("== " + title + " (" + file + ")");
    std::cout << "\n== " << title << "\n";
    for (const std::string& line : csv::read_lines(path)) {
      std::cout << "   " << line << "\n";
      merged.push_back(line);
    }
  }
  if (!any) {
    throw ConfigError("no report inputs found under " + common.out_dir +
                      "; run the other subcommands first");
  }
  csv::write_lines(common.out_dir + "/combined_report.txt", merged);
  std::cout << "\nwrote " << common.out_dir << "/combined_report.txt\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"federated DDoS mitigation simulation toolkit"};
  app.require_subcommand(1);
  // flat key=value files with one [section] per subcommand; flags override
  app.set_config("--config", "", "config file with per-command sections");
  app.allow_config_extras(CLI::config_extras_mode::ignore_all);

  CommonOpts common;
  PipelineOpts pipe;
  TrainOpts train;
  FederatedOpts fed;
  DetectOpts detect_opts;
  SimulateOpts simulate;
  EconOpts econ_opts;
  long synth_rows = 50000;
  double synth_attack_fraction = 0.4;
  std::string synth_out = "unsw_synth.csv";
  std::string topology_path;
  int placement_budget = 2;

  auto* synth = app.add_subcommand("synth-data", "generate a schema-compatible dataset csv");
  add_common(synth, common);
  synth->add_option("--rows", synth_rows, "rows to generate");
  synth->add_option("--attack-fraction", synth_attack_fraction, "fraction of attack rows");
  synth->add_option("--out-file", synth_out, "csv path to write");

  auto add_pipeline = [&](CLI::App* cmd, bool with_workers) {
    cmd->add_option("--dataset", pipe.dataset_path, "dataset csv path")->required();
    cmd->add_option("--subset", pipe.subset, "record cap, 0 = all (default 50000)");
    cmd->add_option("--fold", pipe.fold, "test fold index (of 10)");
    if (with_workers) {
      cmd->add_option("--workers", pipe.workers, "collaborator count");
      cmd->add_option("--shard-mode", pipe.shard_mode, "uniform | dirichlet");
      cmd->add_option("--alpha", pipe.alpha, "dirichlet concentration");
    }
    cmd->add_option("--hidden", train.hidden, "recurrent width");
    cmd->add_option("--lr", train.lr, "learning rate");
    cmd->add_option("--batch", train.batch, "batch size");
  };

  auto* central = app.add_subcommand("train-centralized",
                                     "supervised training on the pooled dataset");
  add_common(central, common);
  add_pipeline(central, false);
  central->add_option("--epochs", train.epochs, "training epochs");

  auto* federated = app.add_subcommand("train-federated",
                                       "synchronous federated training across shards");
  add_common(federated, common);
  pipe.workers = 4;
  add_pipeline(federated, true);
  federated->add_option("--rounds", fed.rounds, "global aggregation rounds");
  federated->add_option("--local-epochs", fed.local_epochs, "local epochs per round");
  federated->add_flag("--local-eval", fed.local_eval,
                      "also train each worker alone and report its accuracy");
  federated->add_flag("--uniform-weights", fed.uniform_weights,
                      "average with equal weights instead of shard sizes");
  federated->add_flag("--no-track-loss", fed.no_track_loss,
                      "skip the per-round training-objective pass");
  federated->add_option("--select-k", fed.select_k,
                        "invite a seeded sample of k collaborators per round (0 = all)");
  federated->add_option("--manifest", fed.manifest,
                        "reuse the shard assignment from a previous run's manifest");

  auto* detect_cmd = app.add_subcommand("detect", "fit or apply the windowed anomaly detector");
  add_common(detect_cmd, common);
  detect_cmd->add_option("--fit", detect_opts.fit_csv, "benign packet csv to fit on");
  detect_cmd->add_option("--score", detect_opts.score_csv, "packet csv to classify");
  detect_cmd->add_option("--model", detect_opts.model_path, "detector checkpoint (for --score)");
  detect_cmd->add_option("--profile", detect_opts.profile_path, "baseline profile (for --score)");
  detect_cmd->add_option("--window-len", detect_opts.window_len, "packets per window");
  detect_cmd->add_option("--context", detect_opts.context, "context length");
  detect_cmd->add_option("--quantile", detect_opts.quantile, "benign score quantile");
  detect_cmd->add_option("--trigger", detect_opts.trigger, "window anomaly trigger fraction");
  detect_cmd->add_flag("--per-position", detect_opts.per_position, "per-position thresholds");
  detect_cmd->add_option("--hidden", detect_opts.hidden, "recurrent width");
  detect_cmd->add_option("--epochs", detect_opts.epochs, "training epochs");
  detect_cmd->add_option("--lr", detect_opts.lr, "learning rate");

  auto* sim_cmd = app.add_subcommand("simulate-mitigation",
                                     "delay and accuracy Monte-Carlo studies");
  add_common(sim_cmd, common);
  sim_cmd->add_option("--kind", simulate.kind, "delay | accuracy");
  sim_cmd->add_option("--bots", simulate.bots, "bot population per trial");
  sim_cmd->add_option("--trials", simulate.trials, "Monte-Carlo trials");
  sim_cmd->add_option("--mix", simulate.mix, "pattern fractions a,b,c");
  sim_cmd->add_option("--jitter", simulate.jitter, "emission jitter fraction");
  sim_cmd->add_option("--delays-victim", simulate.delays_victim,
                      "victim-centric per-pattern delays in ms, a,b,c");
  sim_cmd->add_option("--delays-attacker", simulate.delays_attacker,
                      "attacker-centric per-pattern delays in ms, a,b,c");
  sim_cmd->add_option("--defenders", simulate.defenders, "defender count (accuracy)");
  sim_cmd->add_option("--stealth", simulate.stealth, "malicious stealth (accuracy)");
  sim_cmd->add_option("--frac-cross", simulate.frac_cross,
                      "fraction of attacks on non-local victims (accuracy)");
  sim_cmd->add_option("--benign-windows", simulate.benign_windows,
                      "benign eval windows per defender (accuracy)");
  sim_cmd->add_option("--malicious-windows", simulate.malicious_windows,
                      "malicious eval windows (accuracy)");
  sim_cmd->add_option("--rounds", simulate.federated_rounds, "federated rounds (accuracy)");
  sim_cmd->add_option("--local-epochs", simulate.local_epochs, "local epochs (accuracy)");
  sim_cmd->add_option("--local-windows", simulate.local_windows,
                      "benign windows a lone defender trains on (accuracy)");

  auto* econ_cmd = app.add_subcommand("economics", "attacker cost tables and bot dynamics");
  add_common(econ_cmd, common);
  econ_cmd->add_option("--prices", econ_opts.prices_path, "price list csv (default builtin)");
  econ_cmd->add_option("--time-classic", econ_opts.time_classic,
                       "victim-centric mitigation seconds");
  econ_cmd->add_option("--time-fleam", econ_opts.time_fleam,
                       "attacker-centric mitigation seconds");
  econ_cmd->add_option("--value-attack", econ_opts.value_attack,
                       "attack value for the viability report");
  econ_cmd->add_flag("--lv", econ_opts.lv, "integrate the resource/bot dynamics");
  econ_cmd->add_option("--lv-a1", econ_opts.a1, "idle growth rate");
  econ_cmd->add_option("--lv-a2", econ_opts.a2, "idle kill rate");
  econ_cmd->add_option("--lv-a3", econ_opts.a3, "bot growth rate");
  econ_cmd->add_option("--lv-a4", econ_opts.a4, "bot decay rate");
  econ_cmd->add_option("--lv-idle0", econ_opts.idle0, "initial idle resources");
  econ_cmd->add_option("--lv-bots0", econ_opts.bots0, "initial bot population");
  econ_cmd->add_option("--lv-step", econ_opts.step, "integration step");
  econ_cmd->add_option("--lv-horizon", econ_opts.horizon, "integration horizon");

  auto* place_cmd = app.add_subcommand("placement",
                                       "centrality report and checkpoint selection");
  add_common(place_cmd, common);
  place_cmd->add_option("--topology", topology_path, "topology file")->required();
  place_cmd->add_option("--budget", placement_budget, "checkpoints to place");

  auto* report_cmd = app.add_subcommand("report", "merge result csvs into one comparison");
  add_common(report_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // bad flags are configuration failures
  }

  try {
    if (synth->parsed()) {
      return cmd_synth_data(common, synth_rows, synth_attack_fraction, synth_out);
    }
    if (central->parsed()) {
      pipe.workers = 1;
      return cmd_train_centralized(common, pipe, train);
    }
    if (federated->parsed()) return cmd_train_federated(common, pipe, train, fed);
    if (detect_cmd->parsed()) return cmd_detect(common, detect_opts);
    if (sim_cmd->parsed()) return cmd_simulate(common, simulate);
    if (econ_cmd->parsed()) return cmd_economics(common, econ_opts);
    if (place_cmd->parsed()) return cmd_placement(common, topology_path, placement_budget);
    if (report_cmd->parsed()) return cmd_report(common);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
