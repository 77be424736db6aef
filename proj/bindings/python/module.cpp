// Python bindings for the core operations: GRU forward/backward, federated
// averaging, centrality and checkpoint placement, attack economics, and the
// mitigation-delay simulation.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fleam/core/errors.hpp"
#include "fleam/econ/economics.hpp"
#include "fleam/fl/federation.hpp"
#include "fleam/graph/placement.hpp"
#include "fleam/nn/model.hpp"
#include "fleam/nn/train.hpp"
#include "fleam/sim/delay.hpp"

namespace py = pybind11;
using namespace fleam;

namespace {

nn::Sequence make_sequence(const std::vector<nn::Vector>& inputs,
                           const std::vector<int>& labels) {
  nn::Sequence s;
  s.inputs = inputs;
  s.labels = labels;
  return s;
}

graph::FogTopology build_topology(
    const std::vector<std::tuple<std::string, std::string, double>>& edges,
    const std::map<std::string, std::string>& roles) {
  graph::FogTopology g;
  for (const auto& [name, role] : roles) g.add_node(name, graph::role_from_string(role));
  for (const auto& [a, b, len] : edges) g.add_edge(a, b, len);
  return g;
}

std::map<std::string, double> scores_by_name(const graph::FogTopology& g,
                                             const std::vector<double>& scores) {
  std::map<std::string, double> out;
  for (int i = 0; i < g.node_count(); ++i) {
    out[g.name_of(i)] = scores[static_cast<std::size_t>(i)];
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_fleam, m) {
  m.doc() = "federated DDoS mitigation toolkit: GRU training, federated "
            "averaging, centrality placement, attack economics, delay "
            "simulation";

  py::register_exception<ConfigError>(m, "FleamConfigError", PyExc_ValueError);
  py::register_exception<InputError>(m, "FleamInputError", PyExc_ValueError);
  py::register_exception<LayoutError>(m, "FleamLayoutError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "FleamDomainError", PyExc_ValueError);
  py::register_exception<ProtocolError>(m, "FleamProtocolError", PyExc_RuntimeError);
  py::register_exception<IntegrationError>(m, "FleamIntegrationError", PyExc_RuntimeError);

  // --- recurrent model -----------------------------------------------------
  py::class_<nn::GruModel>(m, "GruModel")
      .def_static("random_init", &nn::GruModel::random_init, py::arg("input_dim"),
                  py::arg("hidden_dim"), py::arg("n_classes"), py::arg("seed"))
      .def_static("zeros", &nn::GruModel::zeros, py::arg("input_dim"), py::arg("hidden_dim"),
                  py::arg("n_classes"))
      .def_readonly("input_dim", &nn::GruModel::input_dim)
      .def_readonly("hidden_dim", &nn::GruModel::hidden_dim)
      .def_readonly("n_classes", &nn::GruModel::n_classes)
      .def("param_count", &nn::GruModel::param_count)
      .def("layout_id", &nn::GruModel::layout_id)
      .def("flatten",
           [](const nn::GruModel& model) {
             nn::ParamVector p = model.flatten();
             return py::make_tuple(py::array_t<double>(static_cast<py::ssize_t>(p.values.size()),
                                                       p.values.data()),
                                   p.layout_id);
           })
      .def_static("unflatten",
                  [](py::array_t<double, py::array::c_style | py::array::forcecast> values,
                     int input_dim, int hidden_dim, int n_classes) {
                    nn::GruLayout layout{input_dim, hidden_dim, n_classes};
                    nn::ParamVector p;
                    p.layout_id = layout.id();
                    p.values.assign(values.data(), values.data() + values.size());
                    return nn::GruModel::unflatten(p, layout);
                  },
                  py::arg("values"), py::arg("input_dim"), py::arg("hidden_dim"),
                  py::arg("n_classes"))
      .def("save", &nn::GruModel::save, py::arg("path"))
      .def_static("load", &nn::GruModel::load, py::arg("path"))
      .def("__eq__", [](const nn::GruModel& a, const nn::GruModel& b) { return a == b; });

  m.def("gru_step", &nn::gru_step, py::arg("model"), py::arg("h_prev"), py::arg("x"),
        "one recurrent step; returns the next hidden state");

  m.def(
      "forward_sequence",
      [](const nn::GruModel& model, const std::vector<nn::Vector>& xs) {
        const nn::ForwardResult fw = nn::forward_sequence(model, xs);
        return py::make_tuple(fw.probs, fw.h_final);
      },
      py::arg("model"), py::arg("inputs"),
      "per-step class distributions and the final hidden state");

  m.def(
      "backward",
      [](const nn::GruModel& model, const std::vector<nn::Vector>& xs,
         const std::vector<int>& labels, double reg_weight) {
        const nn::BackwardResult bw = nn::backward(model, make_sequence(xs, labels), reg_weight);
        return py::make_tuple(
            py::array_t<double>(static_cast<py::ssize_t>(bw.grad.values.size()),
                                bw.grad.values.data()),
            bw.loss);
      },
      py::arg("model"), py::arg("inputs"), py::arg("labels"), py::arg("reg_weight") = 0.0,
      "flat gradient and loss; label -1 marks an unlabeled step");

  m.def(
      "sgd_epoch",
      [](const nn::GruModel& model, const std::vector<std::vector<nn::Vector>>& inputs,
         const std::vector<std::vector<int>>& labels, double learning_rate, int batch_size,
         std::uint64_t seed) {
        if (inputs.size() != labels.size()) {
          throw InputError("inputs and labels must have the same length");
        }
        std::vector<nn::Sequence> data;
        std::vector<int> shard;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
          data.push_back(make_sequence(inputs[i], labels[i]));
          shard.push_back(static_cast<int>(i));
        }
        nn::TrainConfig cfg;
        cfg.learning_rate = learning_rate;
        cfg.batch_size = batch_size;
        cfg.seed = seed;
        return nn::sgd_epoch(model, data, shard, cfg);
      },
      py::arg("model"), py::arg("inputs"), py::arg("labels"), py::arg("learning_rate") = 0.01,
      py::arg("batch_size") = 64, py::arg("seed") = 0,
      "one shuffled pass of minibatch SGD; returns the updated model");

  // --- federated averaging -------------------------------------------------
  m.def(
      "aggregate",
      [](const std::vector<py::array_t<double, py::array::c_style | py::array::forcecast>>&
             params,
         const std::vector<double>& weights) {
        if (params.size() != weights.size()) {
          throw ProtocolError("one weight per parameter vector required");
        }
        std::map<int, nn::ParamVector> received;
        std::map<int, double> weight_map;
        for (std::size_t i = 0; i < params.size(); ++i) {
          nn::ParamVector p;
          p.layout_id = 0;
          p.values.assign(params[i].data(), params[i].data() + params[i].size());
          received[static_cast<int>(i)] = std::move(p);
          weight_map[static_cast<int>(i)] = weights[i];
        }
        const nn::ParamVector out = fl::aggregate(received, weight_map);
        return py::array_t<double>(static_cast<py::ssize_t>(out.values.size()),
                                   out.values.data());
      },
      py::arg("params"), py::arg("weights"),
      "weighted elementwise mean of flat parameter vectors");

  // --- placement -----------------------------------------------------------
  m.def(
      "centrality",
      [](const std::vector<std::tuple<std::string, std::string, double>>& edges,
         const std::map<std::string, std::string>& roles) {
        const graph::FogTopology g = build_topology(edges, roles);
        const graph::CentralityReport rep = graph::centrality_report(g);
        py::dict out;
        out["betweenness"] = scores_by_name(g, rep.betweenness);
        out["closeness"] = scores_by_name(g, rep.closeness);
        std::map<std::string, int> degree;
        for (int i = 0; i < g.node_count(); ++i) {
          degree[g.name_of(i)] = rep.degree[static_cast<std::size_t>(i)];
        }
        out["degree"] = degree;
        out["degree_centralization"] =
            rep.centralization_defined ? py::cast(rep.centralization) : py::none();
        out["connected"] = rep.connected;
        out["components"] = rep.components;
        return out;
      },
      py::arg("edges"), py::arg("roles") = std::map<std::string, std::string>{},
      "betweenness, closeness, degrees, and graph centralization; edges are "
      "(a, b, length) tuples");

  m.def(
      "select_checkpoints",
      [](const std::vector<std::tuple<std::string, std::string, double>>& edges,
         const std::map<std::string, std::string>& roles,
         const std::vector<std::vector<std::string>>& routes, int budget) {
        const graph::FogTopology g = build_topology(edges, roles);
        const graph::PlacementResult r = graph::select_checkpoints(g, routes, budget);
        std::vector<std::string> picks;
        for (int idx : r.picks) picks.push_back(g.name_of(idx));
        return py::make_tuple(picks, r.covered_routes);
      },
      py::arg("edges"), py::arg("roles"), py::arg("routes"), py::arg("budget"),
      "greedy fog checkpoints along attack routes: (picked names, covered routes)");

  // --- economics -----------------------------------------------------------
  m.def(
      "offensive_firepower",
      [](double code_out, double code_in) {
        const econ::Ratio r = econ::offensive_firepower(code_out, code_in);
        return py::make_tuple(r.value, r.weak);
      },
      py::arg("code_out"), py::arg("code_in"));

  m.def(
      "mitigation_time",
      [](const std::vector<std::pair<double, double>>& flows) {
        std::vector<econ::Flow> fs;
        for (const auto& [count, delay] : flows) fs.push_back({count, delay});
        return econ::mitigation_time(fs);
      },
      py::arg("flows"), "total delay for (count, per-flow seconds) pairs");

  m.def(
      "attack_cost_rate",
      [](long population, double rental_usd, double setup_usd, double mitigation_seconds) {
        return econ::attack_cost_rate({"", "", population, rental_usd, setup_usd},
                                      mitigation_seconds);
      },
      py::arg("population"), py::arg("rental_usd"), py::arg("setup_usd"),
      py::arg("mitigation_seconds"), "attacker's dollars per second of surviving botnet");

  m.def(
      "profit",
      [](double value_attack, double cost_attack, bool attackable) {
        const econ::ProfitResult r = econ::profit(value_attack, cost_attack, attackable);
        return py::make_tuple(r.profit, r.viable);
      },
      py::arg("value_attack"), py::arg("cost_attack"), py::arg("attackable") = true);

  m.def(
      "lv_dynamics",
      [](double a1, double a2, double a3, double a4, double idle0, double bots0, double horizon,
         double step) {
        econ::LotkaVolterraParams p;
        p.a1 = a1;
        p.a2 = a2;
        p.a3 = a3;
        p.a4 = a4;
        p.step = step;
        const auto traj = econ::lv_dynamics(p, idle0, bots0, horizon);
        py::array_t<double> out({static_cast<py::ssize_t>(traj.size()), py::ssize_t(3)});
        auto view = out.mutable_unchecked<2>();
        for (std::size_t i = 0; i < traj.size(); ++i) {
          view(static_cast<py::ssize_t>(i), 0) = traj[i].t;
          view(static_cast<py::ssize_t>(i), 1) = traj[i].idle;
          view(static_cast<py::ssize_t>(i), 2) = traj[i].bots;
        }
        return out;
      },
      py::arg("a1"), py::arg("a2"), py::arg("a3"), py::arg("a4"), py::arg("idle0"),
      py::arg("bots0"), py::arg("horizon"), py::arg("step") = 1e-3,
      "RK4 trajectory as an (n, 3) array of (t, idle, bots)");

  m.def(
      "lv_first_integral",
      [](double a1, double a2, double a3, double a4, double idle, double bots) {
        econ::LotkaVolterraParams p;
        p.a1 = a1;
        p.a2 = a2;
        p.a3 = a3;
        p.a4 = a4;
        return econ::lv_first_integral(p, idle, bots);
      },
      py::arg("a1"), py::arg("a2"), py::arg("a3"), py::arg("a4"), py::arg("idle"),
      py::arg("bots"));

  // --- delay simulation ----------------------------------------------------
  m.def(
      "run_delay_simulation",
      [](long bots, int trials, const std::array<double, 3>& mix, const std::string& model,
         double jitter, std::uint64_t seed) {
        sim::AttackScenario s;
        s.bot_count = bots;
        s.trials = trials;
        s.pattern_mix = mix;
        s.emission_jitter = jitter;
        s.seed = seed;
        if (model == "victim-centric") {
          s.delay_model = sim::DelayModel::victim_centric;
        } else if (model == "attacker-centric") {
          s.delay_model = sim::DelayModel::attacker_centric;
        } else {
          throw ConfigError("model must be victim-centric or attacker-centric");
        }
        const sim::DelayReport r = sim::run_delay_simulation(s);
        py::dict out;
        out["model"] = r.model;
        out["mean_delay_s"] = r.mean_delay_s;
        out["stdev_delay_s"] = r.stdev_delay_s;
        out["ci95_halfwidth_s"] = r.ci95_halfwidth_s;
        out["per_1000_bots_s"] = r.per_1000_bots_s;
        out["trials"] = r.trials;
        return out;
      },
      py::arg("bots") = 1000, py::arg("trials") = 1000,
      py::arg("mix") = std::array<double, 3>{1.0 / 3, 1.0 / 3, 1.0 / 3},
      py::arg("model") = "victim-centric", py::arg("jitter") = 0.2, py::arg("seed") = 1);

  m.def(
      "delay_ratio",
      [](long bots, int trials, std::uint64_t seed) {
        sim::AttackScenario s;
        s.bot_count = bots;
        s.trials = trials;
        s.seed = seed;
        const sim::DelayComparison cmp = sim::compare_delay_models(s);
        return py::make_tuple(cmp.ratio, cmp.closed_form_ratio);
      },
      py::arg("bots") = 500, py::arg("trials") = 500, py::arg("seed") = 1,
      "(monte-carlo, closed-form) attacker/victim delay ratio under a uniform mix");

  m.def("system_accuracy", [](double bpr, double mdr) { return (bpr + mdr) / 2.0; },
        py::arg("benign_pass_rate"), py::arg("malicious_drop_rate"));

  m.attr("__version__") = "0.1.0";
}
