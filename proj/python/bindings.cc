// Copyright 2026 The fedledger Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <tuple>
#include <vector>

#include "fedledger/aggregation.h"
#include "fedledger/config.h"
#include "fedledger/consensus.h"
#include "fedledger/contract.h"
#include "fedledger/data.h"
#include "fedledger/driver.h"
#include "fedledger/ledger.h"
#include "fedledger/model.h"
#include "fedledger/report_io.h"
#include "fedledger/sha256.h"
#include "fedledger/transport.h"

namespace py = pybind11;
using namespace fedledger;

namespace {

RealVector Vec(const std::vector<double>& v) { return RealVector(v); }

ModelWeights Weights(const std::vector<double>& v) {
  return ModelWeights(RealVector(v));
}

// Rows of features plus 0/1 labels into a dataset.
LabeledDataset Dataset(const std::vector<std::vector<double>>& x,
                       const std::vector<int>& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("features and labels differ in length");
  }
  LabeledDataset ds(x.empty() ? 0 : x.front().size());
  for (std::size_t i = 0; i < x.size(); ++i) ds.add_row(x[i], y[i]);
  return ds;
}

std::tuple<std::vector<std::vector<double>>, std::vector<int>> Unpack(
    const LabeledDataset& ds) {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  x.reserve(ds.rows());
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    auto row = ds.row(i);
    x.emplace_back(row.begin(), row.end());
    y.push_back(ds.label(i));
  }
  return {std::move(x), std::move(y)};
}

// (node_id, weights, sample_count[, accepted]) tuples.
std::vector<WeightedContribution> Contributions(const py::list& items) {
  std::vector<WeightedContribution> out;
  for (const auto& item : items) {
    auto t = item.cast<py::tuple>();
    WeightedContribution c;
    c.node_id = t[0].cast<NodeId>();
    c.weights = Weights(t[1].cast<std::vector<double>>());
    c.sample_count = t[2].cast<std::size_t>();
    if (t.size() > 3) c.accepted = t[3].cast<bool>();
    out.push_back(std::move(c));
  }
  return out;
}

py::dict MetricsDict(const ClassificationMetrics& m) {
  py::dict d;
  d["accuracy"] = m.accuracy;
  d["precision"] = m.precision;
  d["recall"] = m.recall;
  d["f1"] = m.f1;
  d["tp"] = m.true_positive;
  d["fp"] = m.false_positive;
  d["tn"] = m.true_negative;
  d["fn"] = m.false_negative;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Federated intrusion-detection simulator on a hash-chained ledger";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<LedgerFormatError>(m, "LedgerFormatError",
                                            PyExc_ValueError);

  // Model and privacy.
  m.def("sigmoid", &sigmoid);
  m.def(
      "local_loss",
      [](const std::vector<double>& w, const std::vector<std::vector<double>>& x,
         const std::vector<int>& y) {
        return local_loss(Weights(w), Dataset(x, y));
      },
      py::arg("weights"), py::arg("features"), py::arg("labels"));
  m.def(
      "loss_gradient",
      [](const std::vector<double>& w, const std::vector<std::vector<double>>& x,
         const std::vector<int>& y) {
        return loss_gradient(Weights(w), Dataset(x, y)).values();
      },
      py::arg("weights"), py::arg("features"), py::arg("labels"));
  m.def(
      "clip_gradient",
      [](const std::vector<double>& g, double c) {
        return clip_gradient(Vec(g), c).values();
      },
      py::arg("gradient"), py::arg("clip_norm"));
  m.def(
      "add_dp_noise",
      [](const std::vector<double>& g, double clip_norm, double noise_scale,
         std::uint64_t seed, std::uint64_t stream) {
        DpConfig dp;
        dp.clip_norm = clip_norm;
        dp.noise_scale = noise_scale;
        RngState rng = seeded_rng(seed, stream);
        return add_dp_noise(Vec(g), dp, rng).values();
      },
      py::arg("gradient"), py::arg("clip_norm"), py::arg("noise_scale"),
      py::arg("seed"), py::arg("stream") = 0);

  // Aggregation and contract.
  m.def(
      "fed_avg",
      [](const py::list& items) {
        auto contribs = Contributions(items);
        return fed_avg(contribs).values.values();
      },
      py::arg("contributions"),
      "Weighted mean of (node_id, weights, sample_count[, accepted]) tuples.");
  m.def(
      "trust_weighted_avg",
      [](const py::list& items, const std::vector<double>& trust) {
        auto contribs = Contributions(items);
        return trust_weighted_avg(contribs, TrustVector{trust}).values.values();
      },
      py::arg("contributions"), py::arg("trust"));
  m.def(
      "trust_weights",
      [](const std::vector<double>& r) { return trust_weights(r).values; },
      py::arg("reputations"));
  m.def(
      "divergence",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return divergence(Weights(a), Weights(b));
      },
      py::arg("local"), py::arg("global_"));

  py::class_<ContractPolicy>(m, "ContractPolicy")
      .def(py::init<>())
      .def_readwrite("max_divergence", &ContractPolicy::max_divergence)
      .def_readwrite("max_anomaly", &ContractPolicy::max_anomaly)
      .def_readwrite("reputation_step", &ContractPolicy::reputation_step);
  m.def(
      "validate_update",
      [](const std::vector<double>& w, double anomaly,
         const std::vector<double>& reference, const ContractPolicy& policy) {
        LocalUpdate u;
        u.weights = Weights(w);
        u.anomaly_score = anomaly;
        const Verdict v = validate_update(u, Weights(reference), policy);
        return py::make_tuple(v.decision(), std::string(to_string(v.reason)),
                              v.divergence);
      },
      py::arg("weights"), py::arg("anomaly_score"), py::arg("reference"),
      py::arg("policy") = ContractPolicy{},
      "Returns (decision, reason, divergence).");

  // Transport.
  m.def("topk_count", &topk_count, py::arg("dim"), py::arg("rho"));
  m.def(
      "sparse_payload_bytes",
      [](const std::vector<double>& delta, double rho, std::size_t header) {
        return payload_bytes(sparsify_topk(Vec(delta), rho, header));
      },
      py::arg("delta"), py::arg("rho"),
      py::arg("header_bytes") = kDefaultHeaderBytes);
  m.def(
      "dense_payload_bytes",
      [](const std::vector<double>& v, std::size_t header) {
        return payload_bytes(encode_dense(Vec(v), header));
      },
      py::arg("values"), py::arg("header_bytes") = kDefaultHeaderBytes);
  m.def(
      "sparsify_roundtrip",
      [](const std::vector<double>& delta, double rho) {
        return densify(sparsify_topk(Vec(delta), rho), delta.size()).values();
      },
      py::arg("delta"), py::arg("rho"));

  // Ledger and consensus.
  m.def(
      "sha256_hex",
      [](py::bytes data) {
        std::string s = data;
        return to_hex(sha256(std::string_view(s)));
      },
      py::arg("data"));
  m.def("strict_majority", &strict_majority, py::arg("approvals"),
        py::arg("total"));

  py::class_<Chain>(m, "Chain")
      .def_property_readonly("height", &Chain::height)
      .def("__len__", &Chain::size)
      .def_property_readonly(
          "tip_hash", [](const Chain& c) { return to_hex(c.tip_hash()); })
      .def_property_readonly("hashes",
                             [](const Chain& c) {
                               std::vector<std::string> out;
                               for (const auto& h : c.hashes()) {
                                 out.push_back(to_hex(h));
                               }
                               return out;
                             })
      .def("record_counts", [](const Chain& c) {
        std::vector<std::size_t> out;
        for (const auto& b : c.blocks()) out.push_back(b.records.size());
        return out;
      });
  m.def(
      "verify_chain",
      [](const Chain& chain) {
        const ChainVerification v = verify_chain(chain);
        return py::make_tuple(v.valid, v.height, v.cause);
      },
      py::arg("chain"), "Returns (valid, failing_height, cause).");
  m.def("read_ledger_export", &read_ledger_export, py::arg("path"));
  m.def("write_ledger_export", &write_ledger_export, py::arg("chain"),
        py::arg("path"));

  // Data.
  m.def(
      "generate_synthetic",
      [](std::size_t n, std::size_t dim, double balance, double margin,
         double noise, std::uint64_t seed) {
        SyntheticSpec spec{n, dim, balance, margin, noise};
        spec.validate();
        RngState rng = seeded_rng(seed, 1);
        return Unpack(generate_synthetic(spec, rng));
      },
      py::arg("samples") = 10000, py::arg("feature_dim") = 20,
      py::arg("class_balance") = 0.5, py::arg("margin") = 0.5,
      py::arg("noise_std") = 0.0, py::arg("seed") = 42,
      "Returns (features, labels).");

  // Simulation.
  py::class_<SimulationConfig>(m, "SimulationConfig")
      .def(py::init<>())
      .def_static(
          "parse", [](const std::string& text) { return parse_config(text); },
          py::arg("text"))
      .def_static(
          "load",
          [](const std::filesystem::path& p) { return load_config(p); },
          py::arg("path"))
      .def(
          "set",
          [](SimulationConfig& c, const std::string& key,
             const std::string& value) { apply_setting(c, key, value); },
          py::arg("key"), py::arg("value"))
      .def("validate", &SimulationConfig::validate)
      .def("format", [](const SimulationConfig& c) { return format_config(c); })
      .def_readwrite("node_count", &SimulationConfig::node_count)
      .def_readwrite("rounds", &SimulationConfig::rounds)
      .def_readwrite("seed", &SimulationConfig::seed)
      .def_readwrite("threads", &SimulationConfig::threads)
      .def_readwrite("poisoned_nodes", &SimulationConfig::poisoned_nodes)
      .def_readwrite("poison_scale", &SimulationConfig::poison_scale)
      .def_readwrite("sparsity_rho", &SimulationConfig::sparsity_rho)
      .def_readwrite("update_every", &SimulationConfig::update_every)
      .def_readwrite("target_accuracy", &SimulationConfig::target_accuracy);
  m.def("known_config_keys", &known_config_keys);

  py::class_<SimulationResult>(m, "SimulationResult")
      .def_readonly("chain", &SimulationResult::chain)
      .def_property_readonly(
          "final_weights",
          [](const SimulationResult& r) { return r.final_weights.values.values(); })
      .def_property_readonly("final_metrics",
                             [](const SimulationResult& r) {
                               return MetricsDict(r.report.final_metrics);
                             })
      .def_property_readonly("initial_metrics",
                             [](const SimulationResult& r) {
                               return MetricsDict(r.report.initial_metrics);
                             })
      .def_property_readonly(
          "rounds_to_convergence",
          [](const SimulationResult& r) { return r.report.rounds_to_convergence; })
      .def_property_readonly(
          "accuracy",
          [](const SimulationResult& r) {
            std::vector<double> out;
            for (const auto& rr : r.report.rounds) out.push_back(rr.metrics.accuracy);
            return out;
          })
      .def_property_readonly(
          "uplink_bytes",
          [](const SimulationResult& r) {
            std::vector<std::size_t> out;
            for (const auto& rr : r.report.rounds) out.push_back(rr.uplink_bytes);
            return out;
          })
      .def_property_readonly(
          "total_uplink_bytes",
          [](const SimulationResult& r) { return r.report.total_uplink_bytes; })
      .def_property_readonly(
          "total_gas", [](const SimulationResult& r) { return r.report.total_gas; })
      .def("metrics_csv",
           [](const SimulationResult& r) { return metrics_csv(r.report); })
      .def("summary", [](const SimulationResult& r) { return summary_text(r); })
      .def(
          "write_outputs",
          [](const SimulationResult& r, const std::filesystem::path& dir) {
            write_outputs(r, dir);
          },
          py::arg("directory"));

  m.def(
      "run_simulation",
      [](const SimulationConfig& config) {
        config.validate();
        py::gil_scoped_release release;
        return run_simulation(config);
      },
      py::arg("config"));
}
