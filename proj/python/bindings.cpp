#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "toprank/checkpoint.hpp"
#include "toprank/core.hpp"
#include "toprank/errors.hpp"
#include "toprank/feature_io.hpp"
#include "toprank/metrics.hpp"
#include "toprank/model.hpp"
#include "toprank/pairing.hpp"
#include "toprank/plots.hpp"
#include "toprank/synth.hpp"
#include "toprank/training.hpp"

namespace py = pybind11;
using namespace toprank;

namespace {

ScoredSets scored(std::vector<double> pos, std::vector<double> neg) {
  return {std::move(pos), std::move(neg)};
}

py::dict report_dict(const EvalReport& r) {
  py::dict d;
  d["pos_at_top"] = r.pos_at_top;
  d["accuracy"] = r.accuracy;
  d["auc"] = r.auc;
  d["far"] = r.far;
  d["frr"] = r.frr;
  d["threshold_accuracy"] = r.threshold_accuracy;
  d["threshold_eer"] = r.threshold_eer;
  d["far_at_accuracy"] = r.far_at_accuracy;
  d["frr_at_accuracy"] = r.frr_at_accuracy;
  return d;
}

py::list history_list(const TrainHistory& h) {
  py::list out;
  for (const auto& e : h.epochs) {
    py::dict d;
    d["epoch"] = e.epoch;
    d["loss"] = e.train_loss;
    d["val_pos_at_top"] = e.val_pos_at_top;
    d["val_auc"] = e.val_auc;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_toprank, m) {
  m.doc() = "Top-rank pair learning for writer-independent signature verification";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<InvalidState>(m, "InvalidState", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<TrainingDiverged>(m, "TrainingDiverged", PyExc_ArithmeticError);

  // loss
  m.def("surrogate_loss", &core::surrogate_loss, py::arg("z"));
  m.def("surrogate_loss_grad", &core::surrogate_loss_grad, py::arg("z"));
  m.def(
      "toprank_loss",
      [](const std::vector<double>& pos, const std::vector<double>& neg, double p) {
        return core::toprank_loss(pos, neg, p);
      },
      py::arg("pos"), py::arg("neg"), py::arg("p"));
  m.def(
      "toprank_loss_max",
      [](const std::vector<double>& pos, const std::vector<double>& neg) {
        return core::toprank_loss_max(pos, neg);
      },
      py::arg("pos"), py::arg("neg"));
  m.def(
      "toprank_loss_grad",
      [](const std::vector<double>& pos, const std::vector<double>& neg, double p) {
        auto g = core::toprank_loss_grad(pos, neg, p);
        return py::make_tuple(g.pos, g.neg);
      },
      py::arg("pos"), py::arg("neg"), py::arg("p"), "Returns (d/d pos, d/d neg).");

  // metrics
  m.def("pos_at_top", [](std::vector<double> pos, std::vector<double> neg) {
    return metrics::pos_at_top(scored(std::move(pos), std::move(neg)));
  }, py::arg("pos"), py::arg("neg"));
  m.def("auc", [](std::vector<double> pos, std::vector<double> neg) {
    return metrics::auc(scored(std::move(pos), std::move(neg)));
  }, py::arg("pos"), py::arg("neg"));
  m.def("far_frr", [](std::vector<double> pos, std::vector<double> neg, double threshold) {
    const auto r = metrics::far_frr(scored(std::move(pos), std::move(neg)), threshold);
    return py::make_tuple(r.far, r.frr);
  }, py::arg("pos"), py::arg("neg"), py::arg("threshold"));
  m.def("roc_curve", [](std::vector<double> pos, std::vector<double> neg) {
    py::list out;
    for (const auto& p : metrics::roc_curve(scored(std::move(pos), std::move(neg)))) {
      out.append(py::make_tuple(p.threshold, p.fpr, p.tpr));
    }
    return out;
  }, py::arg("pos"), py::arg("neg"), "List of (threshold, fpr, tpr).");
  m.def("evaluate", [](std::vector<double> pos, std::vector<double> neg) {
    return report_dict(metrics::evaluate(scored(std::move(pos), std::move(neg))));
  }, py::arg("pos"), py::arg("neg"));

  // data
  py::enum_<Authenticity>(m, "Authenticity")
      .value("genuine", Authenticity::genuine)
      .value("forged", Authenticity::forged);

  py::class_<SignatureFeature>(m, "SignatureFeature")
      .def(py::init([](std::uint32_t writer_id, std::uint32_t signature_id, Authenticity a,
                       std::vector<double> values) {
             return SignatureFeature{writer_id, signature_id, a, std::move(values)};
           }),
           py::arg("writer_id"), py::arg("signature_id"), py::arg("authenticity"),
           py::arg("values"))
      .def_readwrite("writer_id", &SignatureFeature::writer_id)
      .def_readwrite("signature_id", &SignatureFeature::signature_id)
      .def_readwrite("authenticity", &SignatureFeature::authenticity)
      .def_readwrite("values", &SignatureFeature::values);

  py::class_<PairedDataset>(m, "PairedDataset")
      .def_readonly("dim", &PairedDataset::dim)
      .def_readonly("writer_ids", &PairedDataset::writer_ids)
      .def_property_readonly("num_positives", [](const PairedDataset& d) { return d.positives.size(); })
      .def_property_readonly("num_negatives", [](const PairedDataset& d) { return d.negatives.size(); })
      .def_property_readonly("positives", [](const PairedDataset& d) { return pairing::to_matrix(d.positives); })
      .def_property_readonly("negatives", [](const PairedDataset& d) { return pairing::to_matrix(d.negatives); });

  m.def("build_dataset", &pairing::build_dataset, py::arg("features"));
  m.def("count_pairs", [](const std::vector<SignatureFeature>& features) {
    py::list out;
    for (const auto& c : pairing::count_pairs(features)) {
      out.append(py::make_tuple(c.writer_id, c.positives, c.negatives));
    }
    return out;
  }, py::arg("features"), "List of (writer_id, positives, negatives).");
  m.def("split_by_writer", [](const std::vector<SignatureFeature>& features,
                              std::array<double, 3> ratios, std::uint64_t seed) {
    auto s = pairing::split_by_writer(features, ratios, seed);
    return py::make_tuple(s.train, s.val, s.test);
  }, py::arg("features"), py::arg("ratios") = std::array<double, 3>{8, 1, 1}, py::arg("seed") = 0);

  m.def("synth_generate", [](std::size_t writers, std::size_t genuine, std::size_t forged,
                             std::size_t dim, double separation, double noise, std::uint64_t seed) {
    return io::synth_generate({writers, genuine, forged, dim, separation, noise, seed});
  }, py::arg("writers") = 10, py::arg("genuine") = 6, py::arg("forged") = 6, py::arg("dim") = 16,
     py::arg("separation") = 5.0, py::arg("noise") = 0.1, py::arg("seed") = 0);

  m.def("load_features", [](const std::filesystem::path& path) { return io::load_features(path); },
        py::arg("path"));
  m.def("save_features", [](const std::filesystem::path& path,
                            const std::vector<SignatureFeature>& features, const std::string& format) {
    io::save_features(path, features, io::feature_format_from_string(format));
  }, py::arg("path"), py::arg("features"), py::arg("format") = "csv");

  // model
  py::class_<ScorerNetwork>(m, "ScorerNetwork")
      .def_property_readonly("input_dim", &ScorerNetwork::input_dim)
      .def_property_readonly("num_parameters", &ScorerNetwork::num_parameters)
      .def("layer_dims", &ScorerNetwork::layer_dims)
      .def("parameters", &ScorerNetwork::flatten)
      .def("set_parameters", [](ScorerNetwork& n, const std::vector<double>& v) { n.unflatten(v); },
           py::arg("values"))
      .def("score", [](const ScorerNetwork& n, const Eigen::MatrixXd& x) { return model::score_all(n, x); },
           py::arg("inputs"), "Scores for each row of `inputs`.");
  m.def("init_network", &model::init_network, py::arg("input_dim"), py::arg("seed") = 0,
        py::arg("hidden") = model::kDefaultHidden);

  // training
  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("p", &TrainConfig::p)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("pos_batch", &TrainConfig::pos_batch)
      .def_readwrite("neg_batch", &TrainConfig::neg_batch)
      .def_readwrite("max_epochs", &TrainConfig::max_epochs)
      .def_readwrite("patience", &TrainConfig::patience)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("beta1", &TrainConfig::beta1)
      .def_readwrite("beta2", &TrainConfig::beta2)
      .def_readwrite("epsilon", &TrainConfig::epsilon)
      .def_readwrite("clip_norm", &TrainConfig::clip_norm)
      .def_readwrite("hidden", &TrainConfig::hidden)
      .def_property("optimizer", [](const TrainConfig& c) { return to_string(c.optimizer); },
                    [](TrainConfig& c, const std::string& s) { c.optimizer = optimizer_from_string(s); })
      .def("validate", &TrainConfig::validate);

  m.def("train", [](const std::vector<SignatureFeature>& features, const TrainConfig& config,
                    std::array<double, 3> ratios) {
    const auto prepared = training::prepare(pairing::split_by_writer(features, ratios, config.seed));
    TrainResult result;
    {
      py::gil_scoped_release release;
      result = training::train(prepared.train, prepared.val, config);
    }
    const auto test = metrics::evaluate(io::score_dataset(result.network, prepared.test));
    py::dict out;
    out["network"] = result.network;
    out["history"] = history_list(result.history);
    out["best_epoch"] = result.history.epochs[result.history.best_epoch].epoch;
    out["test"] = report_dict(test);
    out["mean"] = prepared.stats.mean;
    out["stddev"] = prepared.stats.stddev;
    return out;
  }, py::arg("features"), py::arg("config") = TrainConfig{},
     py::arg("ratios") = std::array<double, 3>{8, 1, 1},
     "Splits by writer with the config seed, trains, and evaluates on the test writers.");

  m.def("sweep_p", [](const std::vector<SignatureFeature>& features, const std::vector<double>& candidates,
                      const TrainConfig& config, std::array<double, 3> ratios, bool parallel) {
    const auto prepared = training::prepare(pairing::split_by_writer(features, ratios, config.seed));
    SweepResult sweep;
    {
      py::gil_scoped_release release;
      sweep = training::sweep_p(prepared.train, prepared.val, candidates, config, nullptr, parallel);
    }
    py::dict histories;
    for (std::size_t k = 0; k < sweep.candidates.size(); ++k) {
      histories[py::float_(sweep.candidates[k])] = history_list(sweep.histories[k]);
    }
    return py::make_tuple(sweep.best_p, histories);
  }, py::arg("features"), py::arg("candidates") = training::kDefaultPCandidates,
     py::arg("config") = TrainConfig{}, py::arg("ratios") = std::array<double, 3>{8, 1, 1},
     py::arg("parallel") = true, "Returns (best_p, {p: history}).");

  m.def("load_checkpoint", [](const std::filesystem::path& path) {
    auto c = io::load_checkpoint(path);
    py::dict out;
    out["network"] = c.network;
    out["config"] = c.config;
    out["mean"] = c.stats.mean;
    out["stddev"] = c.stats.stddev;
    out["best_val_pos_at_top"] = c.best_val_pos_at_top;
    return out;
  }, py::arg("path"));
}
