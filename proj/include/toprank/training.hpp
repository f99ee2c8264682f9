#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "toprank/model.hpp"
#include "toprank/pairing.hpp"

namespace toprank {

enum class OptimizerKind { plain_gradient, momentum, adaptive_moment };

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(const std::string& name);

struct TrainConfig {
  double p = 16.0;
  double learning_rate = 1e-4;
  std::size_t pos_batch = 32;
  std::size_t neg_batch = 32;
  std::size_t max_epochs = 200;
  std::size_t patience = 20;
  std::uint64_t seed = 0;
  OptimizerKind optimizer = OptimizerKind::adaptive_moment;
  double beta1 = 0.9;    // first-moment decay, also the momentum coefficient
  double beta2 = 0.999;  // second-moment decay
  double epsilon = 1e-8;
  double clip_norm = 10.0;  // global gradient norm cap; <= 0 disables clipping
  std::vector<std::size_t> hidden = model::kDefaultHidden;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
};

/// Stateful parameter update rule. State is shaped lazily on the first step.
class Optimizer {
 public:
  explicit Optimizer(const TrainConfig& config);

  void step(ScorerNetwork& network, const ParamGrads& grads);
  std::size_t steps_taken() const { return steps_; }

 private:
  OptimizerKind kind_;
  double lr_;
  double beta1_;
  double beta2_;
  double epsilon_;
  std::size_t steps_ = 0;
  std::vector<DenseLayer> first_;
  std::vector<DenseLayer> second_;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_pos_at_top = 0.0;
  double val_auc = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;  // index into `epochs`

  double best_val_pos_at_top() const {
    return epochs.empty() ? 0.0 : epochs[best_epoch].val_pos_at_top;
  }
};

struct TrainResult {
  ScorerNetwork network;
  TrainHistory history;
};

struct PreparedData {
  PairedDataset train;
  PairedDataset val;
  PairedDataset test;
  NormalizationStats stats;
};

struct SweepResult {
  double best_p = 0.0;
  std::vector<double> candidates;
  std::vector<TrainHistory> histories;  // parallel to `candidates`
};

namespace training {

inline const std::vector<double> kDefaultPCandidates{2, 4, 8, 16, 32};

/// Pairs each split and normalizes all three with statistics of the train pairs.
PreparedData prepare(const FeatureSplit& split);

/// Top-rank loss of the network's scores on the given pos/neg rows.
double minibatch_loss(const ScorerNetwork& network, const Eigen::MatrixXd& pos,
                      const Eigen::MatrixXd& neg, double p);

/// One forward/backward/update on a fixed minibatch. Returns the loss before
/// the update. `clip_norm` <= 0 disables clipping.
double minibatch_step(ScorerNetwork& network, Optimizer& optimizer, const Eigen::MatrixXd& pos,
                      const Eigen::MatrixXd& neg, double p, double clip_norm);

/// Minibatch training with early stopping on validation pos@top. Returns the
/// parameters of the best epoch. Writes one history row per epoch to `log`
/// when given.
TrainResult train(const PairedDataset& train_set, const PairedDataset& val_set,
                  const TrainConfig& config, std::ostream* log = nullptr);

/// Trains one model per candidate p and picks the highest best-epoch
/// validation pos@top, ties to the smaller p.
SweepResult sweep_p(const PairedDataset& train_set, const PairedDataset& val_set,
                    const std::vector<double>& candidates, const TrainConfig& base_config,
                    std::ostream* log = nullptr, bool parallel = true);

void write_history_header(std::ostream& out);
void write_history_row(std::ostream& out, const EpochRecord& record);

}  // namespace training
}  // namespace toprank
