#include "toprank/training.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "toprank/core.hpp"
#include "toprank/errors.hpp"
#include "toprank/metrics.hpp"

namespace toprank {

void TrainConfig::validate() const {
  if (!std::isfinite(p) || p < 1.0) throw InvalidArgument("config: p must be >= 1");
  if (!std::isfinite(learning_rate) || learning_rate < 0.0) {
    throw InvalidArgument("config: learning_rate must be finite and >= 0");
  }
  if (pos_batch < 1 || neg_batch < 1) throw InvalidArgument("config: batch sizes must be >= 1");
  if (max_epochs < 1) throw InvalidArgument("config: max_epochs must be >= 1");
  if (patience < 1 || patience > max_epochs) {
    throw InvalidArgument("config: patience must be in [1, max_epochs]");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw InvalidArgument("config: beta1 and beta2 must be in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw InvalidArgument("config: epsilon must be > 0");
  if (std::isnan(clip_norm)) throw InvalidArgument("config: clip_norm is NaN");
  for (std::size_t h : hidden) {
    if (h < 1) throw InvalidArgument("config: hidden layer sizes must be >= 1");
  }
}

namespace training {
namespace {

// Seed offset separating the shuffle stream from weight initialization.
constexpr std::uint64_t kShuffleStream = 0x9e3779b97f4a7c15ULL;

void require_polarities(const PairedDataset& ds, const char* name) {
  if (ds.positives.empty() || ds.negatives.empty()) {
    throw InvalidArgument(std::string(name) + " set needs at least one positive and one negative pair");
  }
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& rows, const std::vector<std::size_t>& order,
                       std::size_t begin, std::size_t end) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(end - begin), rows.cols());
  for (std::size_t k = begin; k < end; ++k) {
    out.row(static_cast<Eigen::Index>(k - begin)) = rows.row(static_cast<Eigen::Index>(order[k]));
  }
  return out;
}

void require_finite(const ScoredSets& sets, std::size_t epoch) {
  const auto finite = [](double s) { return std::isfinite(s); };
  if (!std::all_of(sets.pos_scores.begin(), sets.pos_scores.end(), finite) ||
      !std::all_of(sets.neg_scores.begin(), sets.neg_scores.end(), finite)) {
    throw TrainingDiverged(static_cast<int>(epoch));
  }
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

ScoredSets score_sets(const ScorerNetwork& net, const Eigen::MatrixXd& pos,
                      const Eigen::MatrixXd& neg) {
  return {model::score_all(net, pos), model::score_all(net, neg)};
}

}  // namespace

PreparedData prepare(const FeatureSplit& split) {
  PreparedData out;
  const auto train_raw = pairing::build_dataset(split.train);
  out.stats = pairing::fit_normalization(train_raw);
  out.train = pairing::apply_normalization(train_raw, out.stats);
  out.val = pairing::apply_normalization(pairing::build_dataset(split.val), out.stats);
  out.test = pairing::apply_normalization(pairing::build_dataset(split.test), out.stats);
  return out;
}

double minibatch_loss(const ScorerNetwork& network, const Eigen::MatrixXd& pos,
                      const Eigen::MatrixXd& neg, double p) {
  const auto sets = score_sets(network, pos, neg);
  return core::toprank_loss(sets.pos_scores, sets.neg_scores, p);
}

double minibatch_step(ScorerNetwork& network, Optimizer& optimizer, const Eigen::MatrixXd& pos,
                      const Eigen::MatrixXd& neg, double p, double clip_norm) {
  Eigen::MatrixXd batch(pos.rows() + neg.rows(), pos.cols());
  batch << pos, neg;
  const auto forward = model::score_batch(network, batch);
  const auto m = static_cast<std::size_t>(pos.rows());
  const std::span<const double> scores(forward.scores);
  for (double s : scores) {
    if (!std::isfinite(s)) return std::numeric_limits<double>::quiet_NaN();
  }
  auto lg = core::toprank_loss_and_grad(scores.first(m), scores.subspan(m), p);
  if (!std::isfinite(lg.loss)) return lg.loss;

  std::vector<double> grad_scores = std::move(lg.grads.pos);
  grad_scores.insert(grad_scores.end(), lg.grads.neg.begin(), lg.grads.neg.end());
  auto grads = model::backward(network, forward.trace, grad_scores);
  if (clip_norm > 0.0) {
    const double norm = std::sqrt(grads.squared_norm());
    if (norm > clip_norm) grads.scale(clip_norm / norm);
  }
  optimizer.step(network, grads);
  return lg.loss;
}

TrainResult train(const PairedDataset& train_set, const PairedDataset& val_set,
                  const TrainConfig& config, std::ostream* log) {
  config.validate();
  require_polarities(train_set, "training");
  require_polarities(val_set, "validation");
  if (train_set.dim != val_set.dim) {
    throw InvalidArgument("training and validation pair dimensions differ");
  }

  const Eigen::MatrixXd train_pos = pairing::to_matrix(train_set.positives);
  const Eigen::MatrixXd train_neg = pairing::to_matrix(train_set.negatives);
  const Eigen::MatrixXd val_pos = pairing::to_matrix(val_set.positives);
  const Eigen::MatrixXd val_neg = pairing::to_matrix(val_set.negatives);

  ScorerNetwork net = model::init_network(train_set.dim, config.seed, config.hidden);
  Optimizer optimizer(config);
  std::mt19937_64 rng(config.seed ^ kShuffleStream);

  const std::size_t m = static_cast<std::size_t>(train_pos.rows());
  const std::size_t n = static_cast<std::size_t>(train_neg.rows());
  std::vector<std::size_t> pos_order(m);
  std::vector<std::size_t> neg_order(n);
  const std::size_t pos_chunks = ceil_div(m, config.pos_batch);
  const std::size_t neg_chunks = ceil_div(n, config.neg_batch);
  const std::size_t steps = std::max(pos_chunks, neg_chunks);

  TrainResult result;
  result.network = net;
  double best = -1.0;
  std::size_t stale = 0;
  if (log) write_history_header(*log);

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::iota(pos_order.begin(), pos_order.end(), 0);
    std::iota(neg_order.begin(), neg_order.end(), 0);
    std::shuffle(pos_order.begin(), pos_order.end(), rng);
    std::shuffle(neg_order.begin(), neg_order.end(), rng);

    // The shorter polarity cycles so every step sees both.
    for (std::size_t s = 0; s < steps; ++s) {
      const std::size_t pb = (s % pos_chunks) * config.pos_batch;
      const std::size_t nb = (s % neg_chunks) * config.neg_batch;
      const auto pos = gather(train_pos, pos_order, pb, std::min(m, pb + config.pos_batch));
      const auto neg = gather(train_neg, neg_order, nb, std::min(n, nb + config.neg_batch));
      const double loss = minibatch_step(net, optimizer, pos, neg, config.p, config.clip_norm);
      if (!std::isfinite(loss)) throw TrainingDiverged(static_cast<int>(epoch));
    }

    EpochRecord record;
    record.epoch = epoch;
    const auto train_scores = score_sets(net, train_pos, train_neg);
    require_finite(train_scores, epoch);
    record.train_loss =
        core::toprank_loss(train_scores.pos_scores, train_scores.neg_scores, config.p);
    if (!std::isfinite(record.train_loss)) throw TrainingDiverged(static_cast<int>(epoch));

    const auto val_scores = score_sets(net, val_pos, val_neg);
    require_finite(val_scores, epoch);
    record.val_pos_at_top = metrics::pos_at_top(val_scores);
    record.val_auc = metrics::auc(val_scores);
    result.history.epochs.push_back(record);
    if (log) write_history_row(*log, record);

    if (record.val_pos_at_top > best) {
      best = record.val_pos_at_top;
      result.history.best_epoch = result.history.epochs.size() - 1;
      result.network = net;
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  return result;
}

SweepResult sweep_p(const PairedDataset& train_set, const PairedDataset& val_set,
                    const std::vector<double>& candidates, const TrainConfig& base_config,
                    std::ostream* log, bool parallel) {
  if (candidates.empty()) throw InvalidArgument("sweep_p: candidate set is empty");
  std::vector<double> ps = candidates;
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  for (double p : ps) {
    TrainConfig c = base_config;
    c.p = p;
    c.validate();
  }

  std::vector<std::ostringstream> logs(ps.size());
  const auto run = [&](std::size_t k) {
    TrainConfig c = base_config;
    c.p = ps[k];
    return train(train_set, val_set, c, log ? &logs[k] : nullptr).history;
  };

  SweepResult out;
  out.candidates = ps;
  if (parallel) {
    std::vector<std::future<TrainHistory>> jobs;
    for (std::size_t k = 0; k < ps.size(); ++k) jobs.push_back(std::async(std::launch::async, run, k));
    for (auto& j : jobs) out.histories.push_back(j.get());
  } else {
    for (std::size_t k = 0; k < ps.size(); ++k) out.histories.push_back(run(k));
  }

  double best = -1.0;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    if (log) *log << "# p=" << ps[k] << '\n' << logs[k].str();
    // Ascending order, so strict improvement keeps the smaller p on ties.
    if (out.histories[k].best_val_pos_at_top() > best) {
      best = out.histories[k].best_val_pos_at_top();
      out.best_p = ps[k];
    }
  }
  return out;
}

void write_history_header(std::ostream& out) {
  out << "epoch\tloss\tval_pos_at_top\tval_auc\n";
}

void write_history_row(std::ostream& out, const EpochRecord& r) {
  std::ostringstream line;
  line << r.epoch << '\t' << std::setprecision(10) << r.train_loss << '\t'
       << std::setprecision(6) << r.val_pos_at_top << '\t' << r.val_auc << '\n';
  out << line.str() << std::flush;
}

}  // namespace training
}  // namespace toprank
