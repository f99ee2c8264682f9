#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace toprank {

/// Fully-connected layer, weight is (out x in).
struct DenseLayer {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
};

/// Feedforward ranking function r(x): rectifier on hidden layers and a linear
/// scalar head. A default-constructed network is empty (untrained).
///
/// Every network instance carries an identity and a parameter version so that
/// a ForwardTrace can be matched to the parameters that produced it.
class ScorerNetwork {
 public:
  ScorerNetwork() = default;
  /// Zero-initialized parameters. `layer_dims` = {input, hidden..., 1}.
  explicit ScorerNetwork(const std::vector<std::size_t>& layer_dims);

  ScorerNetwork(const ScorerNetwork& other);
  ScorerNetwork& operator=(const ScorerNetwork& other);
  ScorerNetwork(ScorerNetwork&&) noexcept = default;
  ScorerNetwork& operator=(ScorerNetwork&&) noexcept = default;

  bool empty() const { return layers_.empty(); }
  std::vector<std::size_t> layer_dims() const;
  std::size_t input_dim() const;
  std::size_t num_layers() const { return layers_.size(); }
  std::size_t num_parameters() const;

  const std::vector<DenseLayer>& layers() const { return layers_; }
  /// Mutable access bumps the parameter version, invalidating prior traces.
  std::vector<DenseLayer>& mutable_layers();

  /// Weights row-major per layer followed by the bias, layer by layer.
  std::vector<double> flatten() const;
  void unflatten(std::span<const double> params);

  std::uint64_t id() const { return id_; }
  std::uint64_t version() const { return version_; }

 private:
  std::vector<DenseLayer> layers_;
  std::uint64_t id_ = next_id();
  std::uint64_t version_ = 0;

  static std::uint64_t next_id();
};

/// Per-layer pre-activations and activations for one batch, columns are
/// samples. activations[0] is the input; activations[l+1] = act(pre[l]).
struct ForwardTrace {
  std::uint64_t network_id = 0;
  std::uint64_t network_version = 0;
  std::vector<Eigen::MatrixXd> pre_activations;
  std::vector<Eigen::MatrixXd> activations;

  std::size_t batch_size() const {
    return activations.empty() ? 0 : static_cast<std::size_t>(activations.front().cols());
  }
};

struct ParamGrads {
  std::vector<DenseLayer> layers;

  double squared_norm() const;
  void scale(double factor);
  std::vector<double> flatten() const;
};

struct BatchScores {
  std::vector<double> scores;
  ForwardTrace trace;
};

namespace model {

inline const std::vector<std::size_t> kDefaultHidden{2048, 1024, 512, 128};

/// He-normal weights (variance 2 / fan_in), zero biases.
ScorerNetwork init_network(std::size_t input_dim, std::uint64_t seed,
                           const std::vector<std::size_t>& hidden = kDefaultHidden);

double score(const ScorerNetwork& network, std::span<const double> x);

/// `inputs` holds one sample per row.
BatchScores score_batch(const ScorerNetwork& network, const Eigen::MatrixXd& inputs);

/// Scores without keeping a trace, in chunks of `chunk` rows.
std::vector<double> score_all(const ScorerNetwork& network, const Eigen::MatrixXd& inputs,
                              std::size_t chunk = 1024);

/// Output of the last hidden layer (the input itself for a network without
/// hidden layers), one row per sample.
Eigen::MatrixXd penultimate_activations(const ScorerNetwork& network,
                                        const Eigen::MatrixXd& inputs);

/// Gradient of sum_k grad_wrt_scores[k] * score_k with respect to every
/// parameter. The rectifier derivative at 0 is taken as 0.
ParamGrads backward(const ScorerNetwork& network, const ForwardTrace& trace,
                    std::span<const double> grad_wrt_scores);

}  // namespace model
}  // namespace toprank
