#include "toprank/model.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <string>

#include "toprank/errors.hpp"

namespace toprank {

std::uint64_t ScorerNetwork::next_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

ScorerNetwork::ScorerNetwork(const std::vector<std::size_t>& layer_dims) {
  if (layer_dims.size() < 2) throw InvalidArgument("network needs at least input and output dims");
  if (layer_dims.back() != 1) throw InvalidArgument("network output dimension must be 1");
  for (std::size_t d : layer_dims) {
    if (d < 1) throw InvalidArgument("layer dimensions must be >= 1");
  }
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(layer_dims[l]);
    const auto out = static_cast<Eigen::Index>(layer_dims[l + 1]);
    layers_.push_back({Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)});
  }
}

ScorerNetwork::ScorerNetwork(const ScorerNetwork& other) : layers_(other.layers_) {}

ScorerNetwork& ScorerNetwork::operator=(const ScorerNetwork& other) {
  if (this != &other) {
    layers_ = other.layers_;
    ++version_;
  }
  return *this;
}

std::vector<std::size_t> ScorerNetwork::layer_dims() const {
  std::vector<std::size_t> dims;
  if (layers_.empty()) return dims;
  dims.push_back(static_cast<std::size_t>(layers_.front().weight.cols()));
  for (const auto& layer : layers_) dims.push_back(static_cast<std::size_t>(layer.weight.rows()));
  return dims;
}

std::size_t ScorerNetwork::input_dim() const {
  return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.front().weight.cols());
}

std::size_t ScorerNetwork::num_parameters() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) {
    n += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  }
  return n;
}

std::vector<DenseLayer>& ScorerNetwork::mutable_layers() {
  ++version_;
  return layers_;
}

namespace {

void append_layers(const std::vector<DenseLayer>& layers, std::vector<double>& out) {
  for (const auto& layer : layers) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) out.push_back(layer.weight(r, c));
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) out.push_back(layer.bias[r]);
  }
}

}  // namespace

std::vector<double> ScorerNetwork::flatten() const {
  std::vector<double> out;
  out.reserve(num_parameters());
  append_layers(layers_, out);
  return out;
}

void ScorerNetwork::unflatten(std::span<const double> params) {
  if (params.size() != num_parameters()) {
    throw InvalidArgument("unflatten: expected " + std::to_string(num_parameters()) +
                          " parameters, got " + std::to_string(params.size()));
  }
  std::size_t k = 0;
  for (auto& layer : mutable_layers()) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = params[k++];
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias[r] = params[k++];
  }
}

double ParamGrads::squared_norm() const {
  double s = 0.0;
  for (const auto& layer : layers) s += layer.weight.squaredNorm() + layer.bias.squaredNorm();
  return s;
}

void ParamGrads::scale(double factor) {
  for (auto& layer : layers) {
    layer.weight *= factor;
    layer.bias *= factor;
  }
}

std::vector<double> ParamGrads::flatten() const {
  std::vector<double> out;
  append_layers(layers, out);
  return out;
}

namespace model {
namespace {

void check_input(const ScorerNetwork& network, const Eigen::MatrixXd& inputs) {
  if (network.empty()) throw InvalidState("scorer network is empty (not initialized or loaded)");
  if (inputs.rows() == 0) throw InvalidArgument("score_batch: empty batch");
  if (static_cast<std::size_t>(inputs.cols()) != network.input_dim()) {
    throw InvalidArgument("input dimension " + std::to_string(inputs.cols()) +
                          " does not match network input " +
                          std::to_string(network.input_dim()));
  }
  if (!inputs.allFinite()) throw InvalidArgument("score_batch: non-finite input");
}

// Forward pass over columns; fills the trace when given one.
Eigen::MatrixXd forward(const ScorerNetwork& network, const Eigen::MatrixXd& inputs,
                        ForwardTrace* trace, std::size_t stop_before_layer) {
  Eigen::MatrixXd act = inputs.transpose();
  const auto& layers = network.layers();
  const std::size_t last = layers.size() - 1;
  if (trace) trace->activations.push_back(act);
  for (std::size_t l = 0; l < stop_before_layer; ++l) {
    Eigen::MatrixXd pre = layers[l].weight * act;
    pre.colwise() += layers[l].bias;
    act = l == last ? pre : Eigen::MatrixXd(pre.cwiseMax(0.0));
    if (trace) {
      trace->pre_activations.push_back(std::move(pre));
      trace->activations.push_back(act);
    }
  }
  return act;
}

std::vector<double> row_to_vector(const Eigen::MatrixXd& m) {
  return {m.data(), m.data() + m.size()};
}

}  // namespace

ScorerNetwork init_network(std::size_t input_dim, std::uint64_t seed,
                           const std::vector<std::size_t>& hidden) {
  if (input_dim < 1) throw InvalidArgument("init_network: input_dim must be >= 1");
  std::vector<std::size_t> dims{input_dim};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(1);
  ScorerNetwork net(dims);
  std::mt19937_64 rng(seed);
  for (auto& layer : net.mutable_layers()) {
    std::normal_distribution<double> normal(
        0.0, std::sqrt(2.0 / static_cast<double>(layer.weight.cols())));
    for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) layer.weight(r, c) = normal(rng);
    }
  }
  return net;
}

double score(const ScorerNetwork& network, std::span<const double> x) {
  const Eigen::MatrixXd row =
      Eigen::Map<const Eigen::RowVectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  return score_batch(network, row).scores.front();
}

BatchScores score_batch(const ScorerNetwork& network, const Eigen::MatrixXd& inputs) {
  check_input(network, inputs);
  BatchScores out;
  out.trace.network_id = network.id();
  out.trace.network_version = network.version();
  const Eigen::MatrixXd result = forward(network, inputs, &out.trace, network.num_layers());
  out.scores = row_to_vector(result);
  return out;
}

std::vector<double> score_all(const ScorerNetwork& network, const Eigen::MatrixXd& inputs,
                              std::size_t chunk) {
  check_input(network, inputs);
  if (chunk == 0) chunk = 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(inputs.rows()));
  for (Eigen::Index start = 0; start < inputs.rows();
       start += static_cast<Eigen::Index>(chunk)) {
    const Eigen::Index len = std::min<Eigen::Index>(static_cast<Eigen::Index>(chunk),
                                                    inputs.rows() - start);
    const Eigen::MatrixXd block = inputs.middleRows(start, len);
    const auto part = row_to_vector(forward(network, block, nullptr, network.num_layers()));
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

Eigen::MatrixXd penultimate_activations(const ScorerNetwork& network,
                                        const Eigen::MatrixXd& inputs) {
  check_input(network, inputs);
  return forward(network, inputs, nullptr, network.num_layers() - 1).transpose();
}

ParamGrads backward(const ScorerNetwork& network, const ForwardTrace& trace,
                    std::span<const double> grad_wrt_scores) {
  if (trace.network_id != network.id() || trace.network_version != network.version() ||
      trace.pre_activations.size() != network.num_layers() ||
      trace.activations.size() != network.num_layers() + 1) {
    throw InvalidState("backward: trace does not belong to the current network parameters");
  }
  if (grad_wrt_scores.size() != trace.batch_size()) {
    throw InvalidArgument("backward: gradient length " + std::to_string(grad_wrt_scores.size()) +
                          " != batch size " + std::to_string(trace.batch_size()));
  }
  const auto& layers = network.layers();
  ParamGrads grads;
  grads.layers.resize(layers.size());

  Eigen::MatrixXd delta = Eigen::Map<const Eigen::RowVectorXd>(
      grad_wrt_scores.data(), static_cast<Eigen::Index>(grad_wrt_scores.size()));
  for (std::size_t l = layers.size(); l-- > 0;) {
    if (l + 1 < layers.size()) {
      delta = delta.cwiseProduct(
          (trace.pre_activations[l].array() > 0.0).cast<double>().matrix());
    }
    grads.layers[l].weight = delta * trace.activations[l].transpose();
    grads.layers[l].bias = delta.rowwise().sum();
    if (l > 0) delta = layers[l].weight.transpose() * delta;
  }
  return grads;
}

}  // namespace model
}  // namespace toprank
