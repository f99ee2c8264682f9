#include <cmath>

#include "toprank/errors.hpp"
#include "toprank/training.hpp"

namespace toprank {

std::string to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::plain_gradient: return "sgd";
    case OptimizerKind::momentum: return "momentum";
    case OptimizerKind::adaptive_moment: return "adam";
  }
  return "adam";
}

OptimizerKind optimizer_from_string(const std::string& name) {
  if (name == "sgd" || name == "plain") return OptimizerKind::plain_gradient;
  if (name == "momentum") return OptimizerKind::momentum;
  if (name == "adam") return OptimizerKind::adaptive_moment;
  throw InvalidArgument("unknown optimizer '" + name + "' (expected sgd, momentum or adam)");
}

Optimizer::Optimizer(const TrainConfig& config)
    : kind_(config.optimizer),
      lr_(config.learning_rate),
      beta1_(config.beta1),
      beta2_(config.beta2),
      epsilon_(config.epsilon) {}

namespace {

std::vector<DenseLayer> zeros_like(const std::vector<DenseLayer>& layers) {
  std::vector<DenseLayer> out;
  out.reserve(layers.size());
  for (const auto& l : layers) {
    out.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                   Eigen::VectorXd::Zero(l.bias.size())});
  }
  return out;
}

}  // namespace

void Optimizer::step(ScorerNetwork& network, const ParamGrads& grads) {
  if (grads.layers.size() != network.num_layers()) {
    throw InvalidArgument("optimizer: gradient layer count does not match network");
  }
  ++steps_;
  auto& layers = network.mutable_layers();
  switch (kind_) {
    case OptimizerKind::plain_gradient:
      for (std::size_t l = 0; l < layers.size(); ++l) {
        layers[l].weight -= lr_ * grads.layers[l].weight;
        layers[l].bias -= lr_ * grads.layers[l].bias;
      }
      break;
    case OptimizerKind::momentum:
      if (first_.empty()) first_ = zeros_like(layers);
      for (std::size_t l = 0; l < layers.size(); ++l) {
        first_[l].weight = beta1_ * first_[l].weight + grads.layers[l].weight;
        first_[l].bias = beta1_ * first_[l].bias + grads.layers[l].bias;
        layers[l].weight -= lr_ * first_[l].weight;
        layers[l].bias -= lr_ * first_[l].bias;
      }
      break;
    case OptimizerKind::adaptive_moment: {
      if (first_.empty()) {
        first_ = zeros_like(layers);
        second_ = zeros_like(layers);
      }
      const double t = static_cast<double>(steps_);
      const double c1 = 1.0 - std::pow(beta1_, t);
      const double c2 = 1.0 - std::pow(beta2_, t);
      const auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
        m = beta1_ * m + (1.0 - beta1_) * g;
        v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
        param.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + epsilon_);
      };
      for (std::size_t l = 0; l < layers.size(); ++l) {
        update(layers[l].weight, first_[l].weight, second_[l].weight, grads.layers[l].weight);
        update(layers[l].bias, first_[l].bias, second_[l].bias, grads.layers[l].bias);
      }
      break;
    }
  }
}

}  // namespace toprank
