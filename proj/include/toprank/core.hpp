#pragma once

// Loss primitives for top-rank learning: the logistic surrogate, a scaled
// p-norm and the p-norm relaxed top-rank loss with its exact score gradients.
//
//   L(pos, neg) = 1/m * sum_i ( sum_j l(pos_i - neg_j)^p )^(1/p),
//   l(z) = log(1 + exp(-z)).
//
// As p grows the inner norm approaches max_j, so the loss approaches the
// mean over positives of the surrogate against the hardest negative.

#include <span>
#include <vector>

namespace toprank::core {

/// log(1 + e^{-z}); finite for every finite z.
double surrogate_loss(double z);

/// d/dz log(1 + e^{-z}) = -1 / (1 + e^{z}).
double surrogate_loss_grad(double z);

/// (sum v_j^p)^{1/p} with max-scaling. Returns 0 for an all-zero input.
double stable_p_norm(std::span<const double> values, double p);

double toprank_loss(std::span<const double> pos_scores,
                    std::span<const double> neg_scores, double p);

/// Mean over positives of max_j l(pos_i - neg_j); the p -> infinity limit.
double toprank_loss_max(std::span<const double> pos_scores,
                        std::span<const double> neg_scores);

struct ScoreGrads {
  std::vector<double> pos;
  std::vector<double> neg;
};

struct LossAndGrads {
  double loss = 0.0;
  ScoreGrads grads;
};

ScoreGrads toprank_loss_grad(std::span<const double> pos_scores,
                             std::span<const double> neg_scores, double p);

/// Loss and gradient from a single pass over the m x n surrogate terms.
LossAndGrads toprank_loss_and_grad(std::span<const double> pos_scores,
                                   std::span<const double> neg_scores,
                                   double p);

}  // namespace toprank::core
