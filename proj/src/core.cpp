#include "toprank/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "toprank/errors.hpp"

namespace toprank::core {
namespace {

void require_finite(double z, const char* what) {
  if (!std::isfinite(z)) {
    throw InvalidArgument(std::string(what) + ": non-finite input");
  }
}

void check_p(double p) {
  if (!std::isfinite(p) || p < 1.0) {
    throw InvalidArgument("p must be a finite real >= 1");
  }
}

void check_scores(std::span<const double> pos, std::span<const double> neg) {
  if (pos.empty() || neg.empty()) {
    throw InvalidArgument("toprank loss: positive and negative score lists must be nonempty");
  }
  for (double s : pos) require_finite(s, "toprank loss");
  for (double s : neg) require_finite(s, "toprank loss");
}

// No finiteness check; callers validate once per batch.
inline double surrogate(double z) {
  return z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

inline double surrogate_grad(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(z));
}

// (sum v^p)^(1/p) over v >= 0, scaled by the largest entry.
double scaled_norm(std::span<const double> v, double p, double vmax) {
  if (vmax == 0.0) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += std::pow(x / vmax, p);
  return vmax * std::pow(acc, 1.0 / p);
}

}  // namespace

double surrogate_loss(double z) {
  require_finite(z, "surrogate_loss");
  return surrogate(z);
}

double surrogate_loss_grad(double z) {
  require_finite(z, "surrogate_loss_grad");
  return surrogate_grad(z);
}

double stable_p_norm(std::span<const double> values, double p) {
  check_p(p);
  if (values.empty()) throw InvalidArgument("stable_p_norm: empty input");
  double vmax = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidArgument("stable_p_norm: entries must be finite and >= 0");
    }
    vmax = std::max(vmax, v);
  }
  return scaled_norm(values, p, vmax);
}

double toprank_loss(std::span<const double> pos_scores,
                    std::span<const double> neg_scores, double p) {
  check_p(p);
  check_scores(pos_scores, neg_scores);
  std::vector<double> row(neg_scores.size());
  double total = 0.0;
  for (double rp : pos_scores) {
    double vmax = 0.0;
    for (std::size_t j = 0; j < neg_scores.size(); ++j) {
      row[j] = surrogate(rp - neg_scores[j]);
      vmax = std::max(vmax, row[j]);
    }
    total += scaled_norm(row, p, vmax);
  }
  return total / static_cast<double>(pos_scores.size());
}

double toprank_loss_max(std::span<const double> pos_scores,
                        std::span<const double> neg_scores) {
  check_scores(pos_scores, neg_scores);
  // l is decreasing, so the max over negatives is attained at the top negative.
  const double top = *std::max_element(neg_scores.begin(), neg_scores.end());
  double total = 0.0;
  for (double rp : pos_scores) total += surrogate(rp - top);
  return total / static_cast<double>(pos_scores.size());
}

LossAndGrads toprank_loss_and_grad(std::span<const double> pos_scores,
                                   std::span<const double> neg_scores,
                                   double p) {
  check_p(p);
  check_scores(pos_scores, neg_scores);
  const std::size_t m = pos_scores.size();
  const std::size_t n = neg_scores.size();
  const double inv_m = 1.0 / static_cast<double>(m);

  LossAndGrads out;
  out.grads.pos.assign(m, 0.0);
  out.grads.neg.assign(n, 0.0);

  std::vector<double> row(n);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double vmax = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = surrogate(pos_scores[i] - neg_scores[j]);
      vmax = std::max(vmax, row[j]);
    }
    const double norm = scaled_norm(row, p, vmax);
    total += norm;
    if (norm == 0.0) continue;  // every term underflowed; gradient is zero too

    // dN/dl_ij = (l_ij / N)^(p-1), bounded by 1.
    double gpos = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = std::pow(row[j] / norm, p - 1.0) *
                       surrogate_grad(pos_scores[i] - neg_scores[j]) * inv_m;
      gpos += w;
      out.grads.neg[j] -= w;
    }
    out.grads.pos[i] = gpos;
  }
  out.loss = total * inv_m;
  return out;
}

ScoreGrads toprank_loss_grad(std::span<const double> pos_scores,
                             std::span<const double> neg_scores, double p) {
  return toprank_loss_and_grad(pos_scores, neg_scores, p).grads;
}

}  // namespace toprank::core
