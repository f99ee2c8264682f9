#include "toprank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "toprank/errors.hpp"

namespace toprank::metrics {
namespace {

void validate(const ScoredSets& sets) {
  if (sets.pos_scores.empty() || sets.neg_scores.empty()) {
    throw InvalidArgument("metrics: positive and negative score sets must be nonempty");
  }
  const auto finite = [](double s) { return std::isfinite(s); };
  if (!std::all_of(sets.pos_scores.begin(), sets.pos_scores.end(), finite) ||
      !std::all_of(sets.neg_scores.begin(), sets.neg_scores.end(), finite)) {
    throw InvalidArgument("metrics: scores must be finite");
  }
}

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Number of entries of the ascending list that are > t.
std::size_t count_above(const std::vector<double>& asc, double t) {
  return static_cast<std::size_t>(asc.end() - std::upper_bound(asc.begin(), asc.end(), t));
}

double rate(std::size_t count, std::size_t total) {
  return static_cast<double>(count) / static_cast<double>(total);
}

// Accuracy and error rates at one threshold using pre-sorted score lists.
struct SortedSets {
  std::vector<double> pos;
  std::vector<double> neg;

  explicit SortedSets(const ScoredSets& sets)
      : pos(sorted(sets.pos_scores)), neg(sorted(sets.neg_scores)) {}

  ErrorRates rates(double t) const {
    return {rate(count_above(neg, t), neg.size()),
            rate(pos.size() - count_above(pos, t), pos.size())};
  }

  double balanced_accuracy(double t) const {
    const double tpr = rate(count_above(pos, t), pos.size());
    const double tnr = rate(neg.size() - count_above(neg, t), neg.size());
    return (tpr + tnr) / 2.0;
  }
};

}  // namespace

double pos_at_top(const ScoredSets& sets) {
  validate(sets);
  const double top = top_ranked_negative(sets).score;
  std::size_t above = 0;
  for (double s : sets.pos_scores) above += s > top ? 1 : 0;
  return rate(above, sets.pos_scores.size());
}

TopNegative top_ranked_negative(const ScoredSets& sets) {
  if (sets.neg_scores.empty()) throw InvalidArgument("top_ranked_negative: no negatives");
  const auto it = std::max_element(sets.neg_scores.begin(), sets.neg_scores.end());
  return {static_cast<std::size_t>(it - sets.neg_scores.begin()), *it};
}

std::vector<RocPoint> roc_curve(const ScoredSets& sets) {
  validate(sets);
  std::vector<double> distinct = sets.pos_scores;
  distinct.insert(distinct.end(), sets.neg_scores.begin(), sets.neg_scores.end());
  std::sort(distinct.begin(), distinct.end(), std::greater<>());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  const SortedSets s(sets);
  std::vector<RocPoint> curve;
  curve.reserve(distinct.size() + 1);
  // Threshold at a distinct score admits everything strictly above it.
  for (double t : distinct) {
    curve.push_back({t, rate(count_above(s.neg, t), s.neg.size()),
                     rate(count_above(s.pos, t), s.pos.size())});
  }
  curve.push_back({-std::numeric_limits<double>::infinity(), 1.0, 1.0});
  return curve;
}

double auc(const ScoredSets& sets) {
  validate(sets);
  const auto neg = sorted(sets.neg_scores);
  // Wins count 2, ties 1; halved at the end so the sum stays integral.
  double twice = 0.0;
  for (double p : sets.pos_scores) {
    const auto lo = std::lower_bound(neg.begin(), neg.end(), p);
    const auto hi = std::upper_bound(lo, neg.end(), p);
    twice += 2.0 * static_cast<double>(lo - neg.begin()) + static_cast<double>(hi - lo);
  }
  return twice / 2.0 /
         (static_cast<double>(sets.pos_scores.size()) * static_cast<double>(neg.size()));
}

double trapezoid_area(const std::vector<RocPoint>& curve) {
  double area = 0.0;
  for (std::size_t k = 1; k < curve.size(); ++k) {
    area += (curve[k].fpr - curve[k - 1].fpr) * (curve[k].tpr + curve[k - 1].tpr) / 2.0;
  }
  return area;
}

std::vector<double> candidate_thresholds(const ScoredSets& sets) {
  validate(sets);
  std::vector<double> pooled = sets.pos_scores;
  pooled.insert(pooled.end(), sets.neg_scores.begin(), sets.neg_scores.end());
  std::sort(pooled.begin(), pooled.end());
  pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

  std::vector<double> out;
  out.reserve(pooled.size() + 1);
  out.push_back(pooled.front() - 1.0);
  for (std::size_t k = 1; k < pooled.size(); ++k) {
    out.push_back(pooled[k - 1] + (pooled[k] - pooled[k - 1]) / 2.0);
  }
  out.push_back(pooled.back() + 1.0);
  return out;
}

ThresholdedAccuracy accuracy(const ScoredSets& sets) {
  const auto candidates = candidate_thresholds(sets);
  const SortedSets s(sets);
  ThresholdedAccuracy best{-1.0, 0.0};
  for (double t : candidates) {
    const double acc = s.balanced_accuracy(t);
    if (acc > best.accuracy) best = {acc, t};
  }
  return best;
}

ErrorRates far_frr(const ScoredSets& sets, double threshold) {
  validate(sets);
  if (!std::isfinite(threshold)) throw InvalidArgument("far_frr: threshold must be finite");
  return SortedSets(sets).rates(threshold);
}

EerPoint eer_threshold(const ScoredSets& sets) {
  const auto candidates = candidate_thresholds(sets);
  const SortedSets s(sets);
  EerPoint best;
  double best_gap = std::numeric_limits<double>::infinity();
  for (double t : candidates) {
    const auto r = s.rates(t);
    const double gap = std::abs(r.far - r.frr);
    if (gap < best_gap) {
      best_gap = gap;
      best = {t, r.far, r.frr};
    }
  }
  return best;
}

EvalReport evaluate(const ScoredSets& sets) {
  EvalReport report;
  report.pos_at_top = pos_at_top(sets);
  const auto acc = accuracy(sets);
  report.accuracy = acc.accuracy;
  report.threshold_accuracy = acc.threshold;
  report.auc = auc(sets);
  const auto eer = eer_threshold(sets);
  report.far = eer.far;
  report.frr = eer.frr;
  report.threshold_eer = eer.threshold;
  const auto at_acc = far_frr(sets, acc.threshold);
  report.far_at_accuracy = at_acc.far;
  report.frr_at_accuracy = at_acc.frr;
  return report;
}

}  // namespace toprank::metrics
