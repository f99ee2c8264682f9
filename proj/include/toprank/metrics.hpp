#pragma once

// Bipartite ranking and verification metrics. A pair is accepted as genuine
// when its score is strictly greater than the threshold; FAR, FRR, accuracy
// and the ROC all share this rule.

#include <cstddef>
#include <span>
#include <vector>

namespace toprank {

struct ScoredSets {
  std::vector<double> pos_scores;
  std::vector<double> neg_scores;
};

struct RocPoint {
  double threshold = 0.0;  // the point is produced by "score > threshold"
  double fpr = 0.0;
  double tpr = 0.0;
};

struct TopNegative {
  std::size_t index = 0;
  double score = 0.0;
};

struct ThresholdedAccuracy {
  double accuracy = 0.0;
  double threshold = 0.0;
};

struct ErrorRates {
  double far = 0.0;
  double frr = 0.0;
};

struct EerPoint {
  double threshold = 0.0;
  double far = 0.0;
  double frr = 0.0;
};

/// One Table-1 style row. `far`/`frr` are taken at the equal-error threshold;
/// the rates at the accuracy-maximizing threshold are kept alongside.
struct EvalReport {
  double pos_at_top = 0.0;
  double accuracy = 0.0;
  double auc = 0.0;
  double far = 0.0;
  double frr = 0.0;
  double threshold_accuracy = 0.0;
  double threshold_eer = 0.0;
  double far_at_accuracy = 0.0;
  double frr_at_accuracy = 0.0;
};

namespace metrics {

/// Fraction of positives strictly above the top-ranked negative.
double pos_at_top(const ScoredSets& sets);

/// First index attaining the maximum negative score.
TopNegative top_ranked_negative(const ScoredSets& sets);

/// From (0,0) to (1,1); tied scores enter the curve together.
std::vector<RocPoint> roc_curve(const ScoredSets& sets);

/// Mann-Whitney statistic with half credit for ties.
double auc(const ScoredSets& sets);

double trapezoid_area(const std::vector<RocPoint>& curve);

/// Midpoints between consecutive distinct pooled scores, plus min - 1 and
/// max + 1, ascending.
std::vector<double> candidate_thresholds(const ScoredSets& sets);

/// max_t (TPR + TNR) / 2; ties resolve to the smallest threshold.
ThresholdedAccuracy accuracy(const ScoredSets& sets);

ErrorRates far_frr(const ScoredSets& sets, double threshold);

/// Candidate threshold minimizing |FAR - FRR|; ties resolve to the smallest
/// threshold.
EerPoint eer_threshold(const ScoredSets& sets);

EvalReport evaluate(const ScoredSets& sets);

}  // namespace metrics
}  // namespace toprank
