#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "toprank/errors.hpp"
#include "toprank/metrics.hpp"

namespace toprank::metrics {
namespace {

ScoredSets sets(std::vector<double> pos, std::vector<double> neg) {
  return {std::move(pos), std::move(neg)};
}

TEST(PosAtTop, Examples) {
  EXPECT_EQ(pos_at_top(sets({3, 2}, {1})), 1.0);
  EXPECT_EQ(pos_at_top(sets({3, 1}, {2})), 0.5);
  EXPECT_EQ(pos_at_top(sets({2}, {2})), 0.0);
}

TEST(PosAtTop, Errors) {
  EXPECT_THROW(pos_at_top(sets({}, {1})), InvalidArgument);
  EXPECT_THROW(pos_at_top(sets({1}, {})), InvalidArgument);
  EXPECT_THROW(pos_at_top(sets({NAN}, {1})), InvalidArgument);
}

TEST(TopRankedNegative, FirstMaximum) {
  const auto t = top_ranked_negative(sets({1}, {0, 5, 5}));
  EXPECT_EQ(t.index, 1u);
  EXPECT_EQ(t.score, 5.0);
  const auto single = top_ranked_negative(sets({1}, {7}));
  EXPECT_EQ(single.index, 0u);
  EXPECT_EQ(single.score, 7.0);
  EXPECT_THROW(top_ranked_negative(sets({1}, {})), InvalidArgument);
}

TEST(TopRankedNegative, MatchesLinearScan) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto neg = oracle::tied_scores(rng, 1 + trial % 20);
    std::size_t best = 0;
    for (std::size_t k = 1; k < neg.size(); ++k) {
      if (neg[k] > neg[best]) best = k;
    }
    EXPECT_EQ(top_ranked_negative(sets({0}, neg)).index, best);
  }
}

TEST(RocCurve, PerfectSeparation) {
  const auto curve = roc_curve(sets({2, 3}, {0, 1}));
  EXPECT_EQ(curve.front().fpr, 0.0);
  EXPECT_EQ(curve.front().tpr, 0.0);
  EXPECT_EQ(curve.back().fpr, 1.0);
  EXPECT_EQ(curve.back().tpr, 1.0);
  bool has_corner = false;
  for (const auto& p : curve) has_corner = has_corner || (p.fpr == 0.0 && p.tpr == 1.0);
  EXPECT_TRUE(has_corner);
}

TEST(RocCurve, SingleTiedScore) {
  const auto curve = roc_curve(sets({1}, {1}));
  ASSERT_EQ(curve.size(), 2u);
  EXPECT_EQ(curve[0].fpr, 0.0);
  EXPECT_EQ(curve[0].tpr, 0.0);
  EXPECT_EQ(curve[1].fpr, 1.0);
  EXPECT_EQ(curve[1].tpr, 1.0);
}

TEST(RocCurve, MonotoneAndTrapezoidMatchesAuc) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = trial % 2 ? sets(oracle::normal_scores(rng, 20), oracle::normal_scores(rng, 20))
                             : sets(oracle::tied_scores(rng, 20), oracle::tied_scores(rng, 20));
    const auto curve = roc_curve(s);
    for (std::size_t k = 1; k < curve.size(); ++k) {
      EXPECT_GE(curve[k].fpr, curve[k - 1].fpr);
      EXPECT_GE(curve[k].tpr, curve[k - 1].tpr);
    }
    EXPECT_NEAR(trapezoid_area(curve), auc(s), 1e-12);
  }
}

TEST(RocCurve, PosAtTopIsTprAtZeroFpr) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = sets(oracle::tied_scores(rng, 15), oracle::tied_scores(rng, 12));
    double tpr0 = 0.0;
    for (const auto& p : roc_curve(s)) {
      if (p.fpr == 0.0) tpr0 = std::max(tpr0, p.tpr);
    }
    EXPECT_EQ(pos_at_top(s), tpr0);
  }
}

TEST(RocCurve, PointsReproduceThresholdRule) {
  std::mt19937_64 rng(4);
  const auto s = sets(oracle::tied_scores(rng, 10), oracle::tied_scores(rng, 10));
  for (const auto& p : roc_curve(s)) {
    if (std::isinf(p.threshold)) continue;
    const auto r = far_frr(s, p.threshold);
    EXPECT_EQ(p.fpr, r.far);
    EXPECT_DOUBLE_EQ(p.tpr, 1.0 - r.frr);
  }
}

TEST(Auc, Examples) {
  EXPECT_EQ(auc(sets({2, 3}, {0, 1})), 1.0);
  EXPECT_EQ(auc(sets({1}, {1})), 0.5);
  EXPECT_EQ(auc(sets({3, 1}, {2, 0})), 0.75);
}

TEST(Accuracy, Examples) {
  const auto sep = accuracy(sets({2, 3}, {0, 1}));
  EXPECT_EQ(sep.accuracy, 1.0);
  EXPECT_EQ(sep.threshold, 1.5);
  EXPECT_EQ(accuracy(sets({1}, {1})).accuracy, 0.5);
  EXPECT_EQ(accuracy(sets({3, 1}, {2, 0})).accuracy, 0.75);
  // Midpoints 0.5 and 2.5 both reach 0.75; the smaller wins.
  EXPECT_EQ(accuracy(sets({3, 1}, {2, 0})).threshold, 0.5);
}

TEST(Accuracy, CandidateThresholds) {
  EXPECT_EQ(candidate_thresholds(sets({3, 1}, {2, 0, 2})),
            (std::vector<double>{-1.0, 0.5, 1.5, 2.5, 4.0}));
}

TEST(FarFrr, Examples) {
  const auto s = sets({3, 1}, {2, 0});
  const auto low = far_frr(s, -10.0);
  EXPECT_EQ(low.far, 1.0);
  EXPECT_EQ(low.frr, 0.0);
  const auto high = far_frr(s, 10.0);
  EXPECT_EQ(high.far, 0.0);
  EXPECT_EQ(high.frr, 1.0);
  const auto mid = far_frr(s, 1.5);
  EXPECT_EQ(mid.far, 0.5);
  EXPECT_EQ(mid.frr, 0.5);
  EXPECT_THROW(far_frr(s, INFINITY), InvalidArgument);
}

TEST(EerThreshold, Examples) {
  const auto sep = eer_threshold(sets({2, 3}, {0, 1}));
  EXPECT_EQ(sep.far, 0.0);
  EXPECT_EQ(sep.frr, 0.0);
  EXPECT_EQ(sep.threshold, 1.5);
  const auto tie = eer_threshold(sets({1}, {1}));
  EXPECT_EQ(tie.threshold, 0.0);  // lowest candidate
  EXPECT_EQ(std::abs(tie.far - tie.frr), 1.0);
}

TEST(EerThreshold, MatchesExhaustiveSweep) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pos = oracle::normal_scores(rng, 50);
    const auto neg = oracle::normal_scores(rng, 50);
    double best_gap = INFINITY;
    double best_t = 0.0;
    for (double t : oracle::sweep_thresholds(pos, neg)) {
      const auto r = oracle::rates_at(pos, neg, t);
      if (std::abs(r.far - r.frr) < best_gap) {
        best_gap = std::abs(r.far - r.frr);
        best_t = t;
      }
    }
    const auto e = eer_threshold(sets(pos, neg));
    EXPECT_EQ(std::abs(e.far - e.frr), best_gap);
    EXPECT_NEAR(e.threshold, best_t, 1e-12);
  }
}

TEST(Metrics, MatchBruteForceOracles) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::size_t> size(1, 30);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto pos = trial % 3 ? oracle::tied_scores(rng, size(rng)) : oracle::normal_scores(rng, size(rng));
    const auto neg = trial % 3 ? oracle::tied_scores(rng, size(rng)) : oracle::normal_scores(rng, size(rng));
    const auto s = sets(pos, neg);
    ASSERT_EQ(pos_at_top(s), oracle::pos_at_top(pos, neg));
    ASSERT_EQ(auc(s), oracle::auc(pos, neg));
    double best = -1.0;
    for (double t : oracle::sweep_thresholds(pos, neg)) {
      best = std::max(best, oracle::rates_at(pos, neg, t).balanced_accuracy);
    }
    const auto acc = accuracy(s);
    ASSERT_EQ(acc.accuracy, best);
    const auto r = far_frr(s, acc.threshold);
    const auto ref = oracle::rates_at(pos, neg, acc.threshold);
    ASSERT_EQ(r.far, ref.far);
    ASSERT_EQ(r.frr, ref.frr);
    ASSERT_GE(acc.accuracy, 0.5);
  }
}

TEST(Metrics, MonotoneTransformInvariance) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = sets(oracle::tied_scores(rng, 12), oracle::tied_scores(rng, 9));
    for (const auto& phi : std::vector<std::function<double(double)>>{
             [](double x) { return std::exp(x); }, [](double x) { return 3.0 * x; },
             [](double x) { return x + 7.0; }}) {
      ScoredSets t = s;
      for (auto& v : t.pos_scores) v = phi(v);
      for (auto& v : t.neg_scores) v = phi(v);
      EXPECT_NEAR(pos_at_top(t), pos_at_top(s), 1e-12);
      EXPECT_NEAR(auc(t), auc(s), 1e-12);
      EXPECT_NEAR(accuracy(t).accuracy, accuracy(s).accuracy, 1e-12);
      const auto a = roc_curve(s);
      const auto b = roc_curve(t);
      ASSERT_EQ(a.size(), b.size());
      for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].fpr, b[k].fpr);
        EXPECT_EQ(a[k].tpr, b[k].tpr);
      }
    }
  }
}

TEST(Evaluate, ReportFields) {
  const auto r = evaluate(sets({3, 1}, {2, 0}));
  EXPECT_EQ(r.pos_at_top, 0.5);
  EXPECT_EQ(r.accuracy, 0.75);
  EXPECT_EQ(r.auc, 0.75);
  EXPECT_EQ(r.threshold_accuracy, 0.5);
  EXPECT_EQ(r.far_at_accuracy, 0.5);
  EXPECT_EQ(r.frr_at_accuracy, 0.0);
  EXPECT_EQ(r.threshold_eer, 1.5);
  EXPECT_EQ(r.far, 0.5);
  EXPECT_EQ(r.frr, 0.5);
}

}  // namespace
}  // namespace toprank::metrics
