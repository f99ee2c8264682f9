#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "toprank/errors.hpp"
#include "toprank/pca.hpp"
#include "toprank/plots.hpp"
#include "toprank/synth.hpp"

namespace toprank {
namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(rows, cols);
  for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = normal(rng);
  return x;
}

TEST(Histogram, SeparatedSetsNeverShareABin) {
  ScoredSets sets{{5.0, 5.5, 6.0, 7.0}, {-3.0, -2.0, -2.5}};
  const auto bins = io::score_histogram(sets, 50);
  ASSERT_EQ(bins.size(), 50u);
  std::size_t pos = 0, neg = 0;
  for (const auto& b : bins) {
    EXPECT_FALSE(b.pos_count > 0 && b.neg_count > 0);
    pos += b.pos_count;
    neg += b.neg_count;
  }
  EXPECT_EQ(pos, 4u);
  EXPECT_EQ(neg, 3u);
  EXPECT_EQ(bins.front().lo, 0.0);
  EXPECT_EQ(bins.back().hi, 1.0);
  EXPECT_EQ(bins.back().pos_count, 1u);
  EXPECT_EQ(bins.front().neg_count, 1u);
}

TEST(Histogram, CountsSumForRandomSets) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    ScoredSets sets;
    for (int k = 0; k < 37; ++k) sets.pos_scores.push_back(normal(rng));
    for (int k = 0; k < 53; ++k) sets.neg_scores.push_back(normal(rng));
    std::size_t pos = 0, neg = 0;
    for (const auto& b : io::score_histogram(sets, 13)) {
      pos += b.pos_count;
      neg += b.neg_count;
    }
    EXPECT_EQ(pos, 37u);
    EXPECT_EQ(neg, 53u);
  }
}

TEST(Histogram, ConstantScoresLandInFirstBin) {
  const auto bins = io::score_histogram({{2.0, 2.0}, {2.0}}, 4);
  EXPECT_EQ(bins.front().pos_count, 2u);
  EXPECT_EQ(bins.front().neg_count, 1u);
  EXPECT_THROW(io::score_histogram({{1.0}, {0.0}}, 0), InvalidArgument);
}

TEST(Pca, RankTwoDataIsFullyExplained) {
  const Eigen::MatrixXd coeffs = random_matrix(300, 2, 5);
  const Eigen::MatrixXd basis = random_matrix(2, 10, 6);
  const Eigen::MatrixXd data = (coeffs * basis).rowwise() + Eigen::RowVectorXd::Constant(10, 4.0);
  const auto result = pca::principal_components(data, 2);
  EXPECT_GE(result.explained_fraction(), 0.99999);
  const auto proj = pca::project(result, data);
  EXPECT_EQ(proj.rows(), 300);
  EXPECT_EQ(proj.cols(), 2);
  EXPECT_NEAR(result.components.col(0).norm(), 1.0, 1e-9);
  EXPECT_NEAR(result.components.col(0).dot(result.components.col(1)), 0.0, 1e-6);
}

TEST(Pca, TopEigenvalueMatchesDenseSolver) {
  const Eigen::MatrixXd data = random_matrix(200, 8, 7) * random_matrix(8, 8, 8);
  const auto result = pca::principal_components(data, 2, 1e-12, 10000);
  const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / 200.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const auto& values = solver.eigenvalues();
  EXPECT_NEAR(result.eigenvalues(0), values(7), 1e-6 * values(7));
  EXPECT_NEAR(result.eigenvalues(1), values(6), 1e-6 * values(7));
  EXPECT_NEAR(result.total_variance, cov.trace(), 1e-9 * cov.trace());
  EXPECT_NEAR(std::abs(result.components.col(0).dot(solver.eigenvectors().col(7))), 1.0, 1e-6);
}

TEST(Pca, PowerIterationOnDiagonal) {
  Eigen::MatrixXd m = Eigen::Vector3d(1.0, 9.0, 4.0).asDiagonal();
  const auto pair = pca::power_iteration(m);
  EXPECT_TRUE(pair.converged);
  EXPECT_NEAR(pair.value, 9.0, 1e-9);
  EXPECT_NEAR(std::abs(pair.vector(1)), 1.0, 1e-9);
}

TEST(Pca, RejectsBadInput) {
  EXPECT_THROW(pca::principal_components(Eigen::MatrixXd(0, 3)), InvalidArgument);
  EXPECT_THROW(pca::power_iteration(Eigen::MatrixXd::Zero(2, 3)), InvalidArgument);
}

class Emitters : public ::testing::Test {
 protected:
  void SetUp() override {
    io::SynthSpec spec;
    spec.writers = 3;
    spec.genuine_per_writer = 3;
    spec.forged_per_writer = 3;
    spec.dim = 4;
    dataset = pairing::build_dataset(io::synth_generate(spec));
    network = model::init_network(dataset.dim, 1, {6, 5});
    dir = std::filesystem::temp_directory_path() / "toprank_plot_tests";
    std::filesystem::create_directories(dir);
  }

  static std::vector<std::string> lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
  }

  PairedDataset dataset;
  ScorerNetwork network;
  std::filesystem::path dir;
};

TEST_F(Emitters, RocFile) {
  io::emit_roc(network, dataset, dir / "roc.csv");
  const auto rows = lines(dir / "roc.csv");
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows.front(), "threshold,fpr,tpr");
  const auto curve = metrics::roc_curve(io::score_dataset(network, dataset));
  EXPECT_EQ(rows.size(), curve.size() + 1);
  EXPECT_EQ(rows.back().substr(rows.back().find(',')), ",1,1");
}

TEST_F(Emitters, HistogramFile) {
  io::emit_histogram(network, dataset, dir / "hist.csv", 10);
  const auto rows = lines(dir / "hist.csv");
  ASSERT_EQ(rows.size(), 11u);
  EXPECT_EQ(rows.front(), "bin_lo,bin_hi,pos_count,neg_count");
}

TEST_F(Emitters, PcaFile) {
  io::emit_pca(network, dataset, dir / "pca.csv");
  const auto rows = lines(dir / "pca.csv");
  ASSERT_EQ(rows.size(), dataset.positives.size() + dataset.negatives.size() + 1);
  EXPECT_EQ(rows.front(), "pc1,pc2,polarity,score");
  const auto pca = io::pca_rows(network, dataset);
  EXPECT_EQ(pca.front().polarity, Polarity::positive);
  EXPECT_EQ(pca.back().polarity, Polarity::negative);
  for (const auto& r : pca) {
    EXPECT_GE(r.score, 0.0);
    EXPECT_LE(r.score, 1.0);
  }
}

TEST_F(Emitters, Deterministic) {
  EXPECT_EQ(io::pca_csv(io::pca_rows(network, dataset)), io::pca_csv(io::pca_rows(network, dataset)));
  EXPECT_EQ(io::roc_csv(io::score_dataset(network, dataset)),
            io::roc_csv(io::score_dataset(network, dataset)));
}

TEST(ReportCsv, RowFormat) {
  EvalReport r;
  r.pos_at_top = 1.0;
  r.accuracy = 0.75;
  r.auc = 0.8125;
  EXPECT_EQ(io::report_csv_header(),
            "pos@top,accuracy,auc,far,frr,threshold_accuracy,threshold_eer,far_at_accuracy,"
            "frr_at_accuracy");
  EXPECT_EQ(io::report_csv_row(r).substr(0, 17), "1.000,0.750,0.812");
}

}  // namespace
}  // namespace toprank
