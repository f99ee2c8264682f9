#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "toprank/cli.hpp"
#include "toprank/feature_io.hpp"
#include "toprank/synth.hpp"

namespace toprank::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    unsetenv("TRP_SEED");
    dir = fs::temp_directory_path() / ("toprank_cli_" + std::string(
        ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    features = (dir / "features.csv").string();
    ASSERT_EQ(invoke({"synth", "--out", features, "--writers", "10", "--dim", "6", "--seed", "3"}).code,
              kOk);
  }
  void TearDown() override { unsetenv("TRP_SEED"); }

  std::vector<std::string> small_train(const std::string& out_path,
                                       const std::string& lr = "1e-3") const {
    return {"train", "--features", features, "--out", out_path, "--hidden", "8,4", "--lr", lr,
            "--epochs", "5", "--patience", "5", "--p", "4", "--seed", "2"};
  }

  fs::path dir;
  std::string features;
};

TEST_F(CliTest, PairsCountsForOneWriter) {
  std::vector<SignatureFeature> feats;
  for (std::uint32_t k = 0; k < 54; ++k) {
    feats.push_back({7, k, k < 24 ? Authenticity::genuine : Authenticity::forged, {0.1 * k, 1.0}});
  }
  const auto path = dir / "one.bin";
  io::save_features(path, feats, io::FeatureFormat::binary);
  const auto r = invoke({"pairs", "--features", path.string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(r.out, "writer_id,positives,negatives\n7,276,720\ntotal,276,720\n");
}

TEST_F(CliTest, UnknownFlagIsUsageError) {
  const auto r = invoke({"pairs", "--features", features, "--bogus"});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("--bogus"), std::string::npos);
  EXPECT_EQ(invoke({}).code, kUsage);
  EXPECT_EQ(invoke({"frobnicate"}).code, kUsage);
}

TEST_F(CliTest, BadConfigValueIsUsageError) {
  auto args = small_train((dir / "m.trpc").string());
  args.insert(args.end(), {"--patience", "50"});
  EXPECT_EQ(invoke(args).code, kUsage);
  EXPECT_EQ(invoke({"train", "--features", features, "--out", "x", "--split", "8:1"}).code, kUsage);
}

TEST_F(CliTest, MissingFileIsDataError) {
  EXPECT_EQ(invoke({"pairs", "--features", (dir / "absent.csv").string()}).code, kDataError);
  std::ofstream(dir / "broken.csv") << "writer_id,signature_id,authenticity,f0\n1,0,genuine\n";
  EXPECT_EQ(invoke({"pairs", "--features", (dir / "broken.csv").string()}).code, kDataError);
}

TEST_F(CliTest, ZeroLearningRateKeepsLossConstant) {
  auto args = small_train((dir / "m.trpc").string(), "0");
  args.insert(args.end(), {"--history", (dir / "hist.tsv").string()});
  const auto r = invoke(args);
  ASSERT_EQ(r.code, kOk) << r.err;
  std::ifstream in(dir / "hist.tsv");
  std::stringstream text;
  text << in.rdbuf();
  const auto rows = lines_of(text.str());
  ASSERT_GE(rows.size(), 3u);
  EXPECT_EQ(rows.front(), "epoch\tloss\tval_pos_at_top\tval_auc");
  std::set<std::string> losses;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto first = rows[k].find('\t');
    losses.insert(rows[k].substr(first + 1, rows[k].find('\t', first + 1) - first - 1));
  }
  EXPECT_EQ(losses.size(), 1u);
}

TEST_F(CliTest, TrainThenEval) {
  const auto model = (dir / "m.trpc").string();
  const auto t = invoke(small_train(model));
  ASSERT_EQ(t.code, kOk) << t.err;
  EXPECT_EQ(lines_of(t.out).front(), "epoch\tloss\tval_pos_at_top\tval_auc");
  EXPECT_NE(t.err.find("test pos@top"), std::string::npos);

  const auto e = invoke({"eval", "--model", model, "--features", features, "--subset", "test"});
  ASSERT_EQ(e.code, kOk) << e.err;
  const auto rows = lines_of(e.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0],
            "pos@top,accuracy,auc,far,frr,threshold_accuracy,threshold_eer,far_at_accuracy,"
            "frr_at_accuracy");
  EXPECT_EQ(std::count(rows[1].begin(), rows[1].end(), ','), 8);
  EXPECT_EQ(rows[1].find('.'), 1u);
  EXPECT_EQ(rows[1][5], ',');  // three decimals by default

  const auto again = invoke({"eval", "--model", model, "--features", features, "--subset", "test",
                             "--no-header", "--precision", "5"});
  ASSERT_EQ(again.code, kOk);
  EXPECT_EQ(lines_of(again.out).size(), 1u);
  EXPECT_EQ(again.out[7], ',');
}

TEST_F(CliTest, TrainingIsDeterministic) {
  const auto a = (dir / "a.trpc").string();
  const auto b = (dir / "b.trpc").string();
  const auto ra = invoke(small_train(a));
  const auto rb = invoke(small_train(b));
  ASSERT_EQ(ra.code, kOk);
  ASSERT_EQ(rb.code, kOk);
  EXPECT_EQ(ra.out, rb.out);
  EXPECT_EQ(io::read_file(a), io::read_file(b));
}

TEST_F(CliTest, SeedEnvironmentOverridesFlag) {
  const auto a = (dir / "a.csv").string();
  const auto b = (dir / "b.csv").string();
  const auto c = (dir / "c.csv").string();
  ASSERT_EQ(invoke({"synth", "--out", a, "--seed", "11"}).code, kOk);
  setenv("TRP_SEED", "11", 1);
  ASSERT_EQ(invoke({"synth", "--out", b, "--seed", "99"}).code, kOk);
  setenv("TRP_SEED", "not-a-number", 1);
  EXPECT_EQ(invoke({"synth", "--out", c}).code, kUsage);
  unsetenv("TRP_SEED");
  ASSERT_EQ(invoke({"synth", "--out", c, "--seed", "99"}).code, kOk);
  EXPECT_EQ(io::read_file(a), io::read_file(b));
  EXPECT_NE(io::read_file(a), io::read_file(c));
}

TEST_F(CliTest, DivergenceExitCode) {
  auto args = small_train((dir / "m.trpc").string(), "1e300");
  args.insert(args.end(), {"--optimizer", "sgd", "--clip", "0"});
  const auto r = invoke(args);
  EXPECT_EQ(r.code, kDiverged) << r.err;
  EXPECT_FALSE(fs::exists(dir / "m.trpc"));
}

TEST_F(CliTest, ConfigFile) {
  std::ofstream(dir / "train.ini") << "hidden=8,4\nlr=1e-3\nepochs=3\npatience=3\np=4\npos-batch=16\n";
  const auto r = invoke({"train", "--features", features, "--out", (dir / "m.trpc").string(),
                         "--config", (dir / "train.ini").string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(lines_of(r.out).size(), 4u);

  // Command-line flags win over the file.
  const auto flag = invoke({"train", "--features", features, "--out", (dir / "m.trpc").string(),
                            "--config", (dir / "train.ini").string(), "--epochs", "2",
                            "--patience", "2"});
  ASSERT_EQ(flag.code, kOk) << flag.err;
  EXPECT_EQ(lines_of(flag.out).size(), 3u);

  std::ofstream(dir / "bad.ini") << "hidden=8\nlearning_rate=0.1\n";
  EXPECT_EQ(invoke({"train", "--features", features, "--out", (dir / "m.trpc").string(),
                    "--config", (dir / "bad.ini").string()})
                .code,
            kUsage);
}

TEST_F(CliTest, SweepPicksACandidate) {
  const auto r = invoke({"sweep-p", "--features", features, "--hidden", "8", "--lr", "1e-3",
                         "--epochs", "3", "--patience", "3", "--candidates", "4,2", "--sequential"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto rows = lines_of(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], "p,best_epoch,val_pos_at_top,val_auc");
  EXPECT_EQ(rows[1].substr(0, 2), "2,");
  EXPECT_EQ(rows[3].substr(0, 7), "best_p=");
}

TEST_F(CliTest, PlotsWritesThreeFiles) {
  const auto model = (dir / "m.trpc").string();
  ASSERT_EQ(invoke(small_train(model)).code, kOk);
  const auto out_dir = (dir / "plots").string();
  const auto r = invoke({"plots", "--model", model, "--features", features, "--out-dir", out_dir,
                         "--bins", "20"});
  ASSERT_EQ(r.code, kOk) << r.err;
  for (const char* name : {"roc.csv", "hist.csv", "pca.csv"}) {
    EXPECT_TRUE(fs::exists(fs::path(out_dir) / name)) << name;
  }
}

TEST_F(CliTest, BinaryExecutableRuns) {
  const std::string cmd = std::string("\"") + TOPRANK_CLI_PATH + "\" pairs --features \"" +
                          features + "\" > \"" + (dir / "out.txt").string() + "\"";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  const auto text = io::read_file(dir / "out.txt");
  EXPECT_NE(text.find("total,150,360"), std::string::npos);
  const std::string bad = std::string("\"") + TOPRANK_CLI_PATH + "\" pairs --nope 2>/dev/null";
  const int status = std::system(bad.c_str());
  EXPECT_EQ(WEXITSTATUS(status), kUsage);
}

}  // namespace
}  // namespace toprank::cli
