#include "toprank/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "toprank/checkpoint.hpp"
#include "toprank/errors.hpp"
#include "toprank/feature_io.hpp"
#include "toprank/metrics.hpp"
#include "toprank/pairing.hpp"
#include "toprank/plots.hpp"
#include "toprank/synth.hpp"
#include "toprank/training.hpp"

namespace toprank::cli {
namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

std::array<double, 3> parse_split(const std::string& text) {
  const auto parts = split_list(text, ':');
  if (parts.size() != 3) throw UsageError("--split expects three ratios like 8:1:1");
  std::array<double, 3> out{};
  for (std::size_t k = 0; k < 3; ++k) {
    try {
      out[k] = std::stod(parts[k]);
    } catch (const std::exception&) {
      throw UsageError("--split: invalid ratio '" + parts[k] + "'");
    }
    if (!(out[k] > 0.0)) throw UsageError("--split ratios must be positive");
  }
  return out;
}

std::vector<std::size_t> parse_hidden(const std::string& text) {
  std::vector<std::size_t> out;
  if (text.empty() || text == "none") return out;
  for (const auto& part : split_list(text, ',')) {
    try {
      const long v = std::stol(part);
      if (v < 1) throw UsageError("--hidden sizes must be >= 1");
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw UsageError("--hidden: invalid layer size '" + part + "'");
    }
  }
  return out;
}

std::vector<double> parse_candidates(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split_list(text, ',')) {
    try {
      out.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw UsageError("--candidates: invalid value '" + part + "'");
    }
  }
  if (out.empty()) throw UsageError("--candidates must list at least one p");
  return out;
}

// Options shared by every subcommand that reads features.
struct DataOptions {
  std::string features;
  std::string format = "auto";
  std::string split = "8:1:1";
  std::uint64_t seed = 0;

  void add(CLI::App* app, bool with_split) {
    app->add_option("--features", features, "Feature file (csv or TRPF binary)")
        ->required();
    app->add_option("--format", format, "Feature file format")
        ->check(CLI::IsMember({"auto", "csv", "binary"}))
        ->capture_default_str();
    if (with_split) {
      app->add_option("--split", split, "Writer split ratios train:val:test")->capture_default_str();
    }
  }

  std::vector<SignatureFeature> load() const {
    return io::load_features(features, io::feature_format_from_string(format));
  }
};

struct TrainOptions {
  TrainConfig config;
  std::string optimizer = "adam";
  std::string hidden = "2048,1024,512,128";
  std::string history;
  std::string config_path;

  void add(CLI::App* app) {
    app->add_option("--config", config_path, "Flat key=value file; keys are long flag names");
    app->add_option("--p", config.p, "Top-rank loss exponent p >= 1")->capture_default_str();
    app->add_option("--lr", config.learning_rate, "Learning rate")->capture_default_str();
    app->add_option("--pos-batch", config.pos_batch, "Positives per minibatch")->capture_default_str();
    app->add_option("--neg-batch", config.neg_batch, "Negatives per minibatch")->capture_default_str();
    app->add_option("--epochs", config.max_epochs, "Maximum epochs")->capture_default_str();
    app->add_option("--patience", config.patience, "Early-stopping patience in epochs")
        ->capture_default_str();
    app->add_option("--optimizer", optimizer, "sgd, momentum or adam")
        ->check(CLI::IsMember({"sgd", "momentum", "adam"}))
        ->capture_default_str();
    app->add_option("--beta1", config.beta1, "First-moment / momentum coefficient")
        ->capture_default_str();
    app->add_option("--beta2", config.beta2, "Second-moment coefficient")->capture_default_str();
    app->add_option("--epsilon", config.epsilon, "Adaptive-moment denominator offset")
        ->capture_default_str();
    app->add_option("--clip", config.clip_norm, "Global gradient-norm cap (<= 0 disables)")
        ->capture_default_str();
    app->add_option("--hidden", hidden, "Hidden layer sizes, comma separated, or 'none'")
        ->capture_default_str();
    app->add_option("--history", history, "Write per-epoch history here instead of stdout");
  }

  /// Fills options not given on the command line from the config file.
  void apply_config(CLI::App* app) const {
    if (config_path.empty()) return;
    std::istringstream text(io::read_file(config_path));
    std::size_t line_no = 0;
    for (std::string line; std::getline(text, line);) {
      ++line_no;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw UsageError(config_path + ":" + std::to_string(line_no) + ": expected key=value");
      }
      const auto trim = [](std::string v) {
        v.erase(0, v.find_first_not_of(" \t\r"));
        v.erase(v.find_last_not_of(" \t\r") + 1);
        return v;
      };
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      CLI::Option* opt = key == "config" ? nullptr : app->get_option_no_throw("--" + key);
      if (opt == nullptr) {
        throw UsageError(config_path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
      }
      if (opt->count() > 0) continue;
      try {
        opt->add_result(value);
        opt->run_callback();
      } catch (const CLI::Error& e) {
        throw UsageError(config_path + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
  }

  TrainConfig resolve(std::uint64_t seed) const {
    TrainConfig c = config;
    c.seed = seed;
    c.optimizer = optimizer_from_string(optimizer);
    c.hidden = parse_hidden(hidden);
    try {
      c.validate();
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
    return c;
  }
};

std::uint64_t effective_seed(const CLI::App* app, std::uint64_t flag_value,
                             std::uint64_t fallback) {
  if (const char* env = std::getenv("TRP_SEED"); env && *env) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("TRP_SEED is not an unsigned integer: ") + env);
    }
  }
  return app->count("--seed") > 0 ? flag_value : fallback;
}

PairedDataset select_subset(const std::vector<SignatureFeature>& features,
                            const std::string& subset, const std::string& split,
                            std::uint64_t seed) {
  if (subset == "all") return pairing::build_dataset(features);
  const auto parts = pairing::split_by_writer(features, parse_split(split), seed);
  if (subset == "train") return pairing::build_dataset(parts.train);
  if (subset == "val") return pairing::build_dataset(parts.val);
  return pairing::build_dataset(parts.test);
}

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args) {
    CLI::App app{"Top-rank pair learning for writer-independent signature verification",
                 "toprank"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::uint64_t seed = 0;
    const auto add_seed = [&](CLI::App* sub) {
      sub->add_option("--seed", seed, "Random seed (TRP_SEED overrides)")->capture_default_str();
    };

    // synth
    io::SynthSpec synth;
    std::string synth_out;
    std::string synth_format = "csv";
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic feature file");
    synth_cmd->add_option("--out", synth_out, "Output path")->required();
    synth_cmd->add_option("--writers", synth.writers)->capture_default_str();
    synth_cmd->add_option("--genuine", synth.genuine_per_writer)->capture_default_str();
    synth_cmd->add_option("--forged", synth.forged_per_writer)->capture_default_str();
    synth_cmd->add_option("--dim", synth.dim)->capture_default_str();
    synth_cmd->add_option("--separation", synth.separation)->capture_default_str();
    synth_cmd->add_option("--noise", synth.noise)->capture_default_str();
    synth_cmd->add_option("--format", synth_format)
        ->check(CLI::IsMember({"csv", "binary"}))
        ->capture_default_str();
    add_seed(synth_cmd);

    // pairs
    DataOptions pairs_data;
    auto* pairs_cmd = app.add_subcommand("pairs", "Print pair counts per writer");
    pairs_data.add(pairs_cmd, false);

    // train
    DataOptions train_data;
    TrainOptions train_opts;
    std::string train_out;
    auto* train_cmd = app.add_subcommand("train", "Train a scorer and write a checkpoint");
    train_data.add(train_cmd, true);
    train_opts.add(train_cmd);
    train_cmd->add_option("--out", train_out, "Checkpoint path")->required();
    add_seed(train_cmd);

    // sweep-p
    DataOptions sweep_data;
    TrainOptions sweep_opts;
    std::string candidates = "2,4,8,16,32";
    bool sequential = false;
    auto* sweep_cmd = app.add_subcommand("sweep-p", "Select p by validation pos@top");
    sweep_data.add(sweep_cmd, true);
    sweep_opts.add(sweep_cmd);
    sweep_cmd->add_option("--candidates", candidates, "Comma-separated p values")
        ->capture_default_str();
    sweep_cmd->add_flag("--sequential", sequential, "Train candidates one after another");
    add_seed(sweep_cmd);

    // eval
    DataOptions eval_data;
    std::string eval_model;
    std::string eval_subset = "all";
    int precision = 3;
    bool no_header = false;
    auto* eval_cmd = app.add_subcommand("eval", "Print the evaluation report as CSV");
    eval_data.add(eval_cmd, true);
    eval_cmd->add_option("--model", eval_model, "Checkpoint path")->required();
    eval_cmd->add_option("--subset", eval_subset, "Which writers to evaluate")
        ->check(CLI::IsMember({"all", "train", "val", "test"}))
        ->capture_default_str();
    eval_cmd->add_option("--precision", precision, "Decimals for rates")->capture_default_str();
    eval_cmd->add_flag("--no-header", no_header, "Omit the CSV header line");
    add_seed(eval_cmd);

    // plots
    DataOptions plots_data;
    std::string plots_model;
    std::string plots_subset = "all";
    std::string out_dir = ".";
    std::size_t bins = io::kDefaultHistogramBins;
    auto* plots_cmd = app.add_subcommand("plots", "Write roc.csv, hist.csv and pca.csv");
    plots_data.add(plots_cmd, true);
    plots_cmd->add_option("--model", plots_model, "Checkpoint path")->required();
    plots_cmd->add_option("--subset", plots_subset, "Which writers to plot")
        ->check(CLI::IsMember({"all", "train", "val", "test"}))
        ->capture_default_str();
    plots_cmd->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
    plots_cmd->add_option("--bins", bins, "Histogram bins")->capture_default_str()->check(CLI::PositiveNumber);
    add_seed(plots_cmd);

    try {
      std::vector<std::string> reversed(args.rbegin(), args.rend());
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out_ << app.help();
      return kOk;
    } catch (const CLI::CallForAllHelp&) {
      out_ << app.help("", CLI::AppFormatMode::All);
      return kOk;
    } catch (const CLI::ParseError& e) {
      err_ << "error: " << e.what() << "\n\n" << app.help();
      return kUsage;
    }

    try {
      if (synth_cmd->parsed()) {
        synth.seed = effective_seed(synth_cmd, seed, seed);
        const auto features = io::synth_generate(synth);
        io::save_features(synth_out, features, io::feature_format_from_string(synth_format));
        err_ << "wrote " << features.size() << " signatures to " << synth_out << '\n';
      } else if (pairs_cmd->parsed()) {
        std::size_t pos = 0;
        std::size_t neg = 0;
        out_ << "writer_id,positives,negatives\n";
        for (const auto& c : pairing::count_pairs(pairs_data.load())) {
          out_ << c.writer_id << ',' << c.positives << ',' << c.negatives << '\n';
          pos += c.positives;
          neg += c.negatives;
        }
        out_ << "total," << pos << ',' << neg << '\n';
      } else if (train_cmd->parsed()) {
        return run_train(train_cmd, train_data, train_opts, train_out, seed);
      } else if (sweep_cmd->parsed()) {
        return run_sweep(sweep_cmd, sweep_data, sweep_opts, candidates, !sequential, seed);
      } else if (eval_cmd->parsed()) {
        const auto ckpt = io::load_checkpoint(eval_model);
        const auto s = effective_seed(eval_cmd, seed, ckpt.config.seed);
        const auto ds = normalized(eval_data, eval_subset, s, ckpt);
        const auto report = metrics::evaluate(io::score_dataset(ckpt.network, ds));
        if (!no_header) out_ << io::report_csv_header() << '\n';
        out_ << io::report_csv_row(report, precision) << '\n';
      } else if (plots_cmd->parsed()) {
        const auto ckpt = io::load_checkpoint(plots_model);
        const auto s = effective_seed(plots_cmd, seed, ckpt.config.seed);
        const auto ds = normalized(plots_data, plots_subset, s, ckpt);
        fs::create_directories(out_dir);
        io::emit_roc(ckpt.network, ds, fs::path(out_dir) / "roc.csv");
        io::emit_histogram(ckpt.network, ds, fs::path(out_dir) / "hist.csv", bins);
        io::emit_pca(ckpt.network, ds, fs::path(out_dir) / "pca.csv");
        err_ << "wrote roc.csv, hist.csv, pca.csv to " << out_dir << '\n';
      }
    } catch (const UsageError& e) {
      err_ << "error: " << e.what() << '\n';
      return kUsage;
    } catch (const TrainingDiverged& e) {
      err_ << "error: " << e.what() << '\n';
      return kDiverged;
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << '\n';
      return kDataError;
    }
    return kOk;
  }

 private:
  PairedDataset normalized(const DataOptions& data, const std::string& subset,
                           std::uint64_t seed, const io::Checkpoint& ckpt) {
    const auto ds = select_subset(data.load(), subset, data.split, seed);
    return pairing::apply_normalization(ds, ckpt.stats);
  }

  PreparedData prepare(const DataOptions& data, std::uint64_t seed) {
    const auto split = parse_split(data.split);
    const auto features = data.load();
    return training::prepare(pairing::split_by_writer(features, split, seed));
  }

  std::ostream& history_stream(const std::string& path, std::ofstream& file) {
    if (path.empty()) return out_;
    file.open(path, std::ios::trunc);
    if (!file) throw InvalidArgument("cannot open history file '" + path + "'");
    return file;
  }

  int run_train(CLI::App* cmd, const DataOptions& data, const TrainOptions& opts,
                const std::string& out_path, std::uint64_t seed_flag) {
    opts.apply_config(cmd);
    const auto seed = effective_seed(cmd, seed_flag, seed_flag);
    const auto config = opts.resolve(seed);
    const auto prepared = prepare(data, seed);
    std::ofstream file;
    auto& log = history_stream(opts.history, file);
    auto result = training::train(prepared.train, prepared.val, config, &log);

    io::Checkpoint ckpt{std::move(result.network), prepared.stats, config,
                        result.history.best_val_pos_at_top()};
    io::save_checkpoint(out_path, ckpt);
    const auto test = metrics::evaluate(io::score_dataset(ckpt.network, prepared.test));
    err_ << "best epoch " << result.history.epochs[result.history.best_epoch].epoch
         << ", validation pos@top " << ckpt.best_val_pos_at_top << ", test pos@top "
         << test.pos_at_top << ", test auc " << test.auc << "; checkpoint " << out_path << '\n';
    return kOk;
  }

  int run_sweep(CLI::App* cmd, const DataOptions& data, const TrainOptions& opts,
                const std::string& candidates, bool parallel, std::uint64_t seed_flag) {
    opts.apply_config(cmd);
    const auto seed = effective_seed(cmd, seed_flag, seed_flag);
    const auto config = opts.resolve(seed);
    const auto ps = parse_candidates(candidates);
    const auto prepared = prepare(data, seed);
    std::ofstream file;
    std::ostream* log = opts.history.empty() ? nullptr : &history_stream(opts.history, file);
    const auto sweep = training::sweep_p(prepared.train, prepared.val, ps, config, log, parallel);
    out_ << "p,best_epoch,val_pos_at_top,val_auc\n";
    for (std::size_t k = 0; k < sweep.candidates.size(); ++k) {
      const auto& h = sweep.histories[k];
      const auto& best = h.epochs[h.best_epoch];
      out_ << sweep.candidates[k] << ',' << best.epoch << ',' << best.val_pos_at_top << ','
           << best.val_auc << '\n';
    }
    out_ << "best_p=" << sweep.best_p << '\n';
    return kOk;
  }

  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return Cli(out, err).run(args);
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace toprank::cli
