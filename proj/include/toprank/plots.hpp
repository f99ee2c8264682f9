#pragma once

// CSV data behind the ROC, score-histogram and PCA figures. Numbers are
// written with 17 significant digits so identical inputs give identical files.

#include <filesystem>
#include <string>
#include <vector>

#include "toprank/metrics.hpp"
#include "toprank/model.hpp"
#include "toprank/pairing.hpp"

namespace toprank::io {

inline constexpr std::size_t kDefaultHistogramBins = 50;

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t pos_count = 0;
  std::size_t neg_count = 0;
};

/// Scores are min-max normalized to [0,1] over both sets (all zero when every
/// score is equal), then counted in equal-width bins.
std::vector<HistogramBin> score_histogram(const ScoredSets& sets,
                                          std::size_t bins = kDefaultHistogramBins);

struct PcaRow {
  double pc1 = 0.0;
  double pc2 = 0.0;
  Polarity polarity = Polarity::positive;
  double score = 0.0;  // min-max normalized to [0,1]
};

/// Projects penultimate-layer activations onto their top two principal
/// components. Positives come first, then negatives.
std::vector<PcaRow> pca_rows(const ScorerNetwork& network, const PairedDataset& dataset);

ScoredSets score_dataset(const ScorerNetwork& network, const PairedDataset& dataset);

std::string roc_csv(const ScoredSets& sets);
std::string histogram_csv(const std::vector<HistogramBin>& bins);
std::string pca_csv(const std::vector<PcaRow>& rows);
std::string report_csv_header();
std::string report_csv_row(const EvalReport& report, int precision = 3);

void emit_roc(const ScorerNetwork& network, const PairedDataset& dataset,
              const std::filesystem::path& out_path);
void emit_histogram(const ScorerNetwork& network, const PairedDataset& dataset,
                    const std::filesystem::path& out_path,
                    std::size_t bins = kDefaultHistogramBins);
void emit_pca(const ScorerNetwork& network, const PairedDataset& dataset,
              const std::filesystem::path& out_path);

}  // namespace toprank::io
