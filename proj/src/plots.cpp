#include "toprank/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "toprank/errors.hpp"
#include "toprank/feature_io.hpp"
#include "toprank/pca.hpp"

namespace toprank::io {
namespace {

std::string num(double v, int digits = 17) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

void require_model(const ScorerNetwork& network) {
  if (network.empty()) throw InvalidState("no trained model loaded");
}

struct MinMax {
  double lo;
  double span;

  double operator()(double v) const { return span > 0.0 ? (v - lo) / span : 0.0; }
};

MinMax min_max(const ScoredSets& sets) {
  double lo = sets.pos_scores.front();
  double hi = lo;
  for (const auto* list : {&sets.pos_scores, &sets.neg_scores}) {
    for (double v : *list) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return {lo, hi - lo};
}

}  // namespace

ScoredSets score_dataset(const ScorerNetwork& network, const PairedDataset& dataset) {
  require_model(network);
  if (dataset.positives.empty() || dataset.negatives.empty()) {
    throw InvalidArgument("dataset needs at least one positive and one negative pair");
  }
  return {model::score_all(network, pairing::to_matrix(dataset.positives)),
          model::score_all(network, pairing::to_matrix(dataset.negatives))};
}

std::vector<HistogramBin> score_histogram(const ScoredSets& sets, std::size_t bins) {
  if (bins < 1) throw InvalidArgument("histogram needs at least one bin");
  if (sets.pos_scores.empty() || sets.neg_scores.empty()) {
    throw InvalidArgument("histogram: score sets must be nonempty");
  }
  const MinMax norm = min_max(sets);
  std::vector<HistogramBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lo = static_cast<double>(b) / static_cast<double>(bins);
    out[b].hi = static_cast<double>(b + 1) / static_cast<double>(bins);
  }
  const auto bin_of = [&](double v) {
    const auto b = static_cast<std::size_t>(std::floor(norm(v) * static_cast<double>(bins)));
    return std::min(b, bins - 1);
  };
  for (double v : sets.pos_scores) ++out[bin_of(v)].pos_count;
  for (double v : sets.neg_scores) ++out[bin_of(v)].neg_count;
  return out;
}

std::vector<PcaRow> pca_rows(const ScorerNetwork& network, const PairedDataset& dataset) {
  const auto sets = score_dataset(network, dataset);
  Eigen::MatrixXd inputs(static_cast<Eigen::Index>(dataset.positives.size() +
                                                   dataset.negatives.size()),
                         static_cast<Eigen::Index>(dataset.dim));
  inputs << pairing::to_matrix(dataset.positives), pairing::to_matrix(dataset.negatives);
  const Eigen::MatrixXd hidden = model::penultimate_activations(network, inputs);
  const auto pca = pca::principal_components(hidden, 2);
  const Eigen::MatrixXd proj = pca::project(pca, hidden);
  const MinMax norm = min_max(sets);

  std::vector<PcaRow> rows;
  rows.reserve(static_cast<std::size_t>(proj.rows()));
  const std::size_t m = sets.pos_scores.size();
  for (Eigen::Index r = 0; r < proj.rows(); ++r) {
    const auto k = static_cast<std::size_t>(r);
    const bool positive = k < m;
    rows.push_back({proj(r, 0), proj(r, 1), positive ? Polarity::positive : Polarity::negative,
                    norm(positive ? sets.pos_scores[k] : sets.neg_scores[k - m])});
  }
  return rows;
}

std::string roc_csv(const ScoredSets& sets) {
  std::ostringstream out;
  out << "threshold,fpr,tpr\n";
  for (const auto& p : metrics::roc_curve(sets)) {
    out << num(p.threshold) << ',' << num(p.fpr) << ',' << num(p.tpr) << '\n';
  }
  return out.str();
}

std::string histogram_csv(const std::vector<HistogramBin>& bins) {
  std::ostringstream out;
  out << "bin_lo,bin_hi,pos_count,neg_count\n";
  for (const auto& b : bins) {
    out << num(b.lo) << ',' << num(b.hi) << ',' << b.pos_count << ',' << b.neg_count << '\n';
  }
  return out.str();
}

std::string pca_csv(const std::vector<PcaRow>& rows) {
  std::ostringstream out;
  out << "pc1,pc2,polarity,score\n";
  for (const auto& r : rows) {
    out << num(r.pc1) << ',' << num(r.pc2) << ','
        << (r.polarity == Polarity::positive ? "positive" : "negative") << ',' << num(r.score)
        << '\n';
  }
  return out.str();
}

std::string report_csv_header() {
  return "pos@top,accuracy,auc,far,frr,threshold_accuracy,threshold_eer,far_at_accuracy,"
         "frr_at_accuracy";
}

std::string report_csv_row(const EvalReport& r, int precision) {
  char buf[64];
  const auto fixed = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return std::string(buf);
  };
  std::ostringstream out;
  out << fixed(r.pos_at_top) << ',' << fixed(r.accuracy) << ',' << fixed(r.auc) << ','
      << fixed(r.far) << ',' << fixed(r.frr) << ',' << num(r.threshold_accuracy, 9) << ','
      << num(r.threshold_eer, 9) << ',' << fixed(r.far_at_accuracy) << ','
      << fixed(r.frr_at_accuracy);
  return out.str();
}

void emit_roc(const ScorerNetwork& network, const PairedDataset& dataset,
              const std::filesystem::path& out_path) {
  write_file_atomic(out_path, roc_csv(score_dataset(network, dataset)));
}

void emit_histogram(const ScorerNetwork& network, const PairedDataset& dataset,
                    const std::filesystem::path& out_path, std::size_t bins) {
  write_file_atomic(out_path, histogram_csv(score_histogram(score_dataset(network, dataset), bins)));
}

void emit_pca(const ScorerNetwork& network, const PairedDataset& dataset,
              const std::filesystem::path& out_path) {
  write_file_atomic(out_path, pca_csv(pca_rows(network, dataset)));
}

}  // namespace toprank::io
