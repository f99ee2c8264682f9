#include "toprank/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <tuple>

#include "toprank/errors.hpp"

namespace toprank::pairing {
namespace {

std::vector<double> concat(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::map<std::uint32_t, std::vector<SignatureFeature>> group_by_writer(
    const std::vector<SignatureFeature>& features) {
  std::map<std::uint32_t, std::vector<SignatureFeature>> groups;
  std::set<std::tuple<std::uint32_t, std::uint32_t, Authenticity>> seen;
  const std::size_t d = features.empty() ? 0 : features.front().values.size();
  for (const auto& f : features) {
    if (f.values.size() != d) {
      throw InvalidArgument("feature dimension mismatch for writer " +
                            std::to_string(f.writer_id) + ", signature " +
                            std::to_string(f.signature_id));
    }
    if (!seen.emplace(f.writer_id, f.signature_id, f.authenticity).second) {
      throw InvalidArgument("duplicate signature " + std::to_string(f.signature_id) +
                            " for writer " + std::to_string(f.writer_id));
    }
    groups[f.writer_id].push_back(f);
  }
  return groups;
}

}  // namespace

std::vector<PairedSample> build_writer_pairs(
    const std::vector<SignatureFeature>& features_of_one_writer) {
  if (features_of_one_writer.empty()) {
    throw InvalidArgument("build_writer_pairs: no signatures");
  }
  const std::uint32_t writer = features_of_one_writer.front().writer_id;
  const std::size_t d = features_of_one_writer.front().values.size();
  std::vector<const SignatureFeature*> genuine;
  std::vector<const SignatureFeature*> forged;
  for (const auto& f : features_of_one_writer) {
    if (f.writer_id != writer) {
      throw InvalidArgument("build_writer_pairs: mixed writer ids " +
                            std::to_string(writer) + " and " + std::to_string(f.writer_id));
    }
    if (f.values.size() != d) {
      throw InvalidArgument("build_writer_pairs: inconsistent feature dimension");
    }
    (f.authenticity == Authenticity::genuine ? genuine : forged).push_back(&f);
  }
  if (genuine.size() < 2) {
    throw InvalidArgument("build_writer_pairs: writer " + std::to_string(writer) +
                          " has fewer than 2 genuine signatures (no positive pairs)");
  }
  const auto by_id = [](const SignatureFeature* a, const SignatureFeature* b) {
    return a->signature_id < b->signature_id;
  };
  std::sort(genuine.begin(), genuine.end(), by_id);
  std::sort(forged.begin(), forged.end(), by_id);

  std::vector<PairedSample> out;
  out.reserve(genuine.size() * (genuine.size() - 1) / 2 + genuine.size() * forged.size());
  for (std::size_t a = 0; a < genuine.size(); ++a) {
    for (std::size_t b = a + 1; b < genuine.size(); ++b) {
      out.push_back({writer, genuine[a]->signature_id, genuine[b]->signature_id,
                     Polarity::positive, concat(genuine[a]->values, genuine[b]->values)});
    }
  }
  for (const auto* ref : genuine) {
    for (const auto* q : forged) {
      out.push_back({writer, ref->signature_id, q->signature_id, Polarity::negative,
                     concat(ref->values, q->values)});
    }
  }
  return out;
}

PairedDataset build_dataset(const std::vector<SignatureFeature>& features) {
  PairedDataset ds;
  ds.dim = features.empty() ? 0 : 2 * features.front().values.size();
  for (const auto& [writer, group] : group_by_writer(features)) {
    ds.writer_ids.insert(writer);
    for (auto& s : build_writer_pairs(group)) {
      (s.polarity == Polarity::positive ? ds.positives : ds.negatives).push_back(std::move(s));
    }
  }
  return ds;
}

std::vector<WriterPairCount> count_pairs(const std::vector<SignatureFeature>& features) {
  std::vector<WriterPairCount> out;
  for (const auto& [writer, group] : group_by_writer(features)) {
    std::size_t g = 0;
    std::size_t f = 0;
    for (const auto& s : group) (s.authenticity == Authenticity::genuine ? g : f) += 1;
    out.push_back({writer, g * (g > 0 ? g - 1 : 0) / 2, g * f});
  }
  return out;
}

std::vector<std::size_t> partition_sizes(std::size_t writers,
                                         const std::vector<double>& ratios) {
  if (ratios.empty()) throw InvalidArgument("split ratios must be nonempty");
  double total = 0.0;
  for (double r : ratios) {
    if (!std::isfinite(r) || r <= 0.0) throw InvalidArgument("split ratios must be positive");
    total += r;
  }
  if (writers < ratios.size()) {
    throw InvalidArgument("cannot split " + std::to_string(writers) + " writers into " +
                          std::to_string(ratios.size()) + " nonempty partitions");
  }
  const std::size_t k = ratios.size();
  std::vector<std::size_t> sizes(k);
  std::vector<double> remainder(k);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double quota = static_cast<double>(writers) * ratios[i] / total;
    sizes[i] = static_cast<std::size_t>(std::floor(quota));
    remainder[i] = quota - std::floor(quota);
    assigned += sizes[i];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < writers; ++i, ++assigned) sizes[order[i % k]] += 1;

  // Every partition keeps at least one writer; take from the largest.
  for (std::size_t i = 0; i < k; ++i) {
    while (sizes[i] == 0) {
      auto largest = std::max_element(sizes.begin(), sizes.end());
      *largest -= 1;
      sizes[i] += 1;
    }
  }
  return sizes;
}

FeatureSplit split_by_writer(const std::vector<SignatureFeature>& features,
                             std::array<double, 3> ratios, std::uint64_t seed) {
  std::vector<std::uint32_t> writers;
  for (const auto& [writer, group] : group_by_writer(features)) writers.push_back(writer);
  const auto sizes = partition_sizes(writers.size(), {ratios.begin(), ratios.end()});

  std::mt19937_64 rng(seed);
  std::shuffle(writers.begin(), writers.end(), rng);

  std::map<std::uint32_t, int> part;
  std::size_t pos = 0;
  for (int k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < sizes[k]; ++i) part[writers[pos++]] = k;
  }
  FeatureSplit out;
  for (const auto& f : features) {
    switch (part.at(f.writer_id)) {
      case 0: out.train.push_back(f); break;
      case 1: out.val.push_back(f); break;
      default: out.test.push_back(f); break;
    }
  }
  return out;
}

NormalizationStats fit_normalization(const PairedDataset& train) {
  const std::size_t count = train.positives.size() + train.negatives.size();
  if (count < 2) throw InvalidArgument("fit_normalization: need at least 2 training pairs");
  const std::size_t dim = train.dim;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  const auto each = [&](auto&& fn) {
    for (const auto& s : train.positives) fn(s.vector);
    for (const auto& s : train.negatives) fn(s.vector);
  };
  each([&](const std::vector<double>& v) {
    if (v.size() != dim) throw InvalidArgument("fit_normalization: vector length != dim");
    mean += Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(dim));
  });
  mean /= static_cast<double>(count);
  Eigen::VectorXd var = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  each([&](const std::vector<double>& v) {
    var += (Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(dim)) - mean)
               .array()
               .square()
               .matrix();
  });
  var /= static_cast<double>(count);
  return {mean, var.array().sqrt().max(kStddevFloor).matrix()};
}

PairedDataset apply_normalization(const PairedDataset& dataset,
                                  const NormalizationStats& stats) {
  if (static_cast<std::size_t>(stats.mean.size()) != dataset.dim ||
      stats.stddev.size() != stats.mean.size()) {
    throw InvalidArgument("apply_normalization: stats dimension " +
                          std::to_string(stats.mean.size()) + " != dataset dimension " +
                          std::to_string(dataset.dim));
  }
  PairedDataset out = dataset;
  const auto transform = [&](std::vector<PairedSample>& samples) {
    for (auto& s : samples) {
      if (s.vector.size() != dataset.dim) {
        throw InvalidArgument("apply_normalization: vector length != dim");
      }
      for (std::size_t k = 0; k < s.vector.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        s.vector[k] = (s.vector[k] - stats.mean[i]) / stats.stddev[i];
      }
    }
  };
  transform(out.positives);
  transform(out.negatives);
  return out;
}

Eigen::MatrixXd to_matrix(const std::vector<PairedSample>& samples) {
  if (samples.empty()) return {};
  const auto dim = static_cast<Eigen::Index>(samples.front().vector.size());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(samples.size()), dim);
  for (std::size_t r = 0; r < samples.size(); ++r) {
    if (static_cast<Eigen::Index>(samples[r].vector.size()) != dim) {
      throw InvalidArgument("to_matrix: inconsistent vector lengths");
    }
    out.row(static_cast<Eigen::Index>(r)) =
        Eigen::Map<const Eigen::RowVectorXd>(samples[r].vector.data(), dim);
  }
  return out;
}

}  // namespace toprank::pairing
