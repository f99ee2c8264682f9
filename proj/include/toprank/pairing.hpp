#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <vector>

#include <Eigen/Dense>

namespace toprank {

enum class Authenticity : std::uint8_t { genuine = 0, forged = 1 };
enum class Polarity : std::uint8_t { positive, negative };

/// One signature's embedding with its writer and authenticity.
struct SignatureFeature {
  std::uint32_t writer_id = 0;
  std::uint32_t signature_id = 0;
  Authenticity authenticity = Authenticity::genuine;
  std::vector<double> values;
};

/// reference.values followed by query.values. The reference is always genuine;
/// polarity is positive iff the query is genuine too.
struct PairedSample {
  std::uint32_t writer_id = 0;
  std::uint32_t reference_id = 0;
  std::uint32_t query_id = 0;
  Polarity polarity = Polarity::positive;
  std::vector<double> vector;
};

struct PairedDataset {
  std::vector<PairedSample> positives;
  std::vector<PairedSample> negatives;
  std::size_t dim = 0;
  std::set<std::uint32_t> writer_ids;

  std::size_t num_positives() const { return positives.size(); }
  std::size_t num_negatives() const { return negatives.size(); }
};

struct NormalizationStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
};

struct FeatureSplit {
  std::vector<SignatureFeature> train;
  std::vector<SignatureFeature> val;
  std::vector<SignatureFeature> test;
};

struct WriterPairCount {
  std::uint32_t writer_id = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

namespace pairing {

inline constexpr double kStddevFloor = 1e-8;

/// Positives: one per unordered genuine pair, reference = lower signature_id.
/// Negatives: one per (genuine reference, forged query).
std::vector<PairedSample> build_writer_pairs(
    const std::vector<SignatureFeature>& features_of_one_writer);

/// Groups by writer and pairs each group; the result spans all writers.
PairedDataset build_dataset(const std::vector<SignatureFeature>& features);

std::vector<WriterPairCount> count_pairs(
    const std::vector<SignatureFeature>& features);

/// Number of writers per partition, largest-remainder rounding with at least
/// one writer per partition.
std::vector<std::size_t> partition_sizes(std::size_t writers,
                                         const std::vector<double>& ratios);

/// Writer-disjoint split. Writers are ordered by id and permuted with `seed`.
FeatureSplit split_by_writer(const std::vector<SignatureFeature>& features,
                             std::array<double, 3> ratios, std::uint64_t seed);

NormalizationStats fit_normalization(const PairedDataset& train);

PairedDataset apply_normalization(const PairedDataset& dataset,
                                  const NormalizationStats& stats);

/// Stacks the vectors row-wise.
Eigen::MatrixXd to_matrix(const std::vector<PairedSample>& samples);

}  // namespace pairing
}  // namespace toprank
