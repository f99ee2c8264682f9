#pragma once

// Feature files.
//
// Text: header "writer_id,signature_id,authenticity,f0,...,f{d-1}" followed by
// one row per signature. Authenticity is written as "genuine"/"forged"; 0/1
// are accepted on input.
//
// Binary (all integers little-endian):
//   "TRPF" | u32 version | u32 record count | u32 dim
//   record: u32 writer_id | u32 signature_id | u8 authenticity (0 genuine,
//           1 forged) | dim x f32 (little-endian IEEE-754)

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "toprank/pairing.hpp"

namespace toprank::io {

enum class FeatureFormat { auto_detect, csv, binary };

FeatureFormat feature_format_from_string(const std::string& name);

inline constexpr std::uint32_t kFeatureFormatVersion = 1;

struct FeatureTable {
  std::vector<SignatureFeature> features;
  std::size_t dim = 0;
};

FeatureTable parse_features(std::string_view bytes, FeatureFormat format = FeatureFormat::auto_detect);
std::string serialize_features(const std::vector<SignatureFeature>& features, FeatureFormat format);

FeatureTable read_features(const std::filesystem::path& path,
                           FeatureFormat format = FeatureFormat::auto_detect);
std::vector<SignatureFeature> load_features(const std::filesystem::path& path,
                                            FeatureFormat format = FeatureFormat::auto_detect);
void save_features(const std::filesystem::path& path,
                   const std::vector<SignatureFeature>& features, FeatureFormat format);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace toprank::io
