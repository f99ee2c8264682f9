#include "toprank/feature_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "toprank/byte_io.hpp"
#include "toprank/errors.hpp"

namespace toprank::io {
namespace {

constexpr std::string_view kFeatureMagic = "TRPF";

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view field, std::size_t row, const char* what) {
  field = trim(field);
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("row " + std::to_string(row) + ": invalid " + what + " '" +
                         std::string(field) + "'",
                     row);
  }
  return value;
}

Authenticity parse_authenticity(std::string_view field, std::size_t row) {
  field = trim(field);
  if (field == "genuine" || field == "0") return Authenticity::genuine;
  if (field == "forged" || field == "1") return Authenticity::forged;
  throw ParseError("row " + std::to_string(row) + ": invalid authenticity '" +
                       std::string(field) + "'",
                   row);
}

FeatureTable parse_csv(std::string_view text) {
  FeatureTable table;
  std::size_t row = 0;
  bool have_header = false;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(start, end - start));
    start = end + 1;
    ++row;
    if (line.empty()) continue;

    const auto fields = split_csv(line);
    if (!have_header) {
      if (fields.size() < 3 || trim(fields[0]) != "writer_id" ||
          trim(fields[1]) != "signature_id" || trim(fields[2]) != "authenticity") {
        throw ParseError("row 1: expected header 'writer_id,signature_id,authenticity,f0,...'", row);
      }
      for (std::size_t k = 3; k < fields.size(); ++k) {
        if (trim(fields[k]) != "f" + std::to_string(k - 3)) {
          throw ParseError("header column " + std::to_string(k + 1) + " should be f" +
                               std::to_string(k - 3),
                           row);
        }
      }
      table.dim = fields.size() - 3;
      have_header = true;
      continue;
    }
    if (fields.size() != table.dim + 3) {
      throw ParseError("row " + std::to_string(row) + ": expected " +
                           std::to_string(table.dim + 3) + " fields, got " +
                           std::to_string(fields.size()),
                       row);
    }
    SignatureFeature f;
    f.writer_id = parse_number<std::uint32_t>(fields[0], row, "writer_id");
    f.signature_id = parse_number<std::uint32_t>(fields[1], row, "signature_id");
    f.authenticity = parse_authenticity(fields[2], row);
    f.values.reserve(table.dim);
    for (std::size_t k = 0; k < table.dim; ++k) {
      const double v = parse_number<double>(fields[k + 3], row, "feature value");
      if (!std::isfinite(v)) {
        throw ParseError("row " + std::to_string(row) + ": non-finite feature value", row);
      }
      f.values.push_back(v);
    }
    table.features.push_back(std::move(f));
  }
  if (!have_header) throw ParseError("empty feature file (missing header)", 1);
  return table;
}

FeatureTable parse_binary(std::string_view bytes) {
  detail::ByteReader in(bytes);
  if (in.bytes(4, "magic") != kFeatureMagic) throw ParseError("bad magic: not a TRPF file", 0);
  const auto version = in.u32("version");
  if (version != kFeatureFormatVersion) {
    throw ParseError("unsupported feature format version " + std::to_string(version), 4);
  }
  const auto count = in.u32("record count");
  const auto dim = in.u32("dim");
  FeatureTable table;
  table.dim = dim;
  const std::size_t record_size = 9 + 4 * static_cast<std::size_t>(dim);
  if (in.remaining() < record_size * count) {
    throw ParseError("truncated record " + std::to_string(in.remaining() / record_size) +
                         " at byte offset " +
                         std::to_string(in.offset() + (in.remaining() / record_size) * record_size),
                     in.offset() + (in.remaining() / record_size) * record_size);
  }
  table.features.reserve(count);
  for (std::uint32_t r = 0; r < count; ++r) {
    SignatureFeature f;
    f.writer_id = in.u32("writer_id");
    f.signature_id = in.u32("signature_id");
    const auto at = in.offset();
    const auto auth = in.u8("authenticity");
    if (auth > 1) {
      throw ParseError("invalid authenticity byte " + std::to_string(auth) + " at offset " +
                           std::to_string(at),
                       at);
    }
    f.authenticity = static_cast<Authenticity>(auth);
    f.values.resize(dim);
    for (auto& v : f.values) {
      const auto off = in.offset();
      v = in.f32("feature value");
      if (!std::isfinite(v)) {
        throw ParseError("non-finite feature value at offset " + std::to_string(off), off);
      }
    }
    table.features.push_back(std::move(f));
  }
  if (in.remaining() != 0) {
    throw ParseError("trailing bytes after last record at offset " + std::to_string(in.offset()),
                     in.offset());
  }
  return table;
}

std::size_t common_dim(const std::vector<SignatureFeature>& features) {
  const std::size_t d = features.empty() ? 0 : features.front().values.size();
  for (const auto& f : features) {
    if (f.values.size() != d) throw InvalidArgument("features have inconsistent dimensions");
  }
  return d;
}

}  // namespace

FeatureFormat feature_format_from_string(const std::string& name) {
  if (name == "auto") return FeatureFormat::auto_detect;
  if (name == "csv" || name == "text") return FeatureFormat::csv;
  if (name == "binary" || name == "bin") return FeatureFormat::binary;
  throw InvalidArgument("unknown feature format '" + name + "' (expected auto, csv or binary)");
}

FeatureTable parse_features(std::string_view bytes, FeatureFormat format) {
  if (format == FeatureFormat::auto_detect) {
    format = bytes.substr(0, 4) == kFeatureMagic ? FeatureFormat::binary : FeatureFormat::csv;
  }
  if (bytes.empty()) throw ParseError("empty feature file", format == FeatureFormat::csv ? 1 : 0);
  return format == FeatureFormat::binary ? parse_binary(bytes) : parse_csv(bytes);
}

std::string serialize_features(const std::vector<SignatureFeature>& features,
                               FeatureFormat format) {
  const std::size_t d = common_dim(features);
  if (format == FeatureFormat::binary) {
    detail::ByteWriter out;
    out.bytes(kFeatureMagic);
    out.u32(kFeatureFormatVersion);
    out.u32(static_cast<std::uint32_t>(features.size()));
    out.u32(static_cast<std::uint32_t>(d));
    for (const auto& f : features) {
      out.u32(f.writer_id);
      out.u32(f.signature_id);
      out.u8(static_cast<std::uint8_t>(f.authenticity));
      for (double v : f.values) out.f32(static_cast<float>(v));
    }
    return out.take();
  }
  std::ostringstream out;
  out << "writer_id,signature_id,authenticity";
  for (std::size_t k = 0; k < d; ++k) out << ",f" << k;
  out << '\n' << std::setprecision(9);
  for (const auto& f : features) {
    out << f.writer_id << ',' << f.signature_id << ','
        << (f.authenticity == Authenticity::genuine ? "genuine" : "forged");
    for (double v : f.values) out << ',' << v;
    out << '\n';
  }
  return out.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write '" + tmp.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InvalidArgument("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

FeatureTable read_features(const std::filesystem::path& path, FeatureFormat format) {
  return parse_features(read_file(path), format);
}

std::vector<SignatureFeature> load_features(const std::filesystem::path& path,
                                            FeatureFormat format) {
  return read_features(path, format).features;
}

void save_features(const std::filesystem::path& path,
                   const std::vector<SignatureFeature>& features, FeatureFormat format) {
  if (format == FeatureFormat::auto_detect) format = FeatureFormat::csv;
  write_file_atomic(path, serialize_features(features, format));
}

}  // namespace toprank::io
