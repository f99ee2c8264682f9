#include "toprank/checkpoint.hpp"

#include <cmath>

#include "toprank/byte_io.hpp"
#include "toprank/errors.hpp"
#include "toprank/feature_io.hpp"

namespace toprank::io {
namespace {

constexpr std::string_view kCheckpointMagic = "TRPC";
constexpr std::uint32_t kMaxLayers = 1024;

}  // namespace

std::string encode_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.network.empty()) throw InvalidState("cannot save an empty network");
  const auto dims = ckpt.network.layer_dims();
  if (static_cast<std::size_t>(ckpt.stats.mean.size()) != ckpt.network.input_dim() ||
      ckpt.stats.stddev.size() != ckpt.stats.mean.size()) {
    throw InvalidArgument("checkpoint: normalization dimension does not match network input");
  }
  detail::ByteWriter out;
  out.bytes(kCheckpointMagic);
  out.u32(kCheckpointVersion);
  out.u32(static_cast<std::uint32_t>(dims.size()));
  for (auto d : dims) out.u32(static_cast<std::uint32_t>(d));
  const auto params = ckpt.network.flatten();
  out.u64(params.size());
  for (double v : params) out.f64(v);

  out.u32(static_cast<std::uint32_t>(ckpt.stats.mean.size()));
  for (Eigen::Index k = 0; k < ckpt.stats.mean.size(); ++k) out.f64(ckpt.stats.mean[k]);
  for (Eigen::Index k = 0; k < ckpt.stats.stddev.size(); ++k) out.f64(ckpt.stats.stddev[k]);

  const auto& c = ckpt.config;
  out.f64(c.p);
  out.f64(c.learning_rate);
  out.u32(static_cast<std::uint32_t>(c.pos_batch));
  out.u32(static_cast<std::uint32_t>(c.neg_batch));
  out.u32(static_cast<std::uint32_t>(c.max_epochs));
  out.u32(static_cast<std::uint32_t>(c.patience));
  out.u64(c.seed);
  out.u8(static_cast<std::uint8_t>(c.optimizer));
  out.f64(c.beta1);
  out.f64(c.beta2);
  out.f64(c.epsilon);
  out.f64(c.clip_norm);
  out.f64(ckpt.best_val_pos_at_top);
  return out.take();
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  detail::ByteReader in(bytes);
  if (in.bytes(4, "magic") != kCheckpointMagic) throw ParseError("bad magic: not a TRPC checkpoint", 0);
  const auto version = in.u32("version");
  if (version != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version " + std::to_string(version), 4);
  }
  const auto ndims = in.u32("layer count");
  if (ndims < 2 || ndims > kMaxLayers) throw ParseError("invalid layer count", 8);
  std::vector<std::size_t> dims(ndims);
  for (auto& d : dims) {
    const auto at = in.offset();
    d = in.u32("layer dim");
    if (d == 0) throw ParseError("zero layer dimension at offset " + std::to_string(at), at);
  }
  if (dims.back() != 1) throw ParseError("checkpoint output dimension must be 1", in.offset());

  Checkpoint ckpt;
  ckpt.network = ScorerNetwork(dims);
  const auto at_count = in.offset();
  const auto count = in.u64("parameter count");
  if (count != ckpt.network.num_parameters()) {
    throw ParseError("parameter count " + std::to_string(count) + " does not match layer dims (" +
                         std::to_string(ckpt.network.num_parameters()) + ")",
                     at_count);
  }
  if (in.remaining() / 8 < count) throw ParseError("truncated parameters", in.offset());
  std::vector<double> params(count);
  for (auto& v : params) v = in.f64("parameter");
  ckpt.network.unflatten(params);

  const auto at_norm = in.offset();
  const auto norm_dim = in.u32("normalization dim");
  if (norm_dim != dims.front()) {
    throw ParseError("normalization dim does not match network input", at_norm);
  }
  ckpt.stats.mean.resize(norm_dim);
  ckpt.stats.stddev.resize(norm_dim);
  for (Eigen::Index k = 0; k < ckpt.stats.mean.size(); ++k) ckpt.stats.mean[k] = in.f64("mean");
  for (Eigen::Index k = 0; k < ckpt.stats.stddev.size(); ++k) ckpt.stats.stddev[k] = in.f64("stddev");

  auto& c = ckpt.config;
  c.p = in.f64("p");
  c.learning_rate = in.f64("learning_rate");
  c.pos_batch = in.u32("pos_batch");
  c.neg_batch = in.u32("neg_batch");
  c.max_epochs = in.u32("max_epochs");
  c.patience = in.u32("patience");
  c.seed = in.u64("seed");
  const auto at_opt = in.offset();
  const auto opt = in.u8("optimizer");
  if (opt > 2) throw ParseError("invalid optimizer tag", at_opt);
  c.optimizer = static_cast<OptimizerKind>(opt);
  c.beta1 = in.f64("beta1");
  c.beta2 = in.f64("beta2");
  c.epsilon = in.f64("epsilon");
  c.clip_norm = in.f64("clip_norm");
  c.hidden.assign(dims.begin() + 1, dims.end() - 1);
  ckpt.best_val_pos_at_top = in.f64("best validation pos@top");
  if (in.remaining() != 0) throw ParseError("trailing bytes in checkpoint", in.offset());
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  write_file_atomic(path, encode_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file(path));
}

}  // namespace toprank::io
