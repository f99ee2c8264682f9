#pragma once

// Checkpoint layout (little-endian):
//   "TRPC" | u32 version | u32 layer-dim count | u32 dims...
//   u64 parameter count | f64 parameters (ScorerNetwork::flatten order)
//   u32 normalization dim | f64 mean... | f64 stddev...
//   config: f64 p | f64 learning_rate | u32 pos_batch | u32 neg_batch
//           u32 max_epochs | u32 patience | u64 seed | u8 optimizer
//           f64 beta1 | f64 beta2 | f64 epsilon | f64 clip_norm
//   f64 best validation pos@top

#include <filesystem>
#include <string>
#include <string_view>

#include "toprank/model.hpp"
#include "toprank/pairing.hpp"
#include "toprank/training.hpp"

namespace toprank::io {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  ScorerNetwork network;
  NormalizationStats stats;
  TrainConfig config;
  double best_val_pos_at_top = 0.0;
};

std::string encode_checkpoint(const Checkpoint& checkpoint);
Checkpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace toprank::io
