#pragma once

#include <cstdint>
#include <vector>

#include "toprank/pairing.hpp"

namespace toprank::io {

/// Writer centers are standard normal. Genuine signatures scatter around the
/// center with `noise`; forgeries are additionally displaced by `separation`
/// along one unit direction shared by all writers. Large separation relative
/// to noise gives separable pairs, separation near 0 entangles them.
struct SynthSpec {
  std::size_t writers = 10;
  std::size_t genuine_per_writer = 6;
  std::size_t forged_per_writer = 6;
  std::size_t dim = 16;
  double separation = 5.0;
  double noise = 0.1;
  std::uint64_t seed = 0;
};

/// Writer ids start at 1. Within a writer, genuine signatures take ids
/// 0..G-1 and forgeries G..G+F-1.
std::vector<SignatureFeature> synth_generate(const SynthSpec& spec);

}  // namespace toprank::io
