#include "toprank/synth.hpp"

#include <cmath>
#include <random>

#include "toprank/errors.hpp"

namespace toprank::io {

std::vector<SignatureFeature> synth_generate(const SynthSpec& spec) {
  if (spec.writers < 1) throw InvalidArgument("synth: writers must be >= 1");
  if (spec.genuine_per_writer < 1) throw InvalidArgument("synth: genuine_per_writer must be >= 1");
  if (spec.dim < 2) throw InvalidArgument("synth: dim must be >= 2");
  if (!std::isfinite(spec.separation) || spec.separation < 0.0) {
    throw InvalidArgument("synth: separation must be finite and >= 0");
  }
  if (!std::isfinite(spec.noise) || spec.noise < 0.0) {
    throw InvalidArgument("synth: noise must be finite and >= 0");
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  const auto jitter = [&] { return spec.noise > 0.0 ? spec.noise * unit(rng) : 0.0; };

  std::vector<double> direction(spec.dim);
  double norm = 0.0;
  while (norm == 0.0) {
    norm = 0.0;
    for (auto& v : direction) {
      v = unit(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
  }
  for (auto& v : direction) v /= norm;

  std::vector<SignatureFeature> out;
  out.reserve(spec.writers * (spec.genuine_per_writer + spec.forged_per_writer));
  for (std::size_t w = 0; w < spec.writers; ++w) {
    std::vector<double> center(spec.dim);
    for (auto& c : center) c = unit(rng);
    const auto writer_id = static_cast<std::uint32_t>(w + 1);
    std::uint32_t sig = 0;
    for (std::size_t g = 0; g < spec.genuine_per_writer; ++g) {
      SignatureFeature f{writer_id, sig++, Authenticity::genuine, center};
      for (auto& v : f.values) v += jitter();
      out.push_back(std::move(f));
    }
    for (std::size_t q = 0; q < spec.forged_per_writer; ++q) {
      SignatureFeature f{writer_id, sig++, Authenticity::forged, center};
      for (std::size_t k = 0; k < spec.dim; ++k) {
        f.values[k] += spec.separation * direction[k] + jitter();
      }
      out.push_back(std::move(f));
    }
  }
  return out;
}

}  // namespace toprank::io
