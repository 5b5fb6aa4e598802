#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "speechdfa/timeseries.hpp"

namespace speechdfa {

enum class GeneratorKind { kWhite, kRandomWalk, kOneOverF, kFgn };

std::string to_string(GeneratorKind kind);
// Accepts "white", "random_walk", "one_over_f", "fgn".
GeneratorKind parse_generator_kind(const std::string& name);

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::kWhite;
  std::size_t length = 0;
  std::uint64_t seed = 0;
  std::optional<double> hurst;  // fgn only; must lie in (0,1)
};

// Deterministic synthesis: equal specs yield bit-identical output.
//
//   white       independent standard normals
//   random_walk running sum of the white series for the same seed
//   one_over_f  half-spectrum synthesis, amplitude k^-1/2 (power 1/f),
//               uniform random phases, zero DC, inverse real FFT,
//               standardized to unit sample variance
//   fgn         fractional Gaussian noise with parameter H via circulant
//               embedding of the exact fGn autocovariance
//
// sample_rate_hz is 1 and origin records kind and seed.
TimeSeries generate(const GeneratorSpec& spec);

// Closed-form fGn autocovariance at lag k for unit-variance fGn:
// 0.5 * (|k+1|^2H - 2|k|^2H + |k-1|^2H).
double fgn_autocovariance(std::int64_t lag, double hurst);

namespace detail {

// Eigenvalues of the circulant embedding the fGn sampler would use for this
// (length, hurst); exposed as a diagnostic. All must be nonnegative for the
// sampler to be exact.
std::vector<double> fgn_embedding_spectrum(std::size_t length, double hurst);

// Throws GenerationError when min(spectrum) < -1e-9 * max(spectrum).
void require_nonnegative_spectrum(const std::vector<double>& spectrum,
                                  const std::string& context);

}  // namespace detail

}  // namespace speechdfa
