#include "speechdfa/synth.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdio>
#include <mutex>
#include <utility>

#include "speechdfa/errors.hpp"
#include "speechdfa/numeric.hpp"
#include "speechdfa/rng.hpp"

namespace speechdfa {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

struct RealBuffer {
  explicit RealBuffer(std::size_t n)
      : data(static_cast<double*>(fftw_malloc(sizeof(double) * n))) {}
  ~RealBuffer() { fftw_free(data); }
  RealBuffer(const RealBuffer&) = delete;
  RealBuffer& operator=(const RealBuffer&) = delete;
  double* data;
};

struct ComplexBuffer {
  explicit ComplexBuffer(std::size_t n)
      : data(static_cast<fftw_complex*>(
            fftw_malloc(sizeof(fftw_complex) * n))) {}
  ~ComplexBuffer() { fftw_free(data); }
  ComplexBuffer(const ComplexBuffer&) = delete;
  ComplexBuffer& operator=(const ComplexBuffer&) = delete;
  fftw_complex* data;
};

// Unnormalized half-spectrum -> real inverse transform of size n.
std::vector<double> complex_to_real(ComplexBuffer& spectrum, std::size_t n) {
  RealBuffer out(n);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), spectrum.data, out.data,
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  return std::vector<double>(out.data, out.data + n);
}

std::vector<double> generate_white(std::size_t length, std::uint64_t seed) {
  GaussianSource gauss(seed);
  std::vector<double> samples(length);
  for (double& v : samples) {
    v = gauss.next();
  }
  return samples;
}

std::vector<double> generate_walk(std::size_t length, std::uint64_t seed) {
  std::vector<double> samples = generate_white(length, seed);
  for (std::size_t i = 1; i < length; ++i) {
    samples[i] += samples[i - 1];
  }
  return samples;
}

// Half-spectrum synthesis: amplitude k^-1/2 on bins 1..N/2 (power 1/f),
// uniform random phases, zero DC. The Nyquist bin of an even-length
// transform must be real, so its "phase" is a random sign. Output is
// standardized to unit sample variance (the overall scale carries no
// information for a scaling analysis).
std::vector<double> generate_one_over_f(std::size_t length,
                                        std::uint64_t seed) {
  SplitMix64 rng(seed);
  const std::size_t half = length / 2;
  ComplexBuffer spectrum(half + 1);
  spectrum.data[0][0] = 0.0;
  spectrum.data[0][1] = 0.0;
  for (std::size_t k = 1; k < half + (length % 2); ++k) {
    const double amplitude = 1.0 / std::sqrt(static_cast<double>(k));
    const double phase = 2.0 * kPi * rng.next_unit();
    spectrum.data[k][0] = amplitude * std::cos(phase);
    spectrum.data[k][1] = amplitude * std::sin(phase);
  }
  if (length % 2 == 0 && half >= 1) {
    const double amplitude = 1.0 / std::sqrt(static_cast<double>(half));
    spectrum.data[half][0] = rng.next_unit() < 0.5 ? amplitude : -amplitude;
    spectrum.data[half][1] = 0.0;
  }
  std::vector<double> samples = complex_to_real(spectrum, length);

  CompensatedSum sumsq;
  for (double v : samples) {
    sumsq.add(v * v);
  }
  const double sd = std::sqrt(sumsq.value() / static_cast<double>(length));
  if (sd > 0.0) {
    for (double& v : samples) {
      v /= sd;
    }
  }
  return samples;
}

std::size_t embedding_size(std::size_t length) {
  const std::size_t need = length < 2 ? 2 : 2 * (length - 1);
  std::size_t m = 2;
  while (m < need) {
    m *= 2;
  }
  return m;
}

// Circulant embedding (Davies-Harte / Wood-Chan): eigenvalues are the DFT of
// the autocovariance wrapped onto a circle of size m.
std::vector<double> embedding_spectrum(std::size_t m, double hurst) {
  RealBuffer row(m);
  for (std::size_t j = 0; j <= m / 2; ++j) {
    row.data[j] = fgn_autocovariance(static_cast<std::int64_t>(j), hurst);
  }
  for (std::size_t j = m / 2 + 1; j < m; ++j) {
    row.data[j] = row.data[m - j];
  }
  ComplexBuffer out(m / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), row.data, out.data,
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  // Symmetric real input: the spectrum is real and symmetric, so the first
  // m/2 + 1 values carry everything.
  std::vector<double> spectrum(m / 2 + 1);
  for (std::size_t k = 0; k <= m / 2; ++k) {
    spectrum[k] = out.data[k][0];
  }
  return spectrum;
}

std::vector<double> generate_fgn(std::size_t length, double hurst,
                                 std::uint64_t seed) {
  GaussianSource gauss(seed);
  if (length == 1) {
    return {gauss.next()};
  }
  const std::size_t m = embedding_size(length);
  std::vector<double> lambda = embedding_spectrum(m, hurst);
  detail::require_nonnegative_spectrum(
      lambda, "fgn(H=" + std::to_string(hurst) +
                  ", N=" + std::to_string(length) + ")");
  for (double& v : lambda) {
    if (v < 0.0) v = 0.0;  // rounding-level negatives only, after the guard
  }

  // Draw order is fixed: the two real endpoint coefficients, then (U, V)
  // pairs for the interior bins in index order.
  ComplexBuffer coeff(m / 2 + 1);
  coeff.data[0][0] = std::sqrt(lambda[0]) * gauss.next();
  coeff.data[0][1] = 0.0;
  coeff.data[m / 2][0] = std::sqrt(lambda[m / 2]) * gauss.next();
  coeff.data[m / 2][1] = 0.0;
  for (std::size_t k = 1; k < m / 2; ++k) {
    const double scale = std::sqrt(lambda[k] / 2.0);
    coeff.data[k][0] = scale * gauss.next();
    coeff.data[k][1] = scale * gauss.next();
  }

  std::vector<double> full = complex_to_real(coeff, m);
  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  std::vector<double> samples(length);
  for (std::size_t i = 0; i < length; ++i) {
    samples[i] = full[i] * norm;
  }
  return samples;
}

std::string format_hurst(double hurst) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", hurst);
  return buf;
}

}  // namespace

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::kWhite: return "white";
    case GeneratorKind::kRandomWalk: return "random_walk";
    case GeneratorKind::kOneOverF: return "one_over_f";
    case GeneratorKind::kFgn: return "fgn";
  }
  throw Error("synth: unknown generator kind");
}

GeneratorKind parse_generator_kind(const std::string& name) {
  if (name == "white") return GeneratorKind::kWhite;
  if (name == "random_walk") return GeneratorKind::kRandomWalk;
  if (name == "one_over_f") return GeneratorKind::kOneOverF;
  if (name == "fgn") return GeneratorKind::kFgn;
  throw Error("synth: unknown generator kind '" + name +
              "' (expected white, random_walk, one_over_f or fgn)");
}

double fgn_autocovariance(std::int64_t lag, double hurst) {
  const double k = static_cast<double>(lag < 0 ? -lag : lag);
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) +
                std::pow(std::abs(k - 1.0), h2));
}

TimeSeries generate(const GeneratorSpec& spec) {
  if (spec.length < 1) {
    throw Error("synth: length must be at least 1");
  }
  if (spec.kind == GeneratorKind::kFgn) {
    if (!spec.hurst) {
      throw Error("synth: fgn requires a hurst parameter");
    }
    if (!(*spec.hurst > 0.0 && *spec.hurst < 1.0)) {
      throw Error("synth: hurst must lie in (0,1), got " +
                  format_hurst(*spec.hurst));
    }
  } else if (spec.hurst) {
    throw Error("synth: hurst is only meaningful for fgn");
  }

  std::vector<double> samples;
  std::string origin = "synth:" + to_string(spec.kind);
  switch (spec.kind) {
    case GeneratorKind::kWhite:
      samples = generate_white(spec.length, spec.seed);
      break;
    case GeneratorKind::kRandomWalk:
      samples = generate_walk(spec.length, spec.seed);
      break;
    case GeneratorKind::kOneOverF:
      samples = generate_one_over_f(spec.length, spec.seed);
      break;
    case GeneratorKind::kFgn:
      samples = generate_fgn(spec.length, *spec.hurst, spec.seed);
      origin += ":H=" + format_hurst(*spec.hurst);
      break;
  }
  origin += ":seed=" + std::to_string(spec.seed);
  return TimeSeries(std::move(samples), 1.0, origin);
}

namespace detail {

std::vector<double> fgn_embedding_spectrum(std::size_t length, double hurst) {
  if (length < 2) {
    throw Error("synth: embedding spectrum needs length >= 2");
  }
  if (!(hurst > 0.0 && hurst < 1.0)) {
    throw Error("synth: hurst must lie in (0,1)");
  }
  return embedding_spectrum(embedding_size(length), hurst);
}

void require_nonnegative_spectrum(const std::vector<double>& spectrum,
                                  const std::string& context) {
  double lo = 0.0, hi = 0.0;
  for (double v : spectrum) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo < -1e-9 * hi) {
    throw GenerationError(
        "synth: circulant embedding spectrum is not nonnegative for " +
        context + " (min eigenvalue " + std::to_string(lo) +
        "); retry with a longer series");
  }
}

}  // namespace detail

}  // namespace speechdfa
