#include <doctest.h>

#include <cmath>
#include <vector>

#include "speechdfa/dfa.hpp"
#include "speechdfa/errors.hpp"
#include "speechdfa/synth.hpp"

using namespace speechdfa;

namespace {

GeneratorSpec make_spec(GeneratorKind kind, std::size_t length,
                        std::uint64_t seed,
                        std::optional<double> hurst = std::nullopt) {
  GeneratorSpec spec;
  spec.kind = kind;
  spec.length = length;
  spec.seed = seed;
  spec.hurst = hurst;
  return spec;
}

}  // namespace

TEST_CASE("generator kinds parse and print") {
  for (auto kind : {GeneratorKind::kWhite, GeneratorKind::kRandomWalk,
                    GeneratorKind::kOneOverF, GeneratorKind::kFgn}) {
    CHECK(parse_generator_kind(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(parse_generator_kind("pink"), Error);
}

TEST_CASE("generation is bit-deterministic") {
  for (auto kind : {GeneratorKind::kWhite, GeneratorKind::kRandomWalk,
                    GeneratorKind::kOneOverF}) {
    const auto spec = make_spec(kind, 2048, 31337);
    CHECK(generate(spec).samples() == generate(spec).samples());
  }
  const auto fgn_spec = make_spec(GeneratorKind::kFgn, 2048, 31337, 0.7);
  CHECK(generate(fgn_spec).samples() == generate(fgn_spec).samples());

  // Different seeds give different draws.
  CHECK(generate(make_spec(GeneratorKind::kWhite, 64, 1)).samples() !=
        generate(make_spec(GeneratorKind::kWhite, 64, 2)).samples());
}

TEST_CASE("origin records kind and seed") {
  CHECK(generate(make_spec(GeneratorKind::kWhite, 8, 42)).origin() ==
        "synth:white:seed=42");
  CHECK(generate(make_spec(GeneratorKind::kFgn, 8, 7, 0.3)).origin() ==
        "synth:fgn:H=0.3:seed=7");
  CHECK(generate(make_spec(GeneratorKind::kWhite, 8, 42)).sample_rate_hz() ==
        1.0);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(generate(make_spec(GeneratorKind::kWhite, 0, 1)), Error);
  // fgn requires hurst; other kinds reject it.
  CHECK_THROWS_AS(generate(make_spec(GeneratorKind::kFgn, 64, 1)), Error);
  CHECK_THROWS_AS(generate(make_spec(GeneratorKind::kWhite, 64, 1, 0.5)),
                  Error);
  CHECK_THROWS_AS(generate(make_spec(GeneratorKind::kFgn, 64, 1, 0.0)), Error);
  CHECK_THROWS_AS(generate(make_spec(GeneratorKind::kFgn, 64, 1, 1.0)), Error);
}

TEST_CASE("white noise sample statistics") {
  const std::size_t n = std::size_t{1} << 14;
  const double mean_bound = 4.0 / std::sqrt(static_cast<double>(n));
  const double var_bound = 5.0 / std::sqrt(static_cast<double>(n));
  for (std::uint64_t seed : {11ull, 222ull, 3333ull, 44444ull}) {
    const TimeSeries series = generate(make_spec(GeneratorKind::kWhite, n,
                                                 seed));
    double sum = 0.0;
    for (double v : series.samples()) sum += v;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : series.samples()) ss += (v - mean) * (v - mean);
    const double var = ss / static_cast<double>(n);
    CHECK(std::abs(mean) <= mean_bound);
    CHECK(std::abs(var - 1.0) <= var_bound);
  }
}

TEST_CASE("random walk is the running sum of white") {
  const auto white = generate(make_spec(GeneratorKind::kWhite, 512, 99));
  const auto walk = generate(make_spec(GeneratorKind::kRandomWalk, 512, 99));
  double acc = 0.0;
  for (std::size_t i = 0; i < white.size(); ++i) {
    acc += white.samples()[i];
    CHECK(walk.samples()[i] == doctest::Approx(acc).epsilon(1e-12));
  }
}

TEST_CASE("one_over_f output is standardized with zero mean") {
  const auto series = generate(make_spec(GeneratorKind::kOneOverF, 4096, 5));
  double sum = 0.0, sumsq = 0.0;
  for (double v : series.samples()) {
    sum += v;
    sumsq += v * v;
  }
  CHECK(std::abs(sum / 4096.0) <= 1e-9);  // zero DC by construction
  CHECK(sumsq / 4096.0 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("one_over_f scales like 1/f (seeded single realization)") {
  const auto series =
      generate(make_spec(GeneratorKind::kOneOverF, std::size_t{1} << 14, 71));
  const ScaleGrid grid = default_scale_grid(series.size());
  CHECK(std::abs(dfa(series, grid).alpha - 1.0) <= 0.1);
}

TEST_CASE("fgn autocovariance matches the closed form") {
  // Empirical lag-k autocovariance over 100 seeded realizations, within
  // 3 standard errors for every lag <= 10.
  constexpr int kRealizations = 100;
  constexpr std::size_t kLength = 4096;
  constexpr int kMaxLag = 10;
  for (double hurst : {0.3, 0.8}) {
    std::vector<std::vector<double>> estimates(
        kMaxLag + 1, std::vector<double>(kRealizations));
    for (int r = 0; r < kRealizations; ++r) {
      const auto series = generate(make_spec(
          GeneratorKind::kFgn, kLength, 60000 + static_cast<std::uint64_t>(r),
          hurst));
      const auto& x = series.samples();
      for (int lag = 0; lag <= kMaxLag; ++lag) {
        double acc = 0.0;
        for (std::size_t i = 0; i + lag < kLength; ++i) {
          acc += x[i] * x[i + lag];
        }
        estimates[lag][r] = acc / static_cast<double>(kLength - lag);
      }
    }
    for (int lag = 0; lag <= kMaxLag; ++lag) {
      double mean = 0.0;
      for (double v : estimates[lag]) mean += v;
      mean /= kRealizations;
      double var = 0.0;
      for (double v : estimates[lag]) var += (v - mean) * (v - mean);
      var /= (kRealizations - 1);
      const double se = std::sqrt(var / kRealizations);
      const double expected = fgn_autocovariance(lag, hurst);
      INFO("H=", hurst, " lag=", lag, " mean=", mean, " expected=", expected,
           " se=", se);
      CHECK(std::abs(mean - expected) <= 3.0 * se);
    }
  }
}

TEST_CASE("fgn single realization lands near its Hurst parameter") {
  const auto series = generate(
      make_spec(GeneratorKind::kFgn, std::size_t{1} << 14, 2024, 0.3));
  const ScaleGrid grid = default_scale_grid(series.size());
  CHECK(std::abs(dfa(series, grid).alpha - 0.3) <= 0.1);
}

TEST_CASE("fgn embedding spectrum is nonnegative across the H range") {
  for (double hurst : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
    for (std::size_t n : {16u, 64u, 256u, 1024u}) {
      const auto spectrum = detail::fgn_embedding_spectrum(n, hurst);
      double lo = 0.0, hi = 0.0;
      for (double v : spectrum) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      CHECK(lo >= -1e-9 * hi);
    }
  }
}

TEST_CASE("non-positive embedding spectrum raises a generation failure") {
  CHECK_NOTHROW(
      detail::require_nonnegative_spectrum({2.0, 1.0, 0.0, -1e-12}, "ok"));
  CHECK_THROWS_AS(
      detail::require_nonnegative_spectrum({2.0, 1.0, -0.5}, "bad"),
      GenerationError);
}
