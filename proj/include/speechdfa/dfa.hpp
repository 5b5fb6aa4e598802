#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "speechdfa/timeseries.hpp"

namespace speechdfa {

// Strictly increasing box sizes, each at least 4 samples (a line fit on
// fewer points has no meaningful residual).
class ScaleGrid {
 public:
  explicit ScaleGrid(std::vector<int> box_sizes);

  const std::vector<int>& box_sizes() const { return box_sizes_; }
  int min_scale() const { return box_sizes_.front(); }
  int max_scale() const { return box_sizes_.back(); }
  std::size_t size() const { return box_sizes_.size(); }

  // Every scale must leave at least 4 boxes in a profile of this length;
  // throws naming the offending scale otherwise.
  void validate_for_length(std::size_t series_length) const;

 private:
  std::vector<int> box_sizes_;
};

// `count` log-spaced sizes from min_scale to max_scale (default
// floor(length/4)), rounded to distinct integers.
ScaleGrid default_scale_grid(std::size_t series_length, int min_scale = 16,
                             std::optional<int> max_scale = std::nullopt,
                             int count = 20);

struct FluctuationPoint {
  int n = 0;     // box size, samples
  double f = 0;  // RMS fluctuation at that box size
};

struct FluctuationCurve {
  std::vector<FluctuationPoint> points;  // ordered by n
  std::size_t series_length = 0;
};

// Result of the log-log regression. intercept is log10 F extrapolated to
// log10 n = 0. alpha_fast / alpha_slow are present only when a crossover
// split was requested.
struct ScalingReport {
  double alpha = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::optional<double> alpha_fast;
  std::optional<double> alpha_slow;
  std::optional<int> crossover_scale;
};

// kStartOnly tiles boxes from the start and drops the tail beyond
// floor(N/n)*n. kBothEnds additionally tiles from the end and averages the
// two passes (the usual sensitivity check when N mod n is large).
enum class Tiling { kStartOnly, kBothEnds };

// kNone skips detrending entirely (residual = raw profile). It exists as a
// negative control for the validation suite, not as an analysis mode.
enum class Detrend { kLinear, kNone };

struct DfaOptions {
  Tiling tiling = Tiling::kStartOnly;
  Detrend detrend = Detrend::kLinear;
  std::optional<int> crossover_scale;
};

// Profile y(k) = sum_{i<=k} (x_i - mean(x)). The last element is 0 up to
// rounding; everything downstream operates on this.
std::vector<double> integrate_profile(const TimeSeries& series);

// Sum of squared residuals of the least-squares line over
// profile[start, start + n). Abscissae are local (0..n-1) so large absolute
// indices cannot cancel catastrophically. Requires n >= 4 and the box in
// bounds.
double box_fluctuation(std::span<const double> profile, std::size_t start,
                       int n, Detrend detrend = Detrend::kLinear);

// F(n) = sqrt(mean squared residual over all covered points) for each grid
// scale. With kStartOnly the covered count is floor(N/n)*n.
FluctuationCurve fluctuation_function(std::span<const double> profile,
                                      const ScaleGrid& grid,
                                      Tiling tiling = Tiling::kStartOnly,
                                      Detrend detrend = Detrend::kLinear);

// Ordinary least squares of log10 F against log10 n over the points with
// F > 0. Requires at least 8 usable points (InsufficientScalesError);
// throws DegenerateSignalError when every F is zero.
ScalingReport fit_scaling_exponent(const FluctuationCurve& curve);

// Full fit plus separate fits on n <= crossover (alpha_fast) and
// n > crossover (alpha_slow). The crossover must lie strictly inside the
// grid and each side must retain at least 4 usable scales.
ScalingReport split_scaling_exponents(const FluctuationCurve& curve,
                                      int crossover_scale);

// integrate_profile -> fluctuation_function -> fit (split when
// options.crossover_scale is set). Pure and deterministic.
ScalingReport dfa(const TimeSeries& series, const ScaleGrid& grid,
                  const DfaOptions& options = {});

}  // namespace speechdfa
