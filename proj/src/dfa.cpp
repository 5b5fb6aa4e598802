#include "speechdfa/dfa.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "speechdfa/errors.hpp"
#include "speechdfa/numeric.hpp"

namespace speechdfa {

namespace {

constexpr int kMinBoxSize = 4;
constexpr int kMinBoxesPerScale = 4;
constexpr std::size_t kMinScalesFullFit = 8;
constexpr std::size_t kMinScalesSubFit = 4;

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Unweighted OLS with an explicit residual pass; r^2 is defined as 1 for a
// curve whose ordinates are all equal (the constant fits exactly).
LineFit fit_line(const std::vector<std::pair<double, double>>& xy) {
  const auto n = static_cast<double>(xy.size());
  CompensatedSum sx, sy;
  for (const auto& [x, y] : xy) {
    sx.add(x);
    sy.add(y);
  }
  const double xbar = sx.value() / n;
  const double ybar = sy.value() / n;

  CompensatedSum sxx, sxy, syy;
  for (const auto& [x, y] : xy) {
    sxx.add((x - xbar) * (x - xbar));
    sxy.add((x - xbar) * (y - ybar));
    syy.add((y - ybar) * (y - ybar));
  }

  LineFit fit;
  fit.slope = sxx.value() > 0.0 ? sxy.value() / sxx.value() : 0.0;
  fit.intercept = ybar - fit.slope * xbar;

  CompensatedSum ssr;
  for (const auto& [x, y] : xy) {
    const double r = y - (fit.intercept + fit.slope * x);
    ssr.add(r * r);
  }
  const double sst = syy.value();
  fit.r_squared = sst > 0.0 ? std::clamp(1.0 - ssr.value() / sst, 0.0, 1.0)
                            : 1.0;
  return fit;
}

// Points with F > 0; F = 0 has no logarithm and is excluded from every fit.
std::vector<std::pair<double, double>> usable_loglog_points(
    const FluctuationCurve& curve) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(curve.points.size());
  for (const auto& p : curve.points) {
    if (p.f > 0.0) {
      pts.emplace_back(std::log10(static_cast<double>(p.n)), std::log10(p.f));
    }
  }
  return pts;
}

void require_nonempty_curve(const FluctuationCurve& curve) {
  if (curve.points.empty()) {
    throw Error("dfa: fluctuation curve has no points");
  }
}

}  // namespace

ScaleGrid::ScaleGrid(std::vector<int> box_sizes)
    : box_sizes_(std::move(box_sizes)) {
  if (box_sizes_.empty()) {
    throw Error("dfa: scale grid must contain at least one box size");
  }
  int prev = 0;
  for (int n : box_sizes_) {
    if (n < kMinBoxSize) {
      throw Error("dfa: box size " + std::to_string(n) +
                  " below minimum of " + std::to_string(kMinBoxSize));
    }
    if (n <= prev) {
      throw Error("dfa: box sizes must be strictly increasing (found " +
                  std::to_string(n) + " after " + std::to_string(prev) + ")");
    }
    prev = n;
  }
}

void ScaleGrid::validate_for_length(std::size_t series_length) const {
  const std::size_t limit = series_length / kMinBoxesPerScale;
  for (int n : box_sizes_) {
    if (static_cast<std::size_t>(n) > limit) {
      throw Error("dfa: box size " + std::to_string(n) +
                  " exceeds floor(N/4) = " + std::to_string(limit) +
                  " for series of length " + std::to_string(series_length));
    }
  }
}

ScaleGrid default_scale_grid(std::size_t series_length, int min_scale,
                             std::optional<int> max_scale, int count) {
  if (min_scale < kMinBoxSize) {
    throw Error("dfa: grid minimum must be at least " +
                std::to_string(kMinBoxSize));
  }
  if (count < 1) {
    throw Error("dfa: grid count must be positive");
  }
  const auto limit = static_cast<int>(
      std::min<std::size_t>(series_length / kMinBoxesPerScale,
                            std::size_t{1} << 30));
  const int top = max_scale.value_or(limit);
  if (top > limit) {
    throw Error("dfa: grid maximum " + std::to_string(top) +
                " exceeds floor(N/4) = " + std::to_string(limit));
  }
  if (top < min_scale) {
    throw Error("dfa: series of length " + std::to_string(series_length) +
                " too short for grid minimum " + std::to_string(min_scale) +
                " (needs at least " + std::to_string(4 * min_scale) +
                " samples)");
  }

  const double lo = std::log(static_cast<double>(min_scale));
  const double hi = std::log(static_cast<double>(top));
  std::vector<int> sizes;
  sizes.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0
                                : static_cast<double>(i) /
                                      static_cast<double>(count - 1);
    const int n = std::clamp(
        static_cast<int>(std::lround(std::exp(lo + t * (hi - lo)))),
        min_scale, top);
    if (sizes.empty() || n > sizes.back()) {
      sizes.push_back(n);
    }
  }
  return ScaleGrid(std::move(sizes));
}

std::vector<double> integrate_profile(const TimeSeries& series) {
  const double xbar = mean(series);
  std::vector<double> profile(series.size());
  CompensatedSum running;
  for (std::size_t k = 0; k < series.size(); ++k) {
    running.add(series.samples()[k] - xbar);
    profile[k] = running.value();
  }
  return profile;
}

double box_fluctuation(std::span<const double> profile, std::size_t start,
                       int n, Detrend detrend) {
  if (n < kMinBoxSize) {
    throw Error("dfa: box size " + std::to_string(n) + " below minimum of " +
                std::to_string(kMinBoxSize));
  }
  if (start + static_cast<std::size_t>(n) > profile.size()) {
    throw Error("dfa: box [" + std::to_string(start) + ", " +
                std::to_string(start + static_cast<std::size_t>(n)) +
                ") out of bounds for profile of length " +
                std::to_string(profile.size()));
  }
  const double* y = profile.data() + start;
  const auto nd = static_cast<double>(n);

  if (detrend == Detrend::kNone) {
    CompensatedSum ssr;
    for (int k = 0; k < n; ++k) {
      ssr.add(y[k] * y[k]);
    }
    return ssr.value();
  }

  // Closed-form line fit from sufficient statistics, local abscissae 0..n-1.
  // Sum k and sum k^2 have exact closed forms.
  const double sk = nd * (nd - 1.0) / 2.0;
  const double skk = (nd - 1.0) * nd * (2.0 * nd - 1.0) / 6.0;
  CompensatedSum sy, sky;
  for (int k = 0; k < n; ++k) {
    sy.add(y[k]);
    sky.add(static_cast<double>(k) * y[k]);
  }
  const double denom = nd * skk - sk * sk;
  const double slope = (nd * sky.value() - sk * sy.value()) / denom;
  const double intercept = (sy.value() - slope * sk) / nd;

  CompensatedSum ssr;
  for (int k = 0; k < n; ++k) {
    const double r = y[k] - (intercept + slope * static_cast<double>(k));
    ssr.add(r * r);
  }
  return ssr.value();
}

FluctuationCurve fluctuation_function(std::span<const double> profile,
                                      const ScaleGrid& grid, Tiling tiling,
                                      Detrend detrend) {
  grid.validate_for_length(profile.size());
  const std::size_t size = profile.size();

  FluctuationCurve curve;
  curve.series_length = size;
  curve.points.reserve(grid.size());

  for (int n : grid.box_sizes()) {
    const std::size_t boxes = size / static_cast<std::size_t>(n);
    CompensatedSum total;
    for (std::size_t i = 0; i < boxes; ++i) {
      total.add(
          box_fluctuation(profile, i * static_cast<std::size_t>(n), n,
                          detrend));
    }
    std::size_t covered = boxes * static_cast<std::size_t>(n);
    if (tiling == Tiling::kBothEnds) {
      for (std::size_t i = 0; i < boxes; ++i) {
        total.add(box_fluctuation(
            profile, size - (i + 1) * static_cast<std::size_t>(n), n,
            detrend));
      }
      covered *= 2;
    }
    const double msr = total.value() / static_cast<double>(covered);
    curve.points.push_back(
        FluctuationPoint{n, msr > 0.0 ? std::sqrt(msr) : 0.0});
  }
  return curve;
}

ScalingReport fit_scaling_exponent(const FluctuationCurve& curve) {
  require_nonempty_curve(curve);
  const auto pts = usable_loglog_points(curve);
  if (pts.empty()) {
    throw DegenerateSignalError(
        "dfa: every fluctuation value is zero; nothing to fit");
  }
  if (pts.size() < kMinScalesFullFit) {
    throw InsufficientScalesError(
        "dfa: " + std::to_string(pts.size()) +
        " usable scale(s), need at least " +
        std::to_string(kMinScalesFullFit) + " for a scaling fit");
  }
  const LineFit fit = fit_line(pts);
  ScalingReport report;
  report.alpha = fit.slope;
  report.intercept = fit.intercept;
  report.r_squared = fit.r_squared;
  return report;
}

ScalingReport split_scaling_exponents(const FluctuationCurve& curve,
                                      int crossover_scale) {
  require_nonempty_curve(curve);
  const int lo = curve.points.front().n;
  const int hi = curve.points.back().n;
  if (crossover_scale <= lo || crossover_scale >= hi) {
    throw Error("dfa: crossover scale " + std::to_string(crossover_scale) +
                " must lie strictly inside the grid [" + std::to_string(lo) +
                ", " + std::to_string(hi) + "]");
  }

  std::vector<std::pair<double, double>> fast, slow;
  for (const auto& p : curve.points) {
    if (p.f <= 0.0) continue;
    auto& side = p.n <= crossover_scale ? fast : slow;
    side.emplace_back(std::log10(static_cast<double>(p.n)), std::log10(p.f));
  }
  if (fast.size() < kMinScalesSubFit || slow.size() < kMinScalesSubFit) {
    throw InsufficientScalesError(
        "dfa: crossover at " + std::to_string(crossover_scale) + " leaves " +
        std::to_string(fast.size()) + " fast / " + std::to_string(slow.size()) +
        " slow usable scale(s); each side needs at least " +
        std::to_string(kMinScalesSubFit));
  }

  ScalingReport report = fit_scaling_exponent(curve);
  report.alpha_fast = fit_line(fast).slope;
  report.alpha_slow = fit_line(slow).slope;
  report.crossover_scale = crossover_scale;
  return report;
}

ScalingReport dfa(const TimeSeries& series, const ScaleGrid& grid,
                  const DfaOptions& options) {
  const std::vector<double> profile = integrate_profile(series);
  const FluctuationCurve curve =
      fluctuation_function(profile, grid, options.tiling, options.detrend);
  if (options.crossover_scale) {
    return split_scaling_exponents(curve, *options.crossover_scale);
  }
  return fit_scaling_exponent(curve);
}

}  // namespace speechdfa
