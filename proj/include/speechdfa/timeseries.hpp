#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace speechdfa {

// Uniformly sampled real-valued signal. Immutable after construction;
// the constructor enforces: at least one sample, every sample finite,
// positive sample rate. Samples are dimensionless amplitudes.
class TimeSeries {
 public:
  TimeSeries(std::vector<double> samples, double sample_rate_hz,
             std::string origin);

  const std::vector<double>& samples() const { return samples_; }
  double sample_rate_hz() const { return sample_rate_hz_; }
  const std::string& origin() const { return origin_; }
  std::size_t size() const { return samples_.size(); }

 private:
  std::vector<double> samples_;
  double sample_rate_hz_ = 0.0;
  std::string origin_;
};

// Half-open window [start_index, start_index + length) of a parent series.
// `label` is the 1-based ordinal within one segmentation call.
struct Segment {
  std::string parent_origin;
  std::size_t start_index = 0;
  std::size_t length = 0;
  int label = 0;
};

double mean(std::span<const double> samples);
double mean(const TimeSeries& series);

// Consecutive non-overlapping windows of floor(window_seconds * rate) samples
// tiling the series from the start; a trailing remainder shorter than the
// window is dropped. Returns an empty list (not an error) when the window is
// longer than the whole series. Requires window_seconds * rate >= 1.
std::vector<Segment> segment(const TimeSeries& series, double window_seconds);

// Materialize a segment as its own TimeSeries with
// origin = parent origin + "#" + label.
TimeSeries extract(const TimeSeries& series, const Segment& seg);

}  // namespace speechdfa
