#include "speechdfa/timeseries.hpp"

#include <cmath>
#include <utility>

#include "speechdfa/errors.hpp"
#include "speechdfa/numeric.hpp"

namespace speechdfa {

TimeSeries::TimeSeries(std::vector<double> samples, double sample_rate_hz,
                       std::string origin)
    : samples_(std::move(samples)),
      sample_rate_hz_(sample_rate_hz),
      origin_(std::move(origin)) {
  if (samples_.empty()) {
    throw Error("timeseries: series must contain at least one sample (" +
                origin_ + ")");
  }
  if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_)) {
    throw Error("timeseries: sample rate must be positive (" + origin_ + ")");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw Error("timeseries: non-finite sample at index " +
                  std::to_string(i) + " (" + origin_ + ")");
    }
  }
}

double mean(std::span<const double> samples) {
  if (samples.empty()) {
    throw Error("timeseries: mean of empty series");
  }
  CompensatedSum sum;
  for (double v : samples) {
    sum.add(v);
  }
  return sum.value() / static_cast<double>(samples.size());
}

double mean(const TimeSeries& series) { return mean(series.samples()); }

std::vector<Segment> segment(const TimeSeries& series, double window_seconds) {
  if (!(window_seconds > 0.0) || !std::isfinite(window_seconds)) {
    throw Error("timeseries: window must be a positive number of seconds");
  }
  const double exact = window_seconds * series.sample_rate_hz();
  if (!(exact >= 1.0)) {
    throw Error("timeseries: window of " + std::to_string(window_seconds) +
                " s covers less than one sample at " +
                std::to_string(series.sample_rate_hz()) + " Hz");
  }
  if (exact >= static_cast<double>(series.size()) + 1.0) {
    return {};  // window longer than the whole series
  }
  const auto window = static_cast<std::size_t>(std::floor(exact));
  const std::size_t count = series.size() / window;
  std::vector<Segment> segments;
  segments.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    segments.push_back(Segment{series.origin(), i * window, window,
                               static_cast<int>(i) + 1});
  }
  return segments;
}

TimeSeries extract(const TimeSeries& series, const Segment& seg) {
  if (seg.length == 0 || seg.start_index + seg.length > series.size()) {
    throw Error("timeseries: segment [" + std::to_string(seg.start_index) +
                ", " + std::to_string(seg.start_index + seg.length) +
                ") out of bounds for series of length " +
                std::to_string(series.size()));
  }
  const auto first = series.samples().begin() +
                     static_cast<std::ptrdiff_t>(seg.start_index);
  std::vector<double> samples(first,
                              first + static_cast<std::ptrdiff_t>(seg.length));
  return TimeSeries(std::move(samples), series.sample_rate_hz(),
                    series.origin() + "#" + std::to_string(seg.label));
}

}  // namespace speechdfa
