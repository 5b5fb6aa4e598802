#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "speechdfa/timeseries.hpp"

namespace speechdfa {

struct WavInfo {
  std::uint32_t sample_rate_hz = 0;
  std::uint16_t channels = 0;
  std::uint16_t bits_per_sample = 0;
  std::size_t frame_count = 0;
};

struct DecodedWav {
  WavInfo info;
  // One sequence per channel, scaled to [-1, 1) by division by 32768.
  std::vector<std::vector<double>> channels;
};

// RIFF/WAVE with 16-bit little-endian integer PCM only. Unknown chunks are
// skipped by their declared (even-padded) size. Every parse failure throws
// WavDecodeError naming the offending byte offset.
DecodedWav decode_wav(std::span<const std::uint8_t> bytes);
DecodedWav decode_wav_file(const std::string& path);

// Arithmetic mean across channels per frame; mono passes through unchanged.
// Channels must be non-empty and equal-length.
std::vector<double> mixdown(const std::vector<std::vector<double>>& channels);

// decode -> mixdown -> segment, each segment materialized as its own
// TimeSeries (origin = path#ordinal). An empty result means the clip is
// shorter than the window; that outcome is not an error.
std::vector<std::pair<Segment, TimeSeries>> ingest(const std::string& path,
                                                   double window_seconds);

// Rectified non-overlapping RMS frames of frame_ms milliseconds; the result's
// sample rate is rate / frame_length. Optional preprocessing, never applied
// by default.
TimeSeries envelope(const TimeSeries& series, double frame_ms);

}  // namespace speechdfa
