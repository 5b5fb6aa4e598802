#include "speechdfa/audio.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <utility>

#include "speechdfa/errors.hpp"
#include "speechdfa/numeric.hpp"

namespace speechdfa {

namespace {

std::uint16_t read_u16le(std::span<const std::uint8_t> bytes,
                         std::size_t offset) {
  return static_cast<std::uint16_t>(bytes[offset] |
                                    (bytes[offset + 1] << 8));
}

std::uint32_t read_u32le(std::span<const std::uint8_t> bytes,
                         std::size_t offset) {
  return static_cast<std::uint32_t>(bytes[offset]) |
         (static_cast<std::uint32_t>(bytes[offset + 1]) << 8) |
         (static_cast<std::uint32_t>(bytes[offset + 2]) << 16) |
         (static_cast<std::uint32_t>(bytes[offset + 3]) << 24);
}

bool tag_is(std::span<const std::uint8_t> bytes, std::size_t offset,
            const char* tag) {
  return std::memcmp(bytes.data() + offset, tag, 4) == 0;
}

constexpr std::uint16_t kPcmFormatTag = 1;

}  // namespace

DecodedWav decode_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12) {
    throw WavDecodeError("audio: file too small for a RIFF header", 0);
  }
  if (!tag_is(bytes, 0, "RIFF")) {
    throw WavDecodeError("audio: missing RIFF magic", 0);
  }
  if (!tag_is(bytes, 8, "WAVE")) {
    throw WavDecodeError("audio: missing WAVE form type", 8);
  }

  bool have_fmt = false;
  WavInfo info;
  std::uint16_t block_align = 0;
  bool have_data = false;
  std::size_t data_offset = 0;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos < bytes.size()) {
    if (pos + 8 > bytes.size()) {
      throw WavDecodeError("audio: truncated chunk header", pos);
    }
    const std::size_t chunk_size = read_u32le(bytes, pos + 4);
    const std::size_t body = pos + 8;

    if (tag_is(bytes, pos, "fmt ")) {
      if (chunk_size < 16 || body + chunk_size > bytes.size()) {
        throw WavDecodeError("audio: fmt chunk truncated", pos + 4);
      }
      const std::uint16_t format_tag = read_u16le(bytes, body);
      if (format_tag != kPcmFormatTag) {
        throw WavDecodeError(
            "audio: unsupported encoding " + std::to_string(format_tag) +
                "; only integer PCM (1) is supported",
            body);
      }
      info.channels = read_u16le(bytes, body + 2);
      if (info.channels == 0) {
        throw WavDecodeError("audio: zero channels", body + 2);
      }
      info.sample_rate_hz = read_u32le(bytes, body + 4);
      if (info.sample_rate_hz == 0) {
        throw WavDecodeError("audio: zero sample rate", body + 4);
      }
      block_align = read_u16le(bytes, body + 12);
      info.bits_per_sample = read_u16le(bytes, body + 14);
      if (info.bits_per_sample != 16) {
        throw WavDecodeError(
            "audio: unsupported bit depth " +
                std::to_string(info.bits_per_sample) +
                "; only 16-bit PCM is supported",
            body + 14);
      }
      if (block_align != info.channels * 2) {
        throw WavDecodeError(
            "audio: block alignment " + std::to_string(block_align) +
                " inconsistent with " + std::to_string(info.channels) +
                " 16-bit channel(s)",
            body + 12);
      }
      have_fmt = true;
    } else if (tag_is(bytes, pos, "data")) {
      if (!have_fmt) {
        throw WavDecodeError("audio: data chunk before fmt chunk", pos);
      }
      if (body + chunk_size > bytes.size()) {
        throw WavDecodeError(
            "audio: truncated data chunk: declares " +
                std::to_string(chunk_size) + " bytes, " +
                std::to_string(bytes.size() - body) + " available",
            pos + 4);
      }
      if (chunk_size % block_align != 0) {
        throw WavDecodeError(
            "audio: data size " + std::to_string(chunk_size) +
                " is not a multiple of the " + std::to_string(block_align) +
                "-byte frame",
            pos + 4);
      }
      have_data = true;
      data_offset = body;
      data_size = chunk_size;
    } else {
      // Unknown chunk: skip its declared size (padded to even length).
      if (body + chunk_size > bytes.size()) {
        throw WavDecodeError("audio: chunk overruns the file", pos + 4);
      }
    }

    pos = body + chunk_size + (chunk_size % 2);
    if (have_data) {
      break;  // nothing after the data chunk matters for analysis
    }
  }

  if (!have_fmt) {
    throw WavDecodeError("audio: missing fmt chunk", bytes.size());
  }
  if (!have_data) {
    throw WavDecodeError("audio: missing data chunk", bytes.size());
  }

  DecodedWav decoded;
  decoded.info = info;
  decoded.info.frame_count = data_size / block_align;
  decoded.channels.assign(info.channels,
                          std::vector<double>(decoded.info.frame_count));
  std::size_t cursor = data_offset;
  for (std::size_t frame = 0; frame < decoded.info.frame_count; ++frame) {
    for (std::uint16_t ch = 0; ch < info.channels; ++ch) {
      const auto raw = static_cast<std::int16_t>(read_u16le(bytes, cursor));
      decoded.channels[ch][frame] = static_cast<double>(raw) / 32768.0;
      cursor += 2;
    }
  }
  return decoded;
}

DecodedWav decode_wav_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("audio: cannot open file: " + path);
  }
  std::vector<std::uint8_t> bytes(
      (std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw Error("audio: read failure on file: " + path);
  }
  return decode_wav(bytes);
}

std::vector<double> mixdown(const std::vector<std::vector<double>>& channels) {
  if (channels.empty()) {
    throw Error("audio: mixdown of zero channels");
  }
  const std::size_t frames = channels.front().size();
  for (std::size_t ch = 1; ch < channels.size(); ++ch) {
    if (channels[ch].size() != frames) {
      throw Error("audio: channel " + std::to_string(ch) + " has " +
                  std::to_string(channels[ch].size()) + " frames, expected " +
                  std::to_string(frames));
    }
  }
  if (channels.size() == 1) {
    return channels.front();
  }
  std::vector<double> mixed(frames);
  const double scale = 1.0 / static_cast<double>(channels.size());
  for (std::size_t frame = 0; frame < frames; ++frame) {
    double sum = 0.0;
    for (const auto& channel : channels) {
      sum += channel[frame];
    }
    mixed[frame] = sum * scale;
  }
  return mixed;
}

std::vector<std::pair<Segment, TimeSeries>> ingest(const std::string& path,
                                                   double window_seconds) {
  const DecodedWav decoded = decode_wav_file(path);
  TimeSeries series(mixdown(decoded.channels),
                    static_cast<double>(decoded.info.sample_rate_hz), path);
  std::vector<std::pair<Segment, TimeSeries>> result;
  for (const Segment& seg : segment(series, window_seconds)) {
    result.emplace_back(seg, extract(series, seg));
  }
  return result;
}

TimeSeries envelope(const TimeSeries& series, double frame_ms) {
  if (!(frame_ms > 0.0) || !std::isfinite(frame_ms)) {
    throw Error("audio: envelope frame must be a positive number of ms");
  }
  const double exact = frame_ms / 1000.0 * series.sample_rate_hz();
  if (!(exact >= 1.0)) {
    throw Error("audio: envelope frame of " + std::to_string(frame_ms) +
                " ms covers less than one sample at " +
                std::to_string(series.sample_rate_hz()) + " Hz");
  }
  if (std::floor(exact) > static_cast<double>(series.size())) {
    throw Error("audio: envelope frame longer than the series (" +
                series.origin() + ")");
  }
  const auto frame_len = static_cast<std::size_t>(std::floor(exact));
  const std::size_t frames = series.size() / frame_len;
  std::vector<double> rms(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    CompensatedSum sumsq;
    for (std::size_t k = 0; k < frame_len; ++k) {
      const double v = series.samples()[i * frame_len + k];
      sumsq.add(v * v);
    }
    rms[i] = std::sqrt(sumsq.value() / static_cast<double>(frame_len));
  }
  char suffix[48];
  std::snprintf(suffix, sizeof(suffix), ":env%gms", frame_ms);
  return TimeSeries(std::move(rms),
                    series.sample_rate_hz() / static_cast<double>(frame_len),
                    series.origin() + suffix);
}

}  // namespace speechdfa
