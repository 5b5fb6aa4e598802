#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace speechdfa {

// Base type for every toolkit error.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A log-log regression was attempted with fewer usable scales than required.
class InsufficientScalesError : public Error {
 public:
  using Error::Error;
};

// Every fluctuation value is zero (constant input, or a profile that is an
// exact line at all scales), so there is nothing to fit.
class DegenerateSignalError : public Error {
 public:
  using Error::Error;
};

// WAV container parse failure. `offset` is the byte position of the defect;
// it is also appended to the message.
class WavDecodeError : public Error {
 public:
  WavDecodeError(const std::string& what, std::size_t offset)
      : Error(what + " (byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_ = 0;
};

// Synthetic-signal generation failure (non-positive circulant spectrum).
class GenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace speechdfa
