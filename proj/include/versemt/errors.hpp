#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace versemt {

// Malformed input that can be pinned to a position in the raw byte stream.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

// Well-formed input that violates a data contract: duplicate keys, empty
// corpora, size mismatches, unknown tokens, out-of-range indices.
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite values encountered during training; callers should halt.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

class CheckpointError : public std::runtime_error {
public:
  enum class Kind { bad_magic, version_mismatch, truncated, checksum_mismatch };

  CheckpointError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

}  // namespace versemt
