#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace roughclus {

/// Invalid user-supplied parameter (grid size, thresholds, bin counts).
class ParameterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data violates a precondition: malformed file contents, empty
/// targets, unknown ids, degenerate training sets.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed PPM stream. Carries the byte offset at which parsing failed.
class PpmFormatError : public DataError {
 public:
  PpmFormatError(const std::string& what, std::size_t offset)
      : DataError(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace roughclus
