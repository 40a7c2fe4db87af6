#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pssi {

enum class ErrorCode {
  FileNotFound,
  DecodeError,
  IoError,
  DimensionMismatch,
  ConflictError,
  OutOfBounds,
  InvalidArgument,
  InvalidK,
  EmptySegment,
  BinMismatch,
  MissingJointHistogram,
  SeedConflict,
  EmptySeeds,
  DisconnectedGraph,
  TooLarge,
  SingleSegment,
  DatasetLayoutError,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the library is an Error carrying a code, so
// callers (CLI exit paths, HTTP status mapping) can dispatch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct Pixel {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

// Raised when a pixel would be scribbled as both foreground and background.
class ConflictError : public Error {
 public:
  ConflictError(Pixel pixel, const std::string& what)
      : Error(ErrorCode::ConflictError, what), pixel_(pixel) {}

  Pixel pixel() const noexcept { return pixel_; }

 private:
  Pixel pixel_;
};

}  // namespace pssi
