#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace forestmap {

enum class Errc {
  FileNotFound,
  UnsupportedFormat,
  CorruptRaster,
  InvalidArgument,
  InvalidLabels,
  OutOfRange,
  IoError,
  DimensionMismatch,
  MissingHeatmap,
  TooFewRows,
  SingleClassTraining,
  NonFiniteFeature,
  SingleClassScene,
  EmptyMask,
  InvalidSpec,
  RequiresNir,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure the library reports carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace forestmap
