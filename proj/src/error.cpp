#include "forestmap/error.hpp"

namespace forestmap {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::FileNotFound: return "FileNotFound";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::CorruptRaster: return "CorruptRaster";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidLabels: return "InvalidLabels";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::IoError: return "IoError";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::MissingHeatmap: return "MissingHeatmap";
    case Errc::TooFewRows: return "TooFewRows";
    case Errc::SingleClassTraining: return "SingleClassTraining";
    case Errc::NonFiniteFeature: return "NonFiniteFeature";
    case Errc::SingleClassScene: return "SingleClassScene";
    case Errc::EmptyMask: return "EmptyMask";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::RequiresNir: return "RequiresNir";
  }
  return "Unknown";
}

}  // namespace forestmap
