#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hgr {

enum class ErrorKind {
  MissingPoint,
  NonFiniteCoordinate,
  DegenerateBone,
  TrackTooShort,
  BadFilterParams,
  EmptySequence,
  PlanMismatch,
  ShapeMismatch,
  BadLabel,
  MalformedFrame,
  MissingListFile,
  BadHeader,
  EmptyTestSet,
  DimMismatch,
  NanLoss,
  SplitOverlap,
  BadConfig,
  Io,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MissingPoint: return "MissingPoint";
    case ErrorKind::NonFiniteCoordinate: return "NonFiniteCoordinate";
    case ErrorKind::DegenerateBone: return "DegenerateBone";
    case ErrorKind::TrackTooShort: return "TrackTooShort";
    case ErrorKind::BadFilterParams: return "BadFilterParams";
    case ErrorKind::EmptySequence: return "EmptySequence";
    case ErrorKind::PlanMismatch: return "PlanMismatch";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::BadLabel: return "BadLabel";
    case ErrorKind::MalformedFrame: return "MalformedFrame";
    case ErrorKind::MissingListFile: return "MissingListFile";
    case ErrorKind::BadHeader: return "BadHeader";
    case ErrorKind::EmptyTestSet: return "EmptyTestSet";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::NanLoss: return "NanLoss";
    case ErrorKind::SplitOverlap: return "SplitOverlap";
    case ErrorKind::BadConfig: return "BadConfig";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Single exception type for the whole library. `kind()` is what callers
/// branch on; `what()` carries "<Kind>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
        kind_(kind),
        detail_(detail) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace hgr
