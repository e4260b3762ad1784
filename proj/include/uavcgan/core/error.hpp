#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace uavcgan {

/// Machine-readable failure categories. The CLI reports these names verbatim.
enum class ErrorKind {
  InvalidArgument,
  InvalidAntennaCount,
  DegenerateGeometry,
  ShapeMismatch,
  IllConditionedBeamPair,
  EmptyTrajectory,
  NoFeasibleTopology,
  DegenerateFleet,
  InsufficientResourceBlocks,
  NotStronglyConnected,
  TargetUnreachable,
  EmptyDataset,
  NumericalDivergence,
  UnknownBaseline,
  ConfigNotFound,
  ConfigInvalid,
  IoError,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidAntennaCount: return "InvalidAntennaCount";
    case ErrorKind::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::IllConditionedBeamPair: return "IllConditionedBeamPair";
    case ErrorKind::EmptyTrajectory: return "EmptyTrajectory";
    case ErrorKind::NoFeasibleTopology: return "NoFeasibleTopology";
    case ErrorKind::DegenerateFleet: return "DegenerateFleet";
    case ErrorKind::InsufficientResourceBlocks: return "InsufficientResourceBlocks";
    case ErrorKind::NotStronglyConnected: return "NotStronglyConnected";
    case ErrorKind::TargetUnreachable: return "TargetUnreachable";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::NumericalDivergence: return "NumericalDivergence";
    case ErrorKind::UnknownBaseline: return "UnknownBaseline";
    case ErrorKind::ConfigNotFound: return "ConfigNotFound";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace uavcgan
