#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nullkdv {

/// Failure classes raised by the library. The CLI maps each one to a
/// machine-readable name and an exit code.
enum class ErrorKind {
  InvalidArgument,
  ParseError,
  IoError,
  NotExact,
  NotGradient,
  JetTooShort,
  NotAdmissible,
  FrameDrift,
  NotPseudoArc,
  FlexPoint,
  NotNull,
  Instability,
  NearPole,
  PoleEncountered,
  DomainError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::NotExact: return "NotExact";
    case ErrorKind::NotGradient: return "NotGradient";
    case ErrorKind::JetTooShort: return "JetTooShort";
    case ErrorKind::NotAdmissible: return "NotAdmissible";
    case ErrorKind::FrameDrift: return "FrameDrift";
    case ErrorKind::NotPseudoArc: return "NotPseudoArc";
    case ErrorKind::FlexPoint: return "FlexPoint";
    case ErrorKind::NotNull: return "NotNull";
    case ErrorKind::Instability: return "Instability";
    case ErrorKind::NearPole: return "NearPole";
    case ErrorKind::PoleEncountered: return "PoleEncountered";
    case ErrorKind::DomainError: return "DomainError";
  }
  return "Unknown";
}

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

}  // namespace nullkdv
