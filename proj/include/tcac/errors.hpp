#pragma once

#include <stdexcept>
#include <string>

namespace tcac {

enum class ErrorKind {
  InvalidArgument,
  DegeneratePeriodicity,
  NoPeriodicLength,
  MeshFailure,
  InvertedElement,
  NonCongruentFaces,
  ParseError,
  SingularMaterial,
  FactorizationFailure,
  NonConvergence,
  PointOutsideDomain,
  PointOnFilament,
  FitDivergence,
  OutOfValidityRange,
  ShapeMismatch,
  DivisionByZero,
  Io,
};

const char* to_string(ErrorKind kind);

/// All failures raised by the library carry a kind so callers (the CLI in
/// particular) can map them to exit codes without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DegeneratePeriodicity: return "DegeneratePeriodicity";
    case ErrorKind::NoPeriodicLength: return "NoPeriodicLength";
    case ErrorKind::MeshFailure: return "MeshFailure";
    case ErrorKind::InvertedElement: return "InvertedElement";
    case ErrorKind::NonCongruentFaces: return "NonCongruentFaces";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SingularMaterial: return "SingularMaterial";
    case ErrorKind::FactorizationFailure: return "FactorizationFailure";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::PointOutsideDomain: return "PointOutsideDomain";
    case ErrorKind::PointOnFilament: return "PointOnFilament";
    case ErrorKind::FitDivergence: return "FitDivergence";
    case ErrorKind::OutOfValidityRange: return "OutOfValidityRange";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace tcac
