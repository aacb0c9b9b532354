#pragma once

#include <stdexcept>
#include <string>

namespace poro {

// Exit codes used by the CLI: 0 success, 2 config, 3 geometry, 4 solver, 5 io.
enum class ErrorClass : int { Config = 2, Geometry = 3, Solver = 4, Io = 5 };

/// Base of all toolkit errors. `kind()` is the stable machine-readable name
/// printed by the CLI on failure.
class Error : public std::runtime_error {
public:
  Error(ErrorClass cls, std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), cls_(cls), kind_(std::move(kind)) {}
  ErrorClass error_class() const noexcept { return cls_; }
  int exit_code() const noexcept { return static_cast<int>(cls_); }
  const std::string& kind() const noexcept { return kind_; }

private:
  ErrorClass cls_;
  std::string kind_;
};

#define PORO_DEFINE_ERROR(NAME, CLASS)                                   \
  class NAME : public Error {                                            \
  public:                                                                \
    explicit NAME(const std::string& what) : Error(CLASS, #NAME, what) {} \
  }

// Geometry construction
PORO_DEFINE_ERROR(EmptyPhase, ErrorClass::Geometry);
PORO_DEFINE_ERROR(DisconnectedSolid, ErrorClass::Geometry);
PORO_DEFINE_ERROR(BadMaterial, ErrorClass::Geometry);
PORO_DEFINE_ERROR(GeometryError, ErrorClass::Geometry);

// Assembly and solvers
PORO_DEFINE_ERROR(SingularBeyondTranslations, ErrorClass::Solver);
PORO_DEFINE_ERROR(SolverBreakdown, ErrorClass::Solver);
PORO_DEFINE_ERROR(Incompatible, ErrorClass::Solver);
PORO_DEFINE_ERROR(NonCoercive, ErrorClass::Solver);
PORO_DEFINE_ERROR(MissingSolutions, ErrorClass::Solver);
PORO_DEFINE_ERROR(InsufficientSamples, ErrorClass::Solver);
PORO_DEFINE_ERROR(OutOfRegion, ErrorClass::Solver);
PORO_DEFINE_ERROR(MissingK, ErrorClass::Solver);
PORO_DEFINE_ERROR(ContourMismatch, ErrorClass::Solver);
PORO_DEFINE_ERROR(MeshMismatch, ErrorClass::Solver);

// Front end
PORO_DEFINE_ERROR(ConfigError, ErrorClass::Config);
PORO_DEFINE_ERROR(IoError, ErrorClass::Io);

#undef PORO_DEFINE_ERROR

} // namespace poro
