#pragma once

#include <stdexcept>
#include <string>

namespace anvar {

// Error taxonomy mirrored by the C API status codes.
enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  SeriesTooShort,
  SolverFailure,
  Divergence,
  NumericFailure,
  Io,
  BadConfig,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

struct InvalidArgumentError : Error {
  explicit InvalidArgumentError(const std::string& w) : Error(ErrorKind::InvalidArgument, w) {}
};
struct DimensionError : Error {
  explicit DimensionError(const std::string& w) : Error(ErrorKind::DimensionMismatch, w) {}
};
struct SeriesTooShortError : Error {
  explicit SeriesTooShortError(const std::string& w) : Error(ErrorKind::SeriesTooShort, w) {}
};
struct SolverError : Error {
  explicit SolverError(const std::string& w) : Error(ErrorKind::SolverFailure, w) {}
};
struct DivergenceError : Error {
  DivergenceError(const std::string& w, long step) : Error(ErrorKind::Divergence, w), step(step) {}
  long step;
};
struct NumericError : Error {
  explicit NumericError(const std::string& w) : Error(ErrorKind::NumericFailure, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorKind::Io, w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::BadConfig, w) {}
};

} // namespace anvar
