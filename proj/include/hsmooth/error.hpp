#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hsmooth {

// All library failures derive from Error. code() is a stable, machine-readable
// tag used by the CLI when it reports failures as JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class InvalidGridError : public Error {
 public:
  explicit InvalidGridError(const std::string& m) : Error("invalid-grid", m) {}
};

class InvalidOrderError : public Error {
 public:
  explicit InvalidOrderError(const std::string& m) : Error("invalid-order", m) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& m) : Error("dimension", m) {}
};

// Raised when a Cholesky pivot is not positive. pivot() is an index into the
// original (unpermuted) matrix.
class NotSpdError : public Error {
 public:
  NotSpdError(std::size_t pivot, const std::string& m)
      : Error("not-spd", m), pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

class KernelError : public Error {
 public:
  explicit KernelError(const std::string& m) : Error("kernel-construction", m) {}
};

class DesignError : public Error {
 public:
  explicit DesignError(const std::string& m) : Error("design", m) {}
};

class AnchoringError : public Error {
 public:
  explicit AnchoringError(const std::string& m)
      : Error("anchoring-insufficient", m) {}
};

class PriorError : public Error {
 public:
  explicit PriorError(const std::string& m) : Error("invalid-prior", m) {}
};

class CurveError : public Error {
 public:
  explicit CurveError(const std::string& m) : Error("curve", m) {}
};

class ChainError : public Error {
 public:
  ChainError(long iteration, const std::string& m)
      : Error("chain", m), iteration_(iteration) {}
  long iteration() const noexcept { return iteration_; }

 private:
  long iteration_;
};

class MetricError : public Error {
 public:
  explicit MetricError(const std::string& m) : Error("undefined-metric", m) {}
};

class TooFewDrawsError : public Error {
 public:
  explicit TooFewDrawsError(const std::string& m) : Error("too-few-draws", m) {}
};

class IngestError : public Error {
 public:
  explicit IngestError(const std::string& m) : Error("ingestion", m) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error("config", m) {}
};

}  // namespace hsmooth
