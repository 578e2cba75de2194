#pragma once

#include <stdexcept>
#include <string>

namespace walkcover {

// A count threshold above the grid's saturation cap; counts beyond the cap are unknowable.
struct InvalidThreshold : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A walk ran past its caller-supplied step budget. The sample is truncated.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SnapshotError : std::runtime_error {
  enum class Kind { bad_magic, version_mismatch, truncated, checksum_mismatch, malformed };

  SnapshotError(Kind kind, const std::string& what) : std::runtime_error(what), kind(kind) {}

  Kind kind;
};

struct SolverError : std::runtime_error {
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}

  double residual;
};

// 1 + (e^lambda - 1) G(0,0) <= 0: the exponential moment of the local time is infinite.
struct DivergentTransform : std::domain_error {
  using std::domain_error::domain_error;
};

struct PreconditionViolated : std::domain_error {
  using std::domain_error::domain_error;
};

// A stored path ended before the requested number of excursions completed.
struct InsufficientPath : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IncompleteTrace : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InsufficientData : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct MalformedFile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace walkcover
