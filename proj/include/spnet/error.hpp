#pragma once

#include <stdexcept>
#include <string>

namespace spnet {

/// Base of every library error. `kind()` names the failure for diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Malformed input.
struct InputError : Error {
  using Error::Error;
};
/// Well-formed input that violates a semantic precondition.
struct SemanticError : Error {
  using Error::Error;
};

struct ParseError : InputError {
  explicit ParseError(const std::string& w) : InputError("ParseError", w) {}
};
struct SyntaxError : InputError {
  explicit SyntaxError(const std::string& w) : InputError("SyntaxError", w) {}
};
struct IdOutOfRange : InputError {
  explicit IdOutOfRange(const std::string& w) : InputError("IdOutOfRange", w) {}
};
struct MissingDuration : InputError {
  explicit MissingDuration(const std::string& w) : InputError("MissingDuration", w) {}
};

struct CycleError : SemanticError {
  explicit CycleError(const std::string& w) : SemanticError("CycleError", w) {}
};
struct NotAnExtension : SemanticError {
  explicit NotAnExtension(const std::string& w) : SemanticError("NotAnExtension", w) {}
};
struct OverlappingActivities : SemanticError {
  explicit OverlappingActivities(const std::string& w) : SemanticError("OverlappingActivities", w) {}
};
struct DuplicateActivity : SemanticError {
  explicit DuplicateActivity(const std::string& w) : SemanticError("DuplicateActivity", w) {}
};
struct NotSeriesParallel : SemanticError {
  explicit NotSeriesParallel(const std::string& w) : SemanticError("NotSeriesParallel", w) {}
};
struct NotAntichain : SemanticError {
  explicit NotAntichain(const std::string& w) : SemanticError("NotAntichain", w) {}
};
struct SpecTooNarrow : SemanticError {
  explicit SpecTooNarrow(const std::string& w) : SemanticError("SpecTooNarrow", w) {}
};
struct InvalidWorkload : SemanticError {
  explicit InvalidWorkload(const std::string& w) : SemanticError("InvalidWorkload", w) {}
};
struct TripleNotFound : SemanticError {
  explicit TripleNotFound(const std::string& w) : SemanticError("TripleNotFound", w) {}
};
struct PreconditionViolation : SemanticError {
  explicit PreconditionViolation(const std::string& w) : SemanticError("PreconditionViolation", w) {}
};

/// An enumeration cap was hit.
struct SizeLimitExceeded : Error {
  explicit SizeLimitExceeded(const std::string& w) : Error("SizeLimitExceeded", w) {}
};

}  // namespace spnet
