#ifndef AVGUARD_ERRORS_HPP
#define AVGUARD_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace avguard {

// Machine-checkable error categories used across the vetting pipeline.
enum class ErrorCode {
  MalformedXml,
  UnknownResource,
  MissingField,
  DuplicateAppId,
  SyntaxError,
  UnknownMessageKind,
  UnknownField,
  ConfigInvalid,
  InsufficientData,
  DegenerateVariance,
  NonFiniteWeight,
  ZeroHits,
  NoMatchingTraces,
  PackageUnreadable,
  NotApproved,
  BadSignature,
  Tampered,
  Conflict,
  IoError,
};

const char* error_code_name(ErrorCode code);

class AvError : public std::runtime_error {
 public:
  AvError(ErrorCode code, std::string message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

enum class Severity { warn, reject };

const char* severity_name(Severity s);

// One diagnostic produced by a validation or analysis pass. Analyses return
// complete finding lists instead of throwing on the first problem.
struct Finding {
  std::string rule;                   // stable rule id, e.g. "duplicate_resource"
  Severity severity = Severity::reject;
  std::string path;                   // field path or program location
  std::string evidence;               // human-readable detail
  std::vector<std::string> witness;   // event/block sequence when applicable

  bool operator==(const Finding&) const = default;
};

std::string format_finding(const Finding& f);

}  // namespace avguard

#endif  // AVGUARD_ERRORS_HPP
