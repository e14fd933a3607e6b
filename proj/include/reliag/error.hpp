#pragma once

#include <stdexcept>
#include <string>

namespace reliag {

enum class ErrorCode {
  RejectRange,           // value outside its documented domain
  DimensionMismatch,     // matrix/vector shapes disagree
  SourceIndexOutOfRange, // cluster references a source the weight vector lacks
  DegenerateMatrix,      // every cell IDK, nothing to estimate
  DegenerateVariance,    // zero variance, correlation undefined
  LengthMismatch,        // paired sequences of different length
  ProviderFailure,       // transport/protocol error, distinct from IDK
  ConfigParse,           // unreadable or inconsistent configuration
  IoError,               // file system trouble
  Internal,              // invariant violation inside the library
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Transport failure while probing a source; carries the offending source so
// cost accounting can tell failures apart from irrelevance.
class ProviderFailure : public Error {
 public:
  ProviderFailure(int source_id, const std::string& message)
      : Error(ErrorCode::ProviderFailure,
              "source " + std::to_string(source_id) + ": " + message),
        source_id_(source_id) {}

  int source_id() const noexcept { return source_id_; }

 private:
  int source_id_;
};

}  // namespace reliag
