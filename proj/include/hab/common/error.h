#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hab {

enum class ErrorCode {
  kInvalidArgument,
  kUnsupportedLevel,
  kParseError,
  kMalformed,
  kNotSatisfied,
  kIntegrityFailure,
  kInsufficientShares,
  kLabelMismatch,
  kInconsistentParams,
  kDuplicateX,
  kDuplicateId,
  kUnknownCloud,
  kBackendFailure,
  kNotFound,
  kInsufficientLiveShares,
  kBadCredentials,
  kAccountLocked,
  kUnauthenticated,
  kForbidden,
  kNotOwner,
  kUnknownFile,
  kAccessDenied,
  kInvalidGrant,
  kConflict,
  kStorageFailure,
  kAuditFailure,
};

std::string_view error_code_name(ErrorCode code);

/// Base exception for every failure surfaced by the library. Callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Policy text rejected by the parser; offset() is the byte position of the problem.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : Error(ErrorCode::kParseError, message + " at position " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace hab
