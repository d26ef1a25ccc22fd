#include "hab/common/error.h"

namespace hab {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kUnsupportedLevel: return "UnsupportedLevel";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kMalformed: return "Malformed";
    case ErrorCode::kNotSatisfied: return "NotSatisfied";
    case ErrorCode::kIntegrityFailure: return "IntegrityFailure";
    case ErrorCode::kInsufficientShares: return "InsufficientShares";
    case ErrorCode::kLabelMismatch: return "LabelMismatch";
    case ErrorCode::kInconsistentParams: return "InconsistentParams";
    case ErrorCode::kDuplicateX: return "DuplicateX";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kUnknownCloud: return "UnknownCloud";
    case ErrorCode::kBackendFailure: return "BackendFailure";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kInsufficientLiveShares: return "InsufficientLiveShares";
    case ErrorCode::kBadCredentials: return "BadCredentials";
    case ErrorCode::kAccountLocked: return "AccountLocked";
    case ErrorCode::kUnauthenticated: return "Unauthenticated";
    case ErrorCode::kForbidden: return "Forbidden";
    case ErrorCode::kNotOwner: return "NotOwner";
    case ErrorCode::kUnknownFile: return "UnknownFile";
    case ErrorCode::kAccessDenied: return "AccessDenied";
    case ErrorCode::kInvalidGrant: return "InvalidGrant";
    case ErrorCode::kConflict: return "Conflict";
    case ErrorCode::kStorageFailure: return "StorageFailure";
    case ErrorCode::kAuditFailure: return "AuditFailure";
  }
  return "Unknown";
}

}  // namespace hab
