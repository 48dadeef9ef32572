#include "libmig/error.hpp"

namespace libmig {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::NoVersionAvailable: return "NoVersionAvailable";
    case ErrorKind::PackageNotFound: return "PackageNotFound";
    case ErrorKind::InterpreterMissing: return "InterpreterMissing";
    case ErrorKind::InstallFailed: return "InstallFailed";
    case ErrorKind::RunnerCrashed: return "RunnerCrashed";
    case ErrorKind::NoTestsCollected: return "NoTestsCollected";
    case ErrorKind::MalformedArchive: return "MalformedArchive";
    case ErrorKind::NoImportNames: return "NoImportNames";
    case ErrorKind::SyntaxUnparsable: return "SyntaxUnparsable";
    case ErrorKind::MalformedProfile: return "MalformedProfile";
    case ErrorKind::EndpointUnreachable: return "EndpointUnreachable";
    case ErrorKind::RateLimited: return "RateLimited";
    case ErrorKind::ContextOverflow: return "ContextOverflow";
    case ErrorKind::EmptyResponse: return "EmptyResponse";
    case ErrorKind::NoCodeBlock: return "NoCodeBlock";
    case ErrorKind::WriteFailed: return "WriteFailed";
    case ErrorKind::InsertOutOfRange: return "InsertOutOfRange";
    case ErrorKind::NoBaselinePassingTests: return "NoBaselinePassingTests";
    case ErrorKind::ZeroTotal: return "ZeroTotal";
    case ErrorKind::Io: return "IoError";
  }
  return "UnknownError";
}

}  // namespace libmig
