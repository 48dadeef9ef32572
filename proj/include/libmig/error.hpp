#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace libmig {

enum class ErrorKind {
  Validation,
  // prep
  NoVersionAvailable,
  PackageNotFound,
  InterpreterMissing,
  InstallFailed,
  RunnerCrashed,
  NoTestsCollected,
  // discovery
  MalformedArchive,
  NoImportNames,
  SyntaxUnparsable,
  MalformedProfile,
  // llm
  EndpointUnreachable,
  RateLimited,
  ContextOverflow,
  EmptyResponse,
  NoCodeBlock,
  WriteFailed,
  // merge
  InsertOutOfRange,
  // report
  NoBaselinePassingTests,
  ZeroTotal,
  // generic
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (and the CLI
/// exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// InstallFailed keeps the package the installer choked on and its output.
class InstallError : public Error {
 public:
  InstallError(std::string package, std::string output)
      : Error(ErrorKind::InstallFailed, "failed to install '" + package + "'"),
        package_(std::move(package)),
        output_(std::move(output)) {}

  const std::string& package() const noexcept { return package_; }
  const std::string& output() const noexcept { return output_; }

 private:
  std::string package_;
  std::string output_;
};

/// MalformedProfile carries the 1-based line of the offending directive.
class ProfileError : public Error {
 public:
  ProfileError(std::size_t line, const std::string& message)
      : Error(ErrorKind::MalformedProfile,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace libmig
