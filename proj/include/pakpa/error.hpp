#pragma once

#include <stdexcept>
#include <string>

namespace pakpa {

enum class ErrorCode {
  EmptyText,
  DuplicateId,
  ParseError,
  MissingField,
  TemplateMismatch,
  EmptyCluster,
  NetworkError,
  HttpError,
  AuthMissing,
  MalformedJson,
  UnknownPolarity,
  EmptyGeneration,
  IdMismatch,
  DimensionMismatch,
  UnknownComment,
  EmptyInput,
  DisconnectedGraph,
  NoComparisons,
  LengthMismatch,
  NoVotes,
  EmptyCategory,
  MissingArtifact,
  ConfigError,
  IoError,
};

const char* error_code_name(ErrorCode code);

/// Exception carrying a typed error code; the message holds the context
/// (line number, field name, HTTP status, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  Error(ErrorCode code, const std::string& message, int http_status)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        http_status_(http_status) {}

  ErrorCode code() const { return code_; }

  /// HTTP status behind an HttpError; 0 everywhere else.
  int http_status() const { return http_status_; }

 private:
  ErrorCode code_;
  int http_status_ = 0;
};

}  // namespace pakpa
