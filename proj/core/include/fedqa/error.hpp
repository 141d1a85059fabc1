#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fedqa {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidConfig,
  kDuplicateSourceId,
  kInvalidDescriptor,
  kUnknownSource,
  kEmptyQuery,
  kNoSourcesEnabled,
  kMappingFailure,
  kMixedFacetCluster,
  kEmptyCorpus,
  kProviderFailure,
  kPromptTooLarge,
  kEmptyQuestion,
  kSessionNotFound,
  kMalformedGeneration,
  kKTooLarge,
  kEmptyLog,
  kParseError,
  kIoError,
};

/// Machine-readable snake_case name, used verbatim in API error bodies.
std::string_view code_name(ErrorCode code) noexcept;

/// The single exception type thrown by the library. Callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fedqa
