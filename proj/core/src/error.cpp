#include "fedqa/error.hpp"

namespace fedqa {

std::string_view code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kInvalidConfig: return "invalid_config";
    case ErrorCode::kDuplicateSourceId: return "duplicate_source_id";
    case ErrorCode::kInvalidDescriptor: return "invalid_descriptor";
    case ErrorCode::kUnknownSource: return "unknown_source";
    case ErrorCode::kEmptyQuery: return "empty_query";
    case ErrorCode::kNoSourcesEnabled: return "no_sources_enabled";
    case ErrorCode::kMappingFailure: return "mapping_failure";
    case ErrorCode::kMixedFacetCluster: return "mixed_facet_cluster";
    case ErrorCode::kEmptyCorpus: return "empty_corpus";
    case ErrorCode::kProviderFailure: return "provider_failure";
    case ErrorCode::kPromptTooLarge: return "prompt_too_large";
    case ErrorCode::kEmptyQuestion: return "empty_question";
    case ErrorCode::kSessionNotFound: return "session_not_found";
    case ErrorCode::kMalformedGeneration: return "malformed_generation";
    case ErrorCode::kKTooLarge: return "k_too_large";
    case ErrorCode::kEmptyLog: return "empty_log";
    case ErrorCode::kParseError: return "parse_error";
    case ErrorCode::kIoError: return "io_error";
  }
  return "unknown";
}

}  // namespace fedqa
