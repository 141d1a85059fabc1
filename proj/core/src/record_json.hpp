#pragma once

// ScholarlyRecord <-> JSON, shared by the session journal and the API.

#include <json.hpp>

#include "fedqa/taxonomy.hpp"

namespace fedqa::detail {

using ordered_json = nlohmann::ordered_json;

ordered_json record_to_json(const taxonomy::ScholarlyRecord& record);
/// Throws Error(kParseError).
taxonomy::ScholarlyRecord record_from_json(const nlohmann::json& j);

}  // namespace fedqa::detail
