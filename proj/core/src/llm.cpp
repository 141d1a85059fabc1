#include "fedqa/llm.hpp"

#include <cstdlib>
#include <json.hpp>

#include "fedqa/error.hpp"
#include "fedqa/text.hpp"
#include "http.hpp"

namespace fedqa::llm {

using json = nlohmann::json;

namespace {

bool reports_context_overflow(const json& body) {
  if (!body.is_object() || !body.contains("error")) return false;
  const auto& error = body.at("error");
  if (!error.is_object()) return false;
  if (error.value("code", "") == "context_length_exceeded") return true;
  const std::string message = text::to_lower(error.value("message", ""));
  return message.find("maximum context length") != std::string::npos ||
         message.find("too many tokens") != std::string::npos;
}

}  // namespace

std::string remote_generate(const std::string& prompt, const RemoteLlmConfig& config, int max_output_tokens) {
  http::Headers headers{{"Accept", "application/json"}};
  if (!config.api_key_env.empty()) {
    const char* key = std::getenv(config.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw Error(ErrorCode::kProviderFailure, "LLM credential variable " + config.api_key_env + " is not set");
    }
    headers.emplace_back("Authorization", std::string("Bearer ") + key);
  }
  const json request = {
      {"model", config.model},
      {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", 0},
      {"max_tokens", max_output_tokens},
  };
  const auto response = http::post_json(http::parse_url(config.endpoint), request.dump(), headers, config.timeout);

  json body;
  try {
    body = json::parse(response.body);
  } catch (const json::parse_error&) {
    body = nullptr;
  }
  if (response.status == 413 || (response.status >= 400 && reports_context_overflow(body))) {
    throw Error(ErrorCode::kPromptTooLarge, "prompt rejected by the LLM provider as too large");
  }
  if (response.status != 200) {
    std::string detail = body.is_object() && body.contains("error") ? body.at("error").dump() : response.body;
    throw Error(ErrorCode::kProviderFailure, "LLM provider returned HTTP " + std::to_string(response.status) + ": " + detail);
  }
  try {
    return body.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kProviderFailure, std::string("LLM provider sent a malformed completion: ") + e.what());
  }
}

RemoteLlm::RemoteLlm(RemoteLlmConfig config) : config_(std::move(config)) { http::parse_url(config_.endpoint); }

std::string RemoteLlm::generate(const std::string& prompt, int max_output_tokens) const {
  return remote_generate(prompt, config_, max_output_tokens);
}

}  // namespace fedqa::llm
