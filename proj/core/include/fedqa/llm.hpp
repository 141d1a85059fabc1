#pragma once

#include <chrono>
#include <string>

namespace fedqa::llm {

/// Text generation backend. Implementations must tolerate concurrent calls.
class LlmProvider {
 public:
  virtual ~LlmProvider() = default;
  /// Throws Error(kProviderFailure) or Error(kPromptTooLarge).
  virtual std::string generate(const std::string& prompt, int max_output_tokens) const = 0;
};

struct RemoteLlmConfig {
  /// Full chat-completions URL, e.g. https://api.openai.com/v1/chat/completions
  std::string endpoint;
  std::string model = "gpt-3.5-turbo";
  /// Environment variable holding the API key; empty sends no credential.
  std::string api_key_env = "OPENAI_API_KEY";
  std::chrono::duration<double> timeout{60.0};
};

/// One chat-completion request with the prompt as a single user message and
/// temperature 0. Returns the first choice's message content. A 413 or an
/// error body reporting an exceeded context length maps to kPromptTooLarge.
std::string remote_generate(const std::string& prompt, const RemoteLlmConfig& config, int max_output_tokens = 512);

class RemoteLlm final : public LlmProvider {
 public:
  explicit RemoteLlm(RemoteLlmConfig config);
  std::string generate(const std::string& prompt, int max_output_tokens) const override;

 private:
  RemoteLlmConfig config_;
};

}  // namespace fedqa::llm
