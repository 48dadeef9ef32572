#pragma once

#include <chrono>
#include <functional>
#include <string>

#include "libmig/llm/prompt.hpp"

namespace libmig::llm {

/// An OpenAI-compatible chat-completions endpoint.
struct Endpoint {
  std::string base_url;                   // e.g. "https://api.openai.com/v1"
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";  // empty or unset: no Authorization header
  int max_retries = 5;
  std::chrono::milliseconds initial_backoff{1000};
  std::chrono::milliseconds max_backoff{30000};
  std::chrono::seconds timeout{600};
};

/// Sends the rendered prompt as a single user message at temperature 0 and
/// returns the assistant text. HTTP 429 and 5xx are retried with exponential
/// backoff (honouring Retry-After up to max_backoff).
/// Throws Error with kind EndpointUnreachable, RateLimited, ContextOverflow or
/// EmptyResponse.
std::string request_migration(const Endpoint& endpoint, const MigrationPrompt& prompt);

/// Seam for the pipeline and tests.
using CompletionFn = std::function<std::string(const MigrationPrompt&)>;

CompletionFn make_http_completion(Endpoint endpoint);

}  // namespace libmig::llm
