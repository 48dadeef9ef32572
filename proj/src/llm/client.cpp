#include "libmig/llm/client.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "libmig/error.hpp"

namespace libmig::llm {

namespace {

using nlohmann::json;

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;    // without trailing '/'
};

Url split_url(const std::string& base) {
  auto scheme = base.find("://");
  if (scheme == std::string::npos)
    throw Error(ErrorKind::Validation, "api base url needs a scheme: '" + base + "'");
  auto slash = base.find('/', scheme + 3);
  Url u{base.substr(0, slash), slash == std::string::npos ? "" : base.substr(slash)};
  while (!u.path.empty() && u.path.back() == '/') u.path.pop_back();
  return u;
}

bool is_context_overflow(const std::string& body) {
  std::string code, message;
  try {
    auto j = json::parse(body);
    const auto& err = j.contains("error") ? j["error"] : j;
    if (err.is_object()) {
      if (err.contains("code") && err["code"].is_string()) code = err["code"].get<std::string>();
      if (err.contains("message") && err["message"].is_string()) message = err["message"].get<std::string>();
    } else if (err.is_string()) {
      message = err.get<std::string>();
    }
  } catch (const json::exception&) {
    message = body;
  }
  std::transform(message.begin(), message.end(), message.begin(), [](unsigned char c) { return std::tolower(c); });
  return code == "context_length_exceeded" || message.find("context length") != std::string::npos ||
         message.find("context_length") != std::string::npos ||
         message.find("maximum context") != std::string::npos;
}

std::string assistant_text(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::EmptyResponse, std::string("unparsable completion: ") + e.what());
  }
  const auto& choices = j.value("choices", json::array());
  if (!choices.is_array() || choices.empty()) throw Error(ErrorKind::EmptyResponse, "completion has no choices");
  const auto& msg = choices[0].value("message", json::object());
  auto content = msg.value("content", json());
  if (!content.is_string() || content.get<std::string>().empty())
    throw Error(ErrorKind::EmptyResponse, "completion has empty content");
  return content.get<std::string>();
}

}  // namespace

std::string request_migration(const Endpoint& endpoint, const MigrationPrompt& prompt) {
  auto url = split_url(endpoint.base_url);
  httplib::Client client(url.origin);
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(endpoint.timeout);
  client.set_write_timeout(endpoint.timeout);

  httplib::Headers headers;
  if (!endpoint.api_key_env.empty()) {
    if (const char* key = std::getenv(endpoint.api_key_env.c_str()); key && *key)
      headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  json body = {
      {"model", endpoint.model},
      {"temperature", 0},
      {"messages", json::array({{{"role", "user"}, {"content", prompt.rendered}}})},
  };
  auto payload = body.dump();
  auto path = url.path + "/chat/completions";

  auto backoff = endpoint.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    auto res = client.Post(path, headers, payload, "application/json");
    bool last = attempt >= endpoint.max_retries;
    std::chrono::milliseconds wait = backoff;

    if (!res) {
      if (last)
        throw Error(ErrorKind::EndpointUnreachable,
                    fmt::format("{}: {}", endpoint.base_url, httplib::to_string(res.error())));
    } else if (res->status >= 200 && res->status < 300) {
      return assistant_text(res->body);
    } else if (is_context_overflow(res->body)) {
      throw Error(ErrorKind::ContextOverflow, fmt::format("HTTP {}: {}", res->status, res->body));
    } else if (res->status == 429 || res->status >= 500) {
      if (last) {
        auto kind = res->status == 429 ? ErrorKind::RateLimited : ErrorKind::EndpointUnreachable;
        throw Error(kind, fmt::format("HTTP {} after {} retries", res->status, attempt));
      }
      if (res->has_header("Retry-After")) {
        try {
          wait = std::chrono::seconds(std::stol(res->get_header_value("Retry-After")));
        } catch (const std::exception&) {
        }
      }
    } else {
      throw Error(ErrorKind::EndpointUnreachable, fmt::format("HTTP {}: {}", res->status, res->body));
    }

    wait = std::min(wait, endpoint.max_backoff);
    spdlog::debug("[llmmig] retry {} in {} ms", attempt + 1, wait.count());
    std::this_thread::sleep_for(wait);
    backoff = std::min(backoff * 2, endpoint.max_backoff);
  }
}

CompletionFn make_http_completion(Endpoint endpoint) {
  return [endpoint = std::move(endpoint)](const MigrationPrompt& p) { return request_migration(endpoint, p); };
}

}  // namespace libmig::llm
