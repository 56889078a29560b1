#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>
#include <nlohmann/json.hpp>

#include "emogame/gateway.hpp"

namespace emogame {

using nlohmann::json;

LiveSettings live_settings_from_env() {
  LiveSettings settings;
  auto env = [](const char* name) -> std::string {
    const char* value = std::getenv(name);
    return value ? value : "";
  };
  settings.api_key = env("EMOGAME_API_KEY");
  if (settings.api_key.empty()) settings.api_key = env("OPENAI_API_KEY");
  if (auto endpoint = env("EMOGAME_ENDPOINT"); !endpoint.empty()) settings.endpoint = endpoint;
  return settings;
}

LiveBackend::LiveBackend(LiveSettings settings) : settings_(std::move(settings)) {
  const auto scheme_end = settings_.endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::ConfigError, "endpoint must be an http(s) URL: " + settings_.endpoint);
  }
  const auto path_start = settings_.endpoint.find('/', scheme_end + 3);
  base_ = settings_.endpoint.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : settings_.endpoint.substr(path_start);
}

std::string LiveBackend::send(const CompletionRequest& request) {
  if (settings_.api_key.empty()) {
    throw Error(ErrorCode::AuthError, "no API credential in EMOGAME_API_KEY or OPENAI_API_KEY");
  }
  json body{{"model", request.model_id}, {"temperature", request.temperature}};
  auto& messages = body["messages"] = json::array();
  for (const auto& message : request.messages) {
    messages.push_back({{"role", to_string(message.role)}, {"content", message.content}});
  }

  httplib::Client client(base_);
  client.set_connection_timeout(settings_.timeout);
  client.set_read_timeout(settings_.timeout);
  client.set_write_timeout(settings_.timeout);
  client.set_bearer_token_auth(settings_.api_key);

  auto result = client.Post(path_, body.dump(), "application/json");
  if (!result) {
    throw TransportFailure("request to " + base_ + path_ + " failed: " +
                               httplib::to_string(result.error()),
                           true);
  }
  const int status = result->status;
  if (status == 401 || status == 403) {
    throw Error(ErrorCode::AuthError, "endpoint rejected the credential (HTTP " +
                                          std::to_string(status) + ")");
  }
  if (status == 429 || status >= 500) {
    throw TransportFailure("HTTP " + std::to_string(status), true);
  }
  if (status != 200) {
    throw TransportFailure("HTTP " + std::to_string(status) + ": " + result->body, false);
  }
  try {
    const auto reply = json::parse(result->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw TransportFailure(std::string("malformed completion response: ") + e.what(), false);
  }
}

}  // namespace emogame
