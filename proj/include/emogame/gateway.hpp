#pragma once

#include <chrono>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emogame/game.hpp"
#include "emogame/strategy.hpp"

namespace emogame {

enum class ChatRole { System, User, Assistant };

std::string_view to_string(ChatRole role);

struct ChatMessage {
  ChatRole role = ChatRole::User;
  std::string content;
  bool operator==(const ChatMessage&) const = default;
};

enum class TurnKind { Move, Split, Accept, EmotionProbe, OuterProbe, Scratchpad };

std::string_view to_string(TurnKind kind);
TurnKind parse_turn_kind(std::string_view name);

// Side-channel describing the turn being asked. Scripted backends read it;
// it is never sent over the wire and never part of the request digest.
struct TurnContext {
  TurnKind kind = TurnKind::Move;
  std::string match_id;
  GameKind game = GameKind::PrisonersDilemma;
  int round = 0;
  int rounds = 0;
  MoveLabels labels;
  std::optional<StrategyKind> opponent;
  std::vector<RoundOutcome> history;
  long long total_sum = 0;
  std::optional<Split> offer;
};

struct CompletionRequest {
  std::string model_id = "gpt-3.5-turbo-0125";
  double temperature = 0.0;
  std::vector<ChatMessage> messages;
  int max_retries = 3;
  TurnContext context;
};

// Throws ConfigError unless the first message is System and none is empty.
void validate_request(const CompletionRequest& request);

// SHA-256 over the role/content sequence.
std::string request_digest(const std::vector<ChatMessage>& messages);

struct CallRecord {
  std::string match_id;
  int seq = 0;  // position within the match, assigned by the log
  TurnKind kind = TurnKind::Move;
  std::string model_id;
  std::string digest;
  std::string response;
  double latency_ms = 0.0;
  int attempt = 1;
};

// Append-only log of completed calls. Appends are thread-safe; ordering
// within a match follows call order. Optionally mirrors to a JSONL file.
class CallLog {
 public:
  CallLog() = default;
  explicit CallLog(const std::filesystem::path& sink);

  CallRecord append(CallRecord record);
  std::vector<CallRecord> records() const;
  std::vector<CallRecord> records_for(std::string_view match_id) const;

  void write_jsonl(const std::filesystem::path& path) const;
  static std::vector<CallRecord> read_jsonl(const std::filesystem::path& path);

 private:
  mutable std::mutex mutex_;
  std::vector<CallRecord> records_;
  std::map<std::string, int, std::less<>> next_seq_;
  std::optional<std::filesystem::path> sink_;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string send(const CompletionRequest& request) = 0;
  virtual std::string name() const = 0;
};

// Transport-level failure raised by backends; `retryable` marks failures the
// gateway may retry (timeouts, 429, 5xx).
class TransportFailure : public Error {
 public:
  TransportFailure(const std::string& message, bool retryable)
      : Error(ErrorCode::TransportError, message), retryable_(retryable) {}
  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

struct RetryPolicy {
  std::chrono::milliseconds base_delay{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{30'000};
};

class Gateway {
 public:
  Gateway(std::shared_ptr<Backend> backend, std::shared_ptr<CallLog> log,
          RetryPolicy retry = {}, bool deterministic = false);

  // Sends the request, retrying transient failures up to request.max_retries
  // times with exponential backoff. Successful calls are logged once.
  std::string complete(const CompletionRequest& request);

  const std::shared_ptr<CallLog>& log() const { return log_; }
  Backend& backend() { return *backend_; }

 private:
  std::shared_ptr<Backend> backend_;
  std::shared_ptr<CallLog> log_;
  RetryPolicy retry_;
  bool deterministic_;
};

// ---- scripted mock ----

using MockRule = std::function<std::string(const CompletionRequest&)>;

struct MockPolicy {
  std::map<TurnKind, MockRule> rules;
  std::string description;
};

class MockBackend : public Backend {
 public:
  explicit MockBackend(MockPolicy policy) : policy_(std::move(policy)) {}
  std::string send(const CompletionRequest& request) override;  // PolicyGap
  std::string name() const override { return "mock:" + policy_.description; }

 private:
  MockPolicy policy_;
};

// Builds a policy from '+'-joined rules, e.g.
//   "always-defect", "best-response+emotion=happy", "split=67,33",
//   "accept-threshold=0.2", "always-accept", "move=J", "junk".
// Move policies also install neutral probe replies and a short scratchpad reply.
MockPolicy parse_mock_policy(std::string_view spec);

// ---- record/replay ----

class ReplayBackend : public Backend {
 public:
  explicit ReplayBackend(std::vector<CallRecord> records);
  // Accepts one call log, a directory of per-match logs, or a run directory.
  static std::shared_ptr<ReplayBackend> from_file(const std::filesystem::path& call_log);

  // Next recorded call for the request's match; ReplayExhausted when none is
  // left, ReplayMismatch when the digest differs from the recording.
  std::string send(const CompletionRequest& request) override;
  std::string name() const override { return "replay"; }

  std::size_t remaining() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::deque<CallRecord>, std::less<>> queues_;
};

// ---- live HTTP ----

struct LiveSettings {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string api_key;
  std::chrono::seconds timeout{60};
};

// Credential from $EMOGAME_API_KEY (falling back to $OPENAI_API_KEY), endpoint
// from $EMOGAME_ENDPOINT when set.
LiveSettings live_settings_from_env();

class LiveBackend : public Backend {
 public:
  explicit LiveBackend(LiveSettings settings);
  std::string send(const CompletionRequest& request) override;
  std::string name() const override { return "live"; }

 private:
  LiveSettings settings_;
  std::string base_;  // scheme://host[:port]
  std::string path_;
};

// "live", "mock:<policy>" or "replay:<call log path>".
std::shared_ptr<Backend> make_backend(std::string_view selector);

}  // namespace emogame
