#include "emogame/gateway.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "emogame/digest.hpp"

namespace emogame {

using nlohmann::json;

std::string_view to_string(ChatRole role) {
  switch (role) {
    case ChatRole::System: return "system";
    case ChatRole::User: return "user";
    case ChatRole::Assistant: return "assistant";
  }
  return "user";
}

std::string_view to_string(TurnKind kind) {
  switch (kind) {
    case TurnKind::Move: return "move";
    case TurnKind::Split: return "split";
    case TurnKind::Accept: return "accept";
    case TurnKind::EmotionProbe: return "emotion_probe";
    case TurnKind::OuterProbe: return "outer_probe";
    case TurnKind::Scratchpad: return "scratchpad";
  }
  return "move";
}

TurnKind parse_turn_kind(std::string_view name) {
  for (auto kind : {TurnKind::Move, TurnKind::Split, TurnKind::Accept, TurnKind::EmotionProbe,
                    TurnKind::OuterProbe, TurnKind::Scratchpad}) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorCode::ConfigError, "unknown turn kind '" + std::string(name) + "'");
}

void validate_request(const CompletionRequest& request) {
  if (request.messages.empty() || request.messages.front().role != ChatRole::System) {
    throw Error(ErrorCode::ConfigError, "a request must start with a system message");
  }
  for (const auto& message : request.messages) {
    if (message.content.empty()) {
      throw Error(ErrorCode::ConfigError, "chat messages must not be empty");
    }
  }
}

std::string request_digest(const std::vector<ChatMessage>& messages) {
  // Length-prefixed so that message boundaries cannot collide.
  std::string canonical;
  for (const auto& message : messages) {
    canonical += to_string(message.role);
    canonical += ':';
    canonical += std::to_string(message.content.size());
    canonical += ':';
    canonical += message.content;
    canonical += '\n';
  }
  return sha256_hex(canonical);
}

// ---- call log ----

namespace {

json to_json(const CallRecord& record) {
  return json{{"match_id", record.match_id},
              {"seq", record.seq},
              {"kind", to_string(record.kind)},
              {"model_id", record.model_id},
              {"digest", record.digest},
              {"response", record.response},
              {"latency_ms", record.latency_ms},
              {"attempt", record.attempt}};
}

CallRecord call_from_json(const json& j) {
  CallRecord record;
  record.match_id = j.at("match_id").get<std::string>();
  record.seq = j.at("seq").get<int>();
  record.kind = parse_turn_kind(j.at("kind").get<std::string>());
  record.model_id = j.value("model_id", "");
  record.digest = j.at("digest").get<std::string>();
  record.response = j.at("response").get<std::string>();
  record.latency_ms = j.value("latency_ms", 0.0);
  record.attempt = j.value("attempt", 1);
  return record;
}

}  // namespace

CallLog::CallLog(const std::filesystem::path& sink) : sink_(sink) {}

CallRecord CallLog::append(CallRecord record) {
  std::lock_guard lock(mutex_);
  record.seq = next_seq_[record.match_id]++;
  if (sink_) {
    std::ofstream out(*sink_, std::ios::app | std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot append to call log " + sink_->string());
    out << to_json(record).dump() << '\n';
  }
  records_.push_back(record);
  return record;
}

std::vector<CallRecord> CallLog::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

std::vector<CallRecord> CallLog::records_for(std::string_view match_id) const {
  std::lock_guard lock(mutex_);
  std::vector<CallRecord> out;
  for (const auto& record : records_) {
    if (record.match_id == match_id) out.push_back(record);
  }
  return out;
}

void CallLog::write_jsonl(const std::filesystem::path& path) const {
  std::lock_guard lock(mutex_);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write call log " + path.string());
  for (const auto& record : records_) out << to_json(record).dump() << '\n';
}

std::vector<CallRecord> CallLog::read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read call log " + path.string());
  std::vector<CallRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(call_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::IoError,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

// ---- gateway ----

Gateway::Gateway(std::shared_ptr<Backend> backend, std::shared_ptr<CallLog> log, RetryPolicy retry,
                 bool deterministic)
    : backend_(std::move(backend)),
      log_(log ? std::move(log) : std::make_shared<CallLog>()),
      retry_(retry),
      deterministic_(deterministic) {}

std::string Gateway::complete(const CompletionRequest& request) {
  validate_request(request);
  const std::string digest = request_digest(request.messages);
  auto delay = retry_.base_delay;
  for (int attempt = 1;; ++attempt) {
    const auto started = std::chrono::steady_clock::now();
    try {
      std::string response = backend_->send(request);
      const std::chrono::duration<double, std::milli> elapsed =
          std::chrono::steady_clock::now() - started;
      CallRecord record;
      record.match_id = request.context.match_id;
      record.kind = request.context.kind;
      record.model_id = request.model_id;
      record.digest = digest;
      record.response = response;
      record.latency_ms = deterministic_ ? 0.0 : elapsed.count();
      record.attempt = attempt;
      log_->append(std::move(record));
      return response;
    } catch (const TransportFailure& failure) {
      if (!failure.retryable() || attempt > request.max_retries) {
        throw Error(ErrorCode::TransportError,
                    std::string(failure.what()) + " (after " + std::to_string(attempt) +
                        " attempt" + (attempt == 1 ? "" : "s") + ")");
      }
    }
    if (delay.count() > 0) std::this_thread::sleep_for(delay);
    delay = std::min(retry_.max_delay,
                     std::chrono::milliseconds(static_cast<long long>(
                         static_cast<double>(delay.count()) * retry_.multiplier)));
  }
}

// ---- replay ----

ReplayBackend::ReplayBackend(std::vector<CallRecord> records) {
  std::stable_sort(records.begin(), records.end(), [](const CallRecord& a, const CallRecord& b) {
    if (a.match_id != b.match_id) return a.match_id < b.match_id;
    return a.seq < b.seq;
  });
  for (auto& record : records) queues_[record.match_id].push_back(std::move(record));
}

std::shared_ptr<ReplayBackend> ReplayBackend::from_file(const std::filesystem::path& call_log) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(call_log)) return std::make_shared<ReplayBackend>(CallLog::read_jsonl(call_log));
  // A run directory or its calls/ directory: one log per match.
  const fs::path dir = fs::is_directory(call_log / "calls") ? call_log / "calls" : call_log;
  std::vector<fs::path> files;
  for (const auto& item : fs::directory_iterator(dir)) {
    if (item.is_regular_file() && item.path().extension() == ".jsonl") files.push_back(item.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<CallRecord> records;
  for (const auto& file : files) {
    auto part = CallLog::read_jsonl(file);
    records.insert(records.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
  }
  return std::make_shared<ReplayBackend>(std::move(records));
}

std::string ReplayBackend::send(const CompletionRequest& request) {
  std::lock_guard lock(mutex_);
  auto it = queues_.find(request.context.match_id);
  if (it == queues_.end() || it->second.empty()) {
    throw Error(ErrorCode::ReplayExhausted,
                "no recorded call left for match '" + request.context.match_id + "'");
  }
  const CallRecord& next = it->second.front();
  const std::string digest = request_digest(request.messages);
  if (next.digest != digest || next.kind != request.context.kind) {
    throw Error(ErrorCode::ReplayMismatch,
                "call " + std::to_string(next.seq) + " of match '" + next.match_id +
                    "' differs from the recording");
  }
  std::string response = next.response;
  it->second.pop_front();
  return response;
}

std::size_t ReplayBackend::remaining() const {
  std::lock_guard lock(mutex_);
  std::size_t total = 0;
  for (const auto& [id, queue] : queues_) total += queue.size();
  return total;
}

std::shared_ptr<Backend> make_backend(std::string_view selector) {
  if (selector == "live") return std::make_shared<LiveBackend>(live_settings_from_env());
  if (selector.starts_with("mock:")) {
    return std::make_shared<MockBackend>(parse_mock_policy(selector.substr(5)));
  }
  if (selector.starts_with("replay:")) {
    return ReplayBackend::from_file(std::filesystem::path(std::string(selector.substr(7))));
  }
  throw Error(ErrorCode::ConfigError, "unknown backend '" + std::string(selector) +
                                          "' (expected live, mock:<policy> or replay:<path>)");
}

}  // namespace emogame
