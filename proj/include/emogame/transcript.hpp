#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "emogame/config.hpp"
#include "emogame/game.hpp"

namespace emogame {

struct RoundRecord {
  int round = 0;
  char agent_move = 'J';
  char opponent_move = 'J';
  Payoff rewards;
  std::string question;
  std::vector<std::string> move_replies;  // every answer turn, re-asks included
  std::optional<std::string> scratchpad_prompt;
  std::optional<std::string> internal_dialog;
  std::optional<std::string> own_emotion;
  std::optional<std::string> own_emotion_reply;
  bool own_emotion_flagged = false;
  std::optional<std::string> shown_emotion;
  std::optional<std::string> shown_emotion_reply;
  bool shown_emotion_flagged = false;
  std::optional<std::string> seen_emotion;
  std::string memory;  // memory entry carried into later rounds

  bool operator==(const RoundRecord&) const = default;
};

struct BargainRecord {
  BargainRole role = BargainRole::DictatorProposer;
  long long total_sum = 0;
  Split split;
  Decision decision = Decision::NotApplicable;
  bool decided_by_agent = false;
  Payout payouts;
  std::string request;
  std::vector<std::string> replies;

  bool operator==(const BargainRecord&) const = default;
};

enum class TranscriptStatus { Completed, Aborted };

std::string_view to_string(TranscriptStatus status);

struct Transcript {
  MatchConfig config;
  std::string system_prompt;
  std::vector<RoundRecord> rounds;
  std::vector<BargainRecord> bargains;  // one per offer for responders, else one
  long long agent_total = 0;
  long long coplayer_total = 0;
  TranscriptStatus status = TranscriptStatus::Completed;
  std::string abort_code;    // ErrorCode name when aborted
  std::string abort_reason;  // human-readable detail
  double started_at = 0.0;   // unix seconds; 0 in deterministic mode
  double elapsed_ms = 0.0;   // 0 in deterministic mode

  bool completed() const { return status == TranscriptStatus::Completed; }
};

// JSON-lines form: a header line (config snapshot and system prompt), one
// line per round or bargain record, then a footer with totals and status.
std::string to_jsonl(const Transcript& transcript);
Transcript transcript_from_jsonl(std::string_view text);

void write_transcript(const Transcript& transcript, const std::filesystem::path& path);
Transcript read_transcript(const std::filesystem::path& path);

// Recomputes every round reward from the recorded moves; returns the number
// of records whose stored rewards disagree (0 for a clean transcript).
int audit_rewards(const Transcript& transcript);

}  // namespace emogame
