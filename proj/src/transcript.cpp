#include "emogame/transcript.hpp"

#include <fstream>
#include <sstream>

namespace emogame {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

void put_optional(json& j, const char* key, const std::optional<std::string>& value) {
  if (value) j[key] = *value;
}

std::optional<std::string> get_optional(const json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  return j.at(key).get<std::string>();
}

char get_char(const json& j, const char* key) {
  const auto text = j.at(key).get<std::string>();
  if (text.size() != 1) throw Error(ErrorCode::IoError, std::string(key) + " must be one character");
  return text[0];
}

json round_json(const RoundRecord& r) {
  json j{{"type", "round"},
         {"round", r.round},
         {"agent_move", std::string(1, r.agent_move)},
         {"opponent_move", std::string(1, r.opponent_move)},
         {"agent_reward", r.rewards.mine},
         {"opponent_reward", r.rewards.theirs},
         {"question", r.question},
         {"move_replies", r.move_replies},
         {"memory", r.memory}};
  put_optional(j, "scratchpad_prompt", r.scratchpad_prompt);
  put_optional(j, "internal_dialog", r.internal_dialog);
  put_optional(j, "own_emotion", r.own_emotion);
  put_optional(j, "own_emotion_reply", r.own_emotion_reply);
  if (r.own_emotion) j["own_emotion_flagged"] = r.own_emotion_flagged;
  put_optional(j, "shown_emotion", r.shown_emotion);
  put_optional(j, "shown_emotion_reply", r.shown_emotion_reply);
  if (r.shown_emotion) j["shown_emotion_flagged"] = r.shown_emotion_flagged;
  put_optional(j, "seen_emotion", r.seen_emotion);
  return j;
}

RoundRecord round_from_json(const json& j) {
  RoundRecord r;
  r.round = j.at("round").get<int>();
  r.agent_move = get_char(j, "agent_move");
  r.opponent_move = get_char(j, "opponent_move");
  r.rewards = {j.at("agent_reward").get<int>(), j.at("opponent_reward").get<int>()};
  r.question = j.at("question").get<std::string>();
  r.move_replies = j.at("move_replies").get<std::vector<std::string>>();
  r.memory = j.at("memory").get<std::string>();
  r.scratchpad_prompt = get_optional(j, "scratchpad_prompt");
  r.internal_dialog = get_optional(j, "internal_dialog");
  r.own_emotion = get_optional(j, "own_emotion");
  r.own_emotion_reply = get_optional(j, "own_emotion_reply");
  r.own_emotion_flagged = j.value("own_emotion_flagged", false);
  r.shown_emotion = get_optional(j, "shown_emotion");
  r.shown_emotion_reply = get_optional(j, "shown_emotion_reply");
  r.shown_emotion_flagged = j.value("shown_emotion_flagged", false);
  r.seen_emotion = get_optional(j, "seen_emotion");
  return r;
}

json bargain_json(const BargainRecord& b) {
  return json{{"type", "bargain"},
              {"role", to_string(b.role)},
              {"total_sum", b.total_sum},
              {"keep", b.split.keep},
              {"give", b.split.give},
              {"decision", to_string(b.decision)},
              {"decided_by_agent", b.decided_by_agent},
              {"proposer_payout", b.payouts.proposer},
              {"responder_payout", b.payouts.responder},
              {"request", b.request},
              {"replies", b.replies}};
}

Decision parse_decision(std::string_view name) {
  for (auto d : {Decision::Accepted, Decision::Rejected, Decision::NotApplicable}) {
    if (to_string(d) == name) return d;
  }
  throw Error(ErrorCode::IoError, "unknown decision '" + std::string(name) + "'");
}

BargainRecord bargain_from_json(const json& j) {
  BargainRecord b;
  b.role = parse_bargain_role(j.at("role").get<std::string>());
  b.total_sum = j.at("total_sum").get<long long>();
  b.split = {j.at("keep").get<long long>(), j.at("give").get<long long>()};
  b.decision = parse_decision(j.at("decision").get<std::string>());
  b.decided_by_agent = j.at("decided_by_agent").get<bool>();
  b.payouts = {j.at("proposer_payout").get<long long>(), j.at("responder_payout").get<long long>()};
  b.request = j.at("request").get<std::string>();
  b.replies = j.at("replies").get<std::vector<std::string>>();
  return b;
}

}  // namespace

std::string_view to_string(TranscriptStatus status) {
  return status == TranscriptStatus::Completed ? "completed" : "aborted";
}

std::string to_jsonl(const Transcript& t) {
  std::string out;
  const json header{{"type", "header"},
                    {"format", kFormatVersion},
                    {"match_id", t.config.match_id()},
                    {"config_hash", t.config.config_hash()},
                    {"config", t.config.snapshot()},
                    {"model_id", t.config.model_id},
                    {"system_prompt", t.system_prompt}};
  out += header.dump() + "\n";
  for (const auto& r : t.rounds) out += round_json(r).dump() + "\n";
  for (const auto& b : t.bargains) out += bargain_json(b).dump() + "\n";
  json footer{{"type", "footer"},
              {"status", to_string(t.status)},
              {"agent_total", t.agent_total},
              {"coplayer_total", t.coplayer_total},
              {"started_at", t.started_at},
              {"elapsed_ms", t.elapsed_ms}};
  if (t.status == TranscriptStatus::Aborted) {
    footer["abort_code"] = t.abort_code;
    footer["abort_reason"] = t.abort_reason;
  }
  out += footer.dump() + "\n";
  return out;
}

Transcript transcript_from_jsonl(std::string_view text) {
  Transcript t;
  bool have_header = false;
  bool have_footer = false;
  std::istringstream in{std::string(text)};
  std::string line;
  int repetition = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::IoError, std::string("malformed transcript line: ") + e.what());
    }
    const auto type = j.value("type", "");
    try {
      if (type == "header") {
        const auto match_id = j.at("match_id").get<std::string>();
        if (auto pos = match_id.rfind("-r"); pos != std::string::npos) {
          repetition = std::stoi(match_id.substr(pos + 2));
        }
        t.config = MatchConfig::from_snapshot(j.at("config"), repetition);
        t.system_prompt = j.at("system_prompt").get<std::string>();
        have_header = true;
      } else if (type == "round") {
        t.rounds.push_back(round_from_json(j));
      } else if (type == "bargain") {
        t.bargains.push_back(bargain_from_json(j));
      } else if (type == "footer") {
        t.status = j.at("status").get<std::string>() == "completed" ? TranscriptStatus::Completed
                                                                    : TranscriptStatus::Aborted;
        t.agent_total = j.at("agent_total").get<long long>();
        t.coplayer_total = j.at("coplayer_total").get<long long>();
        t.started_at = j.value("started_at", 0.0);
        t.elapsed_ms = j.value("elapsed_ms", 0.0);
        t.abort_code = j.value("abort_code", "");
        t.abort_reason = j.value("abort_reason", "");
        have_footer = true;
      } else {
        throw Error(ErrorCode::IoError, "unknown transcript line type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::IoError, "bad " + type + " line: " + e.what());
    }
  }
  if (!have_header || !have_footer) {
    throw Error(ErrorCode::IoError, "transcript is missing its header or footer");
  }
  return t;
}

void write_transcript(const Transcript& transcript, const std::filesystem::path& path) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp);
    out << to_jsonl(transcript);
  }
  std::filesystem::rename(tmp, path);
}

Transcript read_transcript(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read transcript " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return transcript_from_jsonl(buffer.str());
}

int audit_rewards(const Transcript& transcript) {
  int mismatches = 0;
  const auto& config = transcript.config;
  for (const auto& r : transcript.rounds) {
    try {
      if (payoff(config.game, config.labels, r.agent_move, r.opponent_move) != r.rewards) ++mismatches;
    } catch (const Error&) {
      ++mismatches;
    }
  }
  for (const auto& b : transcript.bargains) {
    try {
      if (settle_bargain(config.game, {b.total_sum, b.split, b.decision}) != b.payouts) ++mismatches;
    } catch (const Error&) {
      ++mismatches;
    }
  }
  return mismatches;
}

}  // namespace emogame
