#include "emogame/runner.hpp"

#include <chrono>
#include <cmath>

#include "emogame/strategy.hpp"

namespace emogame {

namespace {

double unix_seconds() {
  using namespace std::chrono;
  return duration<double>(system_clock::now().time_since_epoch()).count();
}

class Clock {
 public:
  explicit Clock(bool deterministic)
      : deterministic_(deterministic), start_(std::chrono::steady_clock::now()) {}

  void stamp(Transcript& t) const {
    if (deterministic_) return;
    t.started_at = started_at_;
    t.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
                       .count();
  }

 private:
  bool deterministic_;
  std::chrono::steady_clock::time_point start_;
  double started_at_ = unix_seconds();
};

SystemPromptSpec prompt_spec(const MatchConfig& config) {
  SystemPromptSpec spec;
  spec.game = config.game;
  spec.emotion = config.emotion;
  spec.emotion_strategy = config.emotion_strategy;
  spec.relation = config.relation;
  spec.ordering = config.ordering;
  spec.labels = config.labels;
  spec.currency = config.currency;
  spec.total_sum = config.budget;
  spec.role = config.role;
  return spec;
}

CompletionRequest make_request(const MatchConfig& config, std::vector<ChatMessage> messages,
                               TurnContext context) {
  CompletionRequest request;
  request.model_id = config.model_id;
  request.temperature = config.temperature;
  request.max_retries = config.max_retries;
  request.messages = std::move(messages);
  context.match_id = config.match_id();
  context.game = config.game;
  request.context = std::move(context);
  return request;
}

bool is_parse_failure(ErrorCode code) {
  return code == ErrorCode::UnparseableMove || code == ErrorCode::UnparseableSplit ||
         code == ErrorCode::InvalidSplit || code == ErrorCode::UnparseableDecision;
}

// Sends the same request until `parse` succeeds, at most 1 + reask_limit
// times. Every raw reply is appended to `replies`; the last parse error
// escapes once the budget is spent.
template <typename Parse>
auto ask_until_parsed(Gateway& gateway, const CompletionRequest& request, int reask_limit,
                      std::vector<std::string>& replies, Parse parse) {
  for (int attempt = 0;; ++attempt) {
    replies.push_back(gateway.complete(request));
    try {
      return parse(replies.back());
    } catch (const Error& e) {
      if (!is_parse_failure(e.code()) || attempt >= reask_limit) throw;
    }
  }
}

void mark_aborted(Transcript& t, const Error& e) {
  t.status = TranscriptStatus::Aborted;
  t.abort_code = std::string(to_string(e.code()));
  t.abort_reason = e.what();
}

Transcript start_transcript(const MatchConfig& config, const PromptKit& prompts) {
  config.validate();
  Transcript t;
  t.config = config;
  t.system_prompt = prompts.system_prompt(prompt_spec(config));
  return t;
}

}  // namespace

Transcript run_repeated_match(const MatchConfig& config, const MatchEnv& env) {
  if (!is_repeated(config.game)) {
    throw Error(ErrorCode::WrongGameKind, "run_repeated_match needs PD or BotS");
  }
  if (!config.opponent) throw Error(ErrorCode::ConfigError, "a repeated game needs an opponent");
  const Clock clock(env.deterministic);
  Transcript t = start_transcript(config, env.prompts);
  const PromptKit& kit = env.prompts;
  const PipelineFlags& flags = config.flags;

  MatchState state;
  StrategyState opponent(*config.opponent);
  std::vector<ChatMessage> base{{ChatRole::System, t.system_prompt}};

  try {
    for (int round = 0; round < config.rounds; ++round) {
      RoundRecord record;
      record.round = round;
      record.question = kit.round_question(round, config.labels);

      TurnContext ctx;
      ctx.round = round;
      ctx.rounds = config.rounds;
      ctx.labels = config.labels;
      ctx.opponent = config.opponent;
      ctx.history = state.history;

      auto answer_messages = base;
      if (flags.do_scratchpad_step) {
        record.scratchpad_prompt = kit.scratchpad_question(round);
        answer_messages.push_back({ChatRole::User, *record.scratchpad_prompt});
        ctx.kind = TurnKind::Scratchpad;
        record.internal_dialog = env.gateway.complete(make_request(config, answer_messages, ctx));
        answer_messages.push_back({ChatRole::Assistant, *record.internal_dialog});
      }
      answer_messages.push_back({ChatRole::User, record.question});
      ctx.kind = TurnKind::Move;
      const Option mine = ask_until_parsed(
          env.gateway, make_request(config, std::move(answer_messages), ctx), config.reask_limit,
          record.move_replies, [&](const std::string& reply) { return parse_move(reply, config.labels); });

      const Action theirs_semantic = opponent.next(round);
      const Option theirs = coplayer_option(config.game, theirs_semantic);
      opponent.observe(agent_action(config.game, mine));
      state = apply_round(state, mine, theirs, config.game);
      record.agent_move = config.labels.label(mine);
      record.opponent_move = config.labels.label(theirs);
      record.rewards = state.history.back().reward;

      MemoryEntry entry{.round = round,
                        .my_label = record.agent_move,
                        .opponent_label = record.opponent_move,
                        .my_reward = record.rewards.mine,
                        .opponent_reward = record.rewards.theirs};
      if (flags.need_check_emotions || flags.need_demonstrate_emotions) {
        auto probe_messages = base;
        probe_messages.push_back({ChatRole::User, kit.memory_update(entry, PipelineFlags{}, config.currency)});
        ctx.history = state.history;
        if (flags.need_check_emotions) {
          auto messages = probe_messages;
          messages.push_back({ChatRole::User, kit.emotion_probe()});
          ctx.kind = TurnKind::EmotionProbe;
          record.own_emotion_reply = env.gateway.complete(make_request(config, messages, ctx));
          const auto word = parse_emotion(*record.own_emotion_reply, kProbeEmotionWords);
          record.own_emotion = word.word;
          record.own_emotion_flagged = word.flagged;
        }
        if (flags.need_demonstrate_emotions) {
          auto messages = probe_messages;
          messages.push_back({ChatRole::User, kit.outer_emotion_probe()});
          ctx.kind = TurnKind::OuterProbe;
          record.shown_emotion_reply = env.gateway.complete(make_request(config, messages, ctx));
          const auto word = parse_emotion(*record.shown_emotion_reply, kProbeEmotionWords);
          record.shown_emotion = word.word;
          record.shown_emotion_flagged = word.flagged;
        }
      }
      if (flags.need_demonstrate_emotions || flags.memorize_seen_emotions) {
        record.seen_emotion = config.opponent_emotion;
      }
      entry.own_emotion = record.own_emotion;
      entry.shown_emotion = record.shown_emotion;
      entry.seen_emotion = record.seen_emotion;
      record.memory = kit.memory_update(entry, flags, config.currency);
      base.push_back({ChatRole::User, record.memory});
      t.rounds.push_back(std::move(record));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::AuthError) throw;
    mark_aborted(t, e);
  }
  t.agent_total = state.cumulative.mine;
  t.coplayer_total = state.cumulative.theirs;
  clock.stamp(t);
  return t;
}

namespace {

Transcript run_proposer(const MatchConfig& config, const MatchEnv& env) {
  const Clock clock(env.deterministic);
  Transcript t = start_transcript(config, env.prompts);
  BargainRecord record;
  record.role = config.role;
  record.total_sum = config.budget;
  record.request = env.prompts.bargain_request(config.role, config.budget, config.relation,
                                               std::nullopt, config.currency);
  TurnContext ctx;
  ctx.kind = TurnKind::Split;
  ctx.total_sum = config.budget;
  const std::vector<ChatMessage> messages{{ChatRole::System, t.system_prompt},
                                          {ChatRole::User, record.request}};
  try {
    record.split = ask_until_parsed(env.gateway, make_request(config, messages, ctx),
                                    config.reask_limit, record.replies,
                                    [&](const std::string& reply) { return parse_split(reply, config.budget); });
    if (config.game == GameKind::Ultimatum) {
      // Scripted responder: accept iff the offer reaches the configured share.
      const double floor_give = config.proposer_accept_threshold * static_cast<double>(config.budget);
      record.decision = static_cast<double>(record.split.give) + 1e-9 >= floor_give
                            ? Decision::Accepted
                            : Decision::Rejected;
    }
    record.payouts = settle_bargain(config.game, {record.total_sum, record.split, record.decision});
    t.agent_total = record.payouts.proposer;
    t.coplayer_total = record.payouts.responder;
    t.bargains.push_back(std::move(record));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::AuthError) throw;
    mark_aborted(t, e);
  }
  clock.stamp(t);
  return t;
}

Transcript run_responder(const MatchConfig& config, const MatchEnv& env) {
  const Clock clock(env.deterministic);
  Transcript t = start_transcript(config, env.prompts);
  try {
    for (const Split& offer : responder_offer_schedule(config.budget, config.offer_shares)) {
      BargainRecord record;
      record.role = BargainRole::UltimatumResponder;
      record.total_sum = config.budget;
      record.split = offer;
      record.decided_by_agent = true;
      record.request = env.prompts.bargain_request(record.role, config.budget, config.relation,
                                                   offer, config.currency);
      TurnContext ctx;
      ctx.kind = TurnKind::Accept;
      ctx.total_sum = config.budget;
      ctx.offer = offer;
      // Every offer is a fresh one-shot conversation.
      const std::vector<ChatMessage> messages{{ChatRole::System, t.system_prompt},
                                              {ChatRole::User, record.request}};
      record.decision = ask_until_parsed(env.gateway, make_request(config, messages, ctx),
                                         config.reask_limit, record.replies,
                                         [](const std::string& reply) { return parse_accept(reply); });
      record.payouts = settle_bargain(config.game, {record.total_sum, record.split, record.decision});
      t.agent_total += record.payouts.responder;
      t.coplayer_total += record.payouts.proposer;
      t.bargains.push_back(std::move(record));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::AuthError) throw;
    mark_aborted(t, e);
  }
  clock.stamp(t);
  return t;
}

}  // namespace

Transcript run_dictator(const MatchConfig& config, const MatchEnv& env) {
  if (config.game != GameKind::Dictator) {
    throw Error(ErrorCode::WrongGameKind, "run_dictator needs the Dictator game");
  }
  return run_proposer(config, env);
}

Transcript run_ultimatum(const MatchConfig& config, const MatchEnv& env) {
  if (config.game != GameKind::Ultimatum) {
    throw Error(ErrorCode::WrongGameKind, "run_ultimatum needs the Ultimatum game");
  }
  if (config.role == BargainRole::UltimatumResponder) return run_responder(config, env);
  if (config.role != BargainRole::UltimatumProposer) {
    throw Error(ErrorCode::ConfigError, "ultimatum role must be proposer or responder");
  }
  return run_proposer(config, env);
}

Transcript run_match(const MatchConfig& config, const MatchEnv& env) {
  switch (config.game) {
    case GameKind::PrisonersDilemma:
    case GameKind::BattleOfSexes: return run_repeated_match(config, env);
    case GameKind::Dictator: return run_dictator(config, env);
    case GameKind::Ultimatum: return run_ultimatum(config, env);
  }
  throw Error(ErrorCode::WrongGameKind, "unknown game");
}

}  // namespace emogame
