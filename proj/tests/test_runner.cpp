#include <gtest/gtest.h>

#include <algorithm>
#include <mutex>
#include <sstream>

#include "emogame/metrics.hpp"
#include "emogame/runner.hpp"
#include "support.hpp"

using namespace emogame;
using testing_support::read_file;
using testing_support::TempDir;

namespace {

const PromptKit& kit() {
  static const PromptKit k(TemplateCatalog::load_default());
  return k;
}

// Wraps a mock and keeps every request it is sent.
class Recorder : public Backend {
 public:
  explicit Recorder(std::string_view policy) : inner_(parse_mock_policy(policy)) {}
  std::string send(const CompletionRequest& request) override {
    std::lock_guard lock(mutex_);
    requests.push_back(request);
    return inner_.send(request);
  }
  std::string name() const override { return "recorder"; }

  std::vector<CompletionRequest> requests;

 private:
  std::mutex mutex_;
  MockBackend inner_;
};

Transcript play(const MatchConfig& config, std::string_view policy, bool deterministic = true) {
  Gateway gateway(std::make_shared<MockBackend>(parse_mock_policy(policy)), nullptr, {}, deterministic);
  return run_match(config, MatchEnv{kit(), gateway, deterministic});
}

MatchConfig repeated(GameKind game, StrategyKind opponent) {
  MatchConfig c;
  c.game = game;
  c.opponent = opponent;
  c.labels = default_labels(game);
  return c;
}

MatchConfig bargain(GameKind game, BargainRole role) {
  MatchConfig c;
  c.game = game;
  c.opponent.reset();
  c.role = role;
  return c;
}

int count_prefix(const std::vector<ChatMessage>& messages, std::string_view prefix) {
  int n = 0;
  for (const auto& m : messages) {
    if (m.role == ChatRole::User && m.content.rfind(prefix, 0) == 0) ++n;
  }
  return n;
}

ExperimentConfig small_grid(const std::filesystem::path& out) {
  ExperimentConfig e;
  e.emotions = {EmotionKind::Anger, EmotionKind::Fear, EmotionKind::None};
  e.repetitions = 5;
  e.output_dir = out;
  e.base.rounds = 3;
  return e;
}

// Repetitions differ only in the match id their header carries.
std::string without_match_id(const std::string& jsonl) {
  std::string out;
  std::istringstream in(jsonl);
  for (std::string line; std::getline(in, line);) {
    auto j = nlohmann::json::parse(line);
    j.erase("match_id");
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace

TEST(Repeated, DefectAgainstNaiveCooperative) {
  const auto t = play(repeated(GameKind::PrisonersDilemma, StrategyKind::NaiveCooperative), "always-defect");
  ASSERT_TRUE(t.completed());
  EXPECT_EQ(t.rounds.size(), 10u);
  EXPECT_EQ(t.agent_total, 40);
  EXPECT_EQ(t.coplayer_total, 10);
}

TEST(Repeated, BotsInsistingAgainstDefectiveScoresNothing) {
  const auto t = play(repeated(GameKind::BattleOfSexes, StrategyKind::Defective), "always-own");
  ASSERT_TRUE(t.completed());
  EXPECT_EQ(t.agent_total, 0);
  // The defective co-player always shows up on its own preference, F.
  for (const auto& r : t.rounds) EXPECT_EQ(r.opponent_move, 'F');
}

TEST(Repeated, BotsConcedingAgainstDefective) {
  const auto t = play(repeated(GameKind::BattleOfSexes, StrategyKind::Defective), "always-concede");
  ASSERT_TRUE(t.completed());
  EXPECT_EQ(t.agent_total, 70);
  EXPECT_EQ(t.coplayer_total, 100);
}

TEST(Repeated, BestResponseReachesTheOracle) {
  for (auto game : {GameKind::PrisonersDilemma, GameKind::BattleOfSexes}) {
    for (auto kind : kAllStrategies) {
      const auto t = play(repeated(game, kind), "best-response");
      ASSERT_TRUE(t.completed());
      EXPECT_EQ(t.agent_total, max_attainable_payoff(game, kind, 10)) << to_string(game) << to_string(kind);
    }
  }
}

TEST(Repeated, MemoryDiscipline) {
  for (bool scratchpad : {false, true}) {
    auto config = repeated(GameKind::PrisonersDilemma, StrategyKind::Imitating);
    config.flags.do_scratchpad_step = scratchpad;
    config.flags.need_check_emotions = true;
    auto recorder = std::make_shared<Recorder>("alternate");
    Gateway gateway(recorder, nullptr, {}, true);
    const auto t = run_match(config, MatchEnv{kit(), gateway, true});
    ASSERT_TRUE(t.completed());
    int moves = 0;
    for (const auto& request : recorder->requests) {
      const auto& messages = request.messages;
      ASSERT_EQ(messages.front().role, ChatRole::System);
      if (request.context.kind != TurnKind::Move) continue;
      const int round = request.context.round;
      EXPECT_EQ(round, moves++);
      EXPECT_EQ(count_prefix(messages, "In round "), round);
      EXPECT_EQ(messages.back().content, kit().round_question(round, config.labels));
      const auto count_exact = [&](const std::string& text) {
        return std::count_if(messages.begin(), messages.end(),
                             [&](const ChatMessage& m) { return m.content == text; });
      };
      EXPECT_EQ(count_exact(kit().round_question(round, config.labels)), 1);
      EXPECT_EQ(count_exact(kit().scratchpad_question(round)), scratchpad ? 1 : 0);
      if (scratchpad) EXPECT_EQ(messages[messages.size() - 2].role, ChatRole::Assistant);
    }
    EXPECT_EQ(moves, 10);
  }
}

TEST(Repeated, ProbeContextAndSeenEmotion) {
  auto config = repeated(GameKind::BattleOfSexes, StrategyKind::Defective);
  config.flags = {.need_check_emotions = true, .need_demonstrate_emotions = true,
                  .memorize_seen_emotions = true, .memorize_demonstrated_emotions = true};
  auto recorder = std::make_shared<Recorder>("always-concede+emotion=sad+outer=happy");
  Gateway gateway(recorder, nullptr, {}, true);
  const auto t = run_match(config, MatchEnv{kit(), gateway, true});
  ASSERT_TRUE(t.completed());
  for (const auto& r : t.rounds) {
    EXPECT_EQ(r.own_emotion, "sad");
    EXPECT_EQ(r.shown_emotion, "happy");
    EXPECT_EQ(r.seen_emotion, "happy");
    EXPECT_NE(r.memory.find("You felt sad"), std::string::npos);
  }
  for (const auto& request : recorder->requests) {
    if (request.context.kind != TurnKind::EmotionProbe) continue;
    // Base context, this round's plain memory line, the probe.
    EXPECT_EQ(count_prefix(request.messages, "In round "), request.context.round + 1);
    EXPECT_EQ(request.messages.back().content, kit().emotion_probe());
  }
}

TEST(Repeated, JunkRepliesAbortAfterReasks) {
  auto config = repeated(GameKind::PrisonersDilemma, StrategyKind::Defective);
  const auto t = play(config, "junk");
  EXPECT_EQ(t.status, TranscriptStatus::Aborted);
  EXPECT_EQ(t.abort_code, "UnparseableMove");
  EXPECT_TRUE(t.rounds.empty());
  EXPECT_EQ(t.agent_total, 0);
}

TEST(Repeated, PolicyGapAborts) {
  const auto t = play(repeated(GameKind::PrisonersDilemma, StrategyKind::Defective), "always-accept");
  EXPECT_EQ(t.status, TranscriptStatus::Aborted);
  EXPECT_EQ(t.abort_code, "PolicyGap");
}

TEST(Repeated, AuthErrorPropagates) {
  auto config = repeated(GameKind::PrisonersDilemma, StrategyKind::Defective);
  Gateway gateway(std::make_shared<LiveBackend>(LiveSettings{"http://127.0.0.1:9/", ""}), nullptr, {}, true);
  try {
    run_match(config, MatchEnv{kit(), gateway, true});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AuthError);
  }
}

TEST(Repeated, RewardsAudit) {
  for (auto kind : kAllStrategies) {
    const auto t = play(repeated(GameKind::BattleOfSexes, kind), "alternate");
    EXPECT_EQ(audit_rewards(t), 0);
    auto tampered = t;
    tampered.rounds[3].rewards.mine += 1;
    EXPECT_EQ(audit_rewards(tampered), 1);
  }
}

TEST(Dictator, Splits) {
  const auto config = bargain(GameKind::Dictator, BargainRole::DictatorProposer);
  for (auto [reply, give] : {std::pair{"50,50", 50LL}, {"67,33", 33LL}, {"100,0", 0LL}}) {
    const auto t = play(config, std::string("split=") + reply);
    ASSERT_TRUE(t.completed());
    ASSERT_EQ(t.bargains.size(), 1u);
    EXPECT_EQ(t.bargains[0].split.give, give);
    EXPECT_DOUBLE_EQ(offered_share(t.bargains[0]), static_cast<double>(give));
    EXPECT_EQ(t.agent_total, 100 - give);
  }
}

TEST(Dictator, InvalidSplitAborts) {
  const auto t = play(bargain(GameKind::Dictator, BargainRole::DictatorProposer), "split=60,50");
  EXPECT_EQ(t.status, TranscriptStatus::Aborted);
  EXPECT_EQ(t.abort_code, "InvalidSplit");
}

TEST(Ultimatum, ThresholdResponder) {
  const auto t = play(bargain(GameKind::Ultimatum, BargainRole::UltimatumResponder), "accept-threshold=0.2");
  ASSERT_TRUE(t.completed());
  ASSERT_EQ(t.bargains.size(), 11u);
  EXPECT_EQ(t.bargains[0].decision, Decision::Rejected);
  EXPECT_EQ(t.bargains[1].decision, Decision::Rejected);
  for (std::size_t i = 2; i < 11; ++i) EXPECT_EQ(t.bargains[i].decision, Decision::Accepted);
  EXPECT_EQ(acceptance_ratio(t.bargains), (Ratio{9, 11}));
}

TEST(Ultimatum, EachOfferIsAFreshConversation) {
  auto recorder = std::make_shared<Recorder>("always-accept");
  Gateway gateway(recorder, nullptr, {}, true);
  run_match(bargain(GameKind::Ultimatum, BargainRole::UltimatumResponder), MatchEnv{kit(), gateway, true});
  ASSERT_EQ(recorder->requests.size(), 11u);
  for (const auto& r : recorder->requests) EXPECT_EQ(r.messages.size(), 2u);
}

TEST(Ultimatum, ProposerAgainstScriptedResponder) {
  auto config = bargain(GameKind::Ultimatum, BargainRole::UltimatumProposer);
  config.proposer_accept_threshold = 0.0;
  auto t = play(config, "split=65,35");
  EXPECT_EQ(t.bargains.at(0).payouts, (Payout{65, 35}));
  EXPECT_DOUBLE_EQ(offered_share(t.bargains.at(0)), 35.0);
  config.proposer_accept_threshold = 1.0;
  t = play(config, "split=50,50");
  EXPECT_EQ(t.bargains.at(0).decision, Decision::Rejected);
  EXPECT_EQ(t.bargains.at(0).payouts, (Payout{0, 0}));
}

TEST(Transcripts, DeterministicBytesAndRoundTrip) {
  TempDir dir("transcript");
  auto config = repeated(GameKind::PrisonersDilemma, StrategyKind::Vindictive);
  config.flags.need_check_emotions = true;
  std::string first;
  for (int rep = 0; rep < 5; ++rep) {
    config.repetition = rep;
    const auto t = play(config, "always-defect");
    EXPECT_EQ(t.agent_total, 22);
    const std::string bytes = to_jsonl(t);
    EXPECT_EQ(bytes, to_jsonl(play(config, "always-defect")));
    if (rep == 0) first = without_match_id(bytes);
    EXPECT_EQ(without_match_id(bytes), first);
    const auto back = transcript_from_jsonl(bytes);
    EXPECT_EQ(to_jsonl(back), bytes);
    EXPECT_EQ(back.rounds, t.rounds);
  }
  const auto t = play(bargain(GameKind::Ultimatum, BargainRole::UltimatumResponder), "accept-threshold=0.5");
  write_transcript(t, dir.path() / "t.jsonl");
  const auto back = read_transcript(dir.path() / "t.jsonl");
  EXPECT_EQ(back.bargains, t.bargains);
  EXPECT_EQ(to_jsonl(back), read_file(dir.path() / "t.jsonl"));
}

TEST(Transcripts, WallClockOnlyOutsideDeterministicMode) {
  const auto t = play(repeated(GameKind::PrisonersDilemma, StrategyKind::Defective), "always-defect", false);
  EXPECT_GT(t.started_at, 0.0);
  const auto d = play(repeated(GameKind::PrisonersDilemma, StrategyKind::Defective), "always-defect", true);
  EXPECT_EQ(d.started_at, 0.0);
  EXPECT_EQ(d.elapsed_ms, 0.0);
}

TEST(Experiment, FullRunAndResume) {
  TempDir dir("resume");
  const auto experiment = small_grid(dir.path());
  const std::size_t total = experiment.expand().size();
  ASSERT_EQ(total, 5u * 3u * 5u);

  RunOptions options;
  options.backend = "mock:always-defect";
  options.deterministic = true;
  options.stop_after = 60;
  const auto partial = run_experiment(experiment, options);
  EXPECT_EQ(partial.newly_run, 60u);

  options.stop_after.reset();
  const auto resumed = run_experiment(experiment, options);
  EXPECT_EQ(resumed.newly_run, total - 60);
  EXPECT_EQ(resumed.skipped, 60u);
  EXPECT_EQ(resumed.entries.size(), total);
  EXPECT_EQ(resumed.count(TranscriptStatus::Completed), total);

  const auto again = run_experiment(experiment, options);
  EXPECT_EQ(again.newly_run, 0u);

  const auto manifest = read_manifest(dir.path() / kManifestName);
  ASSERT_EQ(manifest.size(), total);
  const auto expanded = experiment.expand();
  for (std::size_t i = 0; i < total; ++i) {
    EXPECT_EQ(manifest[i].match_id, expanded[i].match_id());
    EXPECT_TRUE(std::filesystem::exists(dir.path() / manifest[i].transcript));
  }
}

TEST(Experiment, ResumeMatchesUninterruptedRun) {
  TempDir a("straight"), b("interrupted");
  RunOptions options;
  options.backend = "mock:alternate";
  options.deterministic = true;
  run_experiment(small_grid(a.path()), options);
  options.stop_after = 17;
  run_experiment(small_grid(b.path()), options);
  options.stop_after.reset();
  run_experiment(small_grid(b.path()), options);
  EXPECT_EQ(read_file(a.path() / kManifestName), read_file(b.path() / kManifestName));
  for (const auto& entry : read_manifest(a.path() / kManifestName)) {
    EXPECT_EQ(read_file(a.path() / entry.transcript), read_file(b.path() / entry.transcript));
  }
}

TEST(Experiment, OneAbortedMatchIsCounted) {
  TempDir dir("aborted");
  ExperimentConfig experiment;
  experiment.games = {GameKind::Dictator};
  experiment.emotions = {EmotionKind::None};
  experiment.repetitions = 1;
  experiment.output_dir = dir.path();
  experiment.budgets = {100, 10};
  RunOptions options;
  options.backend = "mock:split=67,33";  // invalid for the 10-dollar budget
  options.deterministic = true;
  const auto manifest = run_experiment(experiment, options);
  ASSERT_EQ(manifest.entries.size(), 2u);
  EXPECT_EQ(manifest.count(TranscriptStatus::Completed), 1u);
  EXPECT_EQ(manifest.count(TranscriptStatus::Aborted), 1u);
  const auto& aborted = manifest.entries[1];
  EXPECT_EQ(aborted.abort_code, "InvalidSplit");

  // Aborted matches are retried on resume.
  const auto again = run_experiment(experiment, options);
  EXPECT_EQ(again.newly_run, 1u);
  EXPECT_EQ(again.skipped, 1u);
}

TEST(Experiment, ReplayReproducesEveryTranscript) {
  TempDir dir("replay");
  RunOptions options;
  options.backend = "mock:tit-for-tat+emotion=angry";
  auto experiment = small_grid(dir.path());
  experiment.base.flags.need_check_emotions = true;
  run_experiment(experiment, options);
  const auto diff = replay_manifest(dir.path() / kManifestName);
  EXPECT_EQ(diff.compared, experiment.expand().size());
  EXPECT_TRUE(diff.divergent.empty());
  EXPECT_EQ(diff.reward_mismatches, 0u);
  EXPECT_EQ(diff.audited_records, experiment.expand().size() * 3u);

  // Editing a stored transcript shows up as a divergence.
  const auto manifest = read_manifest(dir.path() / kManifestName);
  {
    const auto path = dir.path() / manifest[4].transcript;
    std::string text = read_file(path);
    const auto at = text.find("You felt angry");
    ASSERT_NE(at, std::string::npos);
    text.replace(at, 14, "You felt happy");
    std::ofstream(path, std::ios::binary | std::ios::trunc) << text;
  }
  EXPECT_EQ(replay_manifest(dir.path() / kManifestName).divergent.size(), 1u);
}
