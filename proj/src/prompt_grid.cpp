#include <fstream>
#include <sstream>

#include "emogame/prompts.hpp"

namespace emogame {

namespace {

SystemPromptSpec spec_for(GameKind game, EmotionKind emotion, EmotionPromptStrategy strategy,
                          Relation relation, PromptOrdering ordering) {
  SystemPromptSpec spec;
  spec.game = game;
  spec.emotion = emotion;
  spec.emotion_strategy = strategy;
  spec.relation = CoplayerRelation::of(relation);
  spec.ordering = ordering;
  spec.labels = default_labels(game);
  return spec;
}

}  // namespace

std::vector<RenderedPrompt> render_prompt_grid(const PromptKit& kit) {
  std::vector<RenderedPrompt> out;

  for (EmotionKind emotion : kTemplatedEmotions) {
    for (EmotionPromptStrategy strategy : kAllEmotionStrategies) {
      for (Relation relation : kAllRelations) {
        out.push_back({"clause/" + std::string(to_string(emotion)) + "_" +
                           std::string(to_string(strategy)) + "_" + std::string(to_string(relation)),
                       kit.emotion_clause(emotion, strategy, CoplayerRelation::of(relation))});
      }
    }
  }

  struct SystemCase {
    const char* name;
    GameKind game;
    BargainRole role;
    EmotionKind emotion;
    EmotionPromptStrategy strategy;
    Relation relation;
    PromptOrdering ordering;
  };
  using E = EmotionKind;
  using S = EmotionPromptStrategy;
  using R = Relation;
  using O = PromptOrdering;
  const BargainRole dp = BargainRole::DictatorProposer;
  const BargainRole up = BargainRole::UltimatumProposer;
  const BargainRole ur = BargainRole::UltimatumResponder;
  const SystemCase cases[] = {
      {"pd_none", GameKind::PrisonersDilemma, dp, E::None, S::Simple, R::AnotherPerson, O::Basic},
      {"pd_anger_simple", GameKind::PrisonersDilemma, dp, E::Anger, S::Simple, R::AnotherPerson, O::Basic},
      {"pd_fear_coplayer_after_rules", GameKind::PrisonersDilemma, dp, E::Fear, S::CoplayerBased,
       R::Opponent, O::EmotionAfterRules},
      {"bots_none", GameKind::BattleOfSexes, dp, E::None, S::Simple, R::AnotherPerson, O::Basic},
      {"bots_happiness_external", GameKind::BattleOfSexes, dp, E::Happiness, S::ExternalBased,
       R::Colleague, O::Basic},
      {"dictator_none", GameKind::Dictator, dp, E::None, S::Simple, R::AnotherPerson, O::Basic},
      {"dictator_sadness_coplayer", GameKind::Dictator, dp, E::Sadness, S::CoplayerBased,
       R::Colleague, O::Basic},
      {"ultimatum_proposer_none", GameKind::Ultimatum, up, E::None, S::Simple, R::AnotherPerson, O::Basic},
      {"ultimatum_proposer_disgust_simple", GameKind::Ultimatum, up, E::Disgust, S::Simple,
       R::AnotherPerson, O::Basic},
      {"ultimatum_responder_none", GameKind::Ultimatum, ur, E::None, S::Simple, R::AnotherPerson, O::Basic},
      {"ultimatum_responder_anger_external", GameKind::Ultimatum, ur, E::Anger, S::ExternalBased,
       R::Opponent, O::Basic},
  };
  for (const auto& c : cases) {
    auto spec = spec_for(c.game, c.emotion, c.strategy, c.relation, c.ordering);
    spec.role = c.role;
    out.push_back({std::string("system/") + c.name, kit.system_prompt(spec)});
  }

  const MoveLabels pd = default_labels(GameKind::PrisonersDilemma);
  out.push_back({"question/round_0", kit.round_question(0, pd)});
  out.push_back({"question/round_1", kit.round_question(1, pd)});
  out.push_back({"question/scratchpad_3", kit.scratchpad_question(3)});

  const MemoryEntry plain{.round = 2, .my_label = 'J', .opponent_label = 'F', .my_reward = 1, .opponent_reward = 4};
  out.push_back({"memory/plain", kit.memory_update(plain, PipelineFlags{})});
  MemoryEntry rich = plain;
  rich.own_emotion = "angry";
  rich.shown_emotion = "neutral";
  rich.seen_emotion = "happy";
  const PipelineFlags all{true, true, true, true, false};
  out.push_back({"memory/all_flags", kit.memory_update(rich, all)});

  out.push_back({"probe/emotion", kit.emotion_probe()});
  out.push_back({"probe/outer", kit.outer_emotion_probe()});

  const auto coplayer = CoplayerRelation::of(Relation::AnotherPerson);
  out.push_back({"bargain/dictator_100", kit.bargain_request(BargainRole::DictatorProposer, 100, coplayer)});
  out.push_back({"bargain/ultimatum_proposer_1000",
                 kit.bargain_request(BargainRole::UltimatumProposer, 1000, coplayer)});
  out.push_back({"bargain/ultimatum_responder_100_70_30",
                 kit.bargain_request(BargainRole::UltimatumResponder, 100, coplayer, Split{70, 30})});
  return out;
}

GoldenReport compare_with_goldens(const PromptKit& kit, const std::filesystem::path& golden_dir) {
  GoldenReport report;
  for (const auto& prompt : render_prompt_grid(kit)) {
    if (has_placeholder(prompt.text)) report.unbound.push_back(prompt.name);
    std::ifstream in(golden_dir / (prompt.name + ".txt"), std::ios::binary);
    if (!in) {
      report.missing.push_back(prompt.name);
      continue;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    ++report.compared;
    if (buffer.str() != prompt.text) report.mismatched.push_back(prompt.name);
  }
  return report;
}

}  // namespace emogame
