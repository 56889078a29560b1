#include <string>

#include "emogame/prompts.hpp"

namespace emogame {

namespace {

std::string emotion_template_name(EmotionKind emotion, EmotionPromptStrategy strategy) {
  return "emotion/" + std::string(to_string(emotion)) + "_" + std::string(to_string(strategy));
}

std::string checked(std::string text) {
  if (has_placeholder(text)) {
    throw Error(ErrorCode::UnboundPlaceholder, "rendered prompt still has a placeholder: " + text);
  }
  return text;
}

std::string rules_template(GameKind game, BargainRole role, bool with_emotion) {
  switch (game) {
    case GameKind::PrisonersDilemma: return "pd_rules";
    case GameKind::BattleOfSexes: return "bots_rules";
    case GameKind::Dictator: return with_emotion ? "dictator_rules_emotion" : "dictator_rules";
    case GameKind::Ultimatum:
      if (role == BargainRole::UltimatumResponder) {
        return with_emotion ? "ultimatum_rules_2_emotion" : "ultimatum_rules_2";
      }
      return with_emotion ? "ultimatum_rules_1_emotion" : "ultimatum_rules_1";
  }
  return "pd_rules";
}

}  // namespace

std::string PromptKit::render(std::string_view name, const TemplateVars& vars) const {
  return substitute(catalog_.get(name), vars);
}

std::string PromptKit::emotion_clause(EmotionKind emotion, EmotionPromptStrategy strategy,
                                      const CoplayerRelation& relation) const {
  if (emotion == EmotionKind::None) return {};
  return checked(render(emotion_template_name(emotion, strategy), {{"coplayer", relation.display}}));
}

std::string PromptKit::system_prompt(const SystemPromptSpec& spec) const {
  const std::string clause = emotion_clause(spec.emotion, spec.emotion_strategy, spec.relation);
  const bool emotional = spec.emotion != EmotionKind::None;
  const std::string& coplayer = spec.relation.display;

  if (is_bargaining(spec.game)) {
    TemplateVars rule_vars{{"coplayer", coplayer},
                           {"currency", spec.currency},
                           {"total_sum", std::to_string(spec.total_sum)}};
    if (emotional) rule_vars.emplace("emotion", clause);
    const std::string env = render("environment", {{"coplayer", coplayer}});
    const std::string rules = render(rules_template(spec.game, spec.role, emotional), rule_vars);
    return checked(env + "\n" + rules);
  }

  const TemplateVars move_vars{{"coplayer", coplayer},
                               {"currency", spec.currency},
                               {"move1", std::string(1, spec.labels.first)},
                               {"move2", std::string(1, spec.labels.second)}};
  const std::string rules = render(rules_template(spec.game, spec.role, false), move_vars);
  const std::string final_instructions = render("final_instruction", move_vars);

  if (!emotional) {
    const std::string env = render("environment", {{"coplayer", coplayer}});
    return checked(render("layout_basic", {{"enviroment", env},
                                           {"game_rules", rules},
                                           {"final_instructions", final_instructions}}));
  }
  if (spec.ordering == PromptOrdering::EmotionAfterRules) {
    const std::string env = render("environment", {{"coplayer", coplayer}});
    return checked(render("layout_emotion_after_rules", {{"enviroment", env},
                                                         {"game_rules", rules},
                                                         {"emotion", clause},
                                                         {"final_instructions", final_instructions}}));
  }
  const std::string env = render("environment_emotion", {{"coplayer", coplayer}, {"emotion", clause}});
  return checked(render("layout_basic", {{"enviroment", env},
                                         {"game_rules", rules},
                                         {"final_instructions", final_instructions}}));
}

std::string PromptKit::round_question(int round, const MoveLabels& labels) const {
  return checked(render(round % 2 == 0 ? "round_question_1" : "round_question_2",
                        {{"round", std::to_string(round)},
                         {"move1", std::string(1, labels.first)},
                         {"move2", std::string(1, labels.second)}}));
}

std::string PromptKit::scratchpad_question(int round) const {
  return checked(render("scratchpad", {{"round", std::to_string(round)}}));
}

std::string PromptKit::memory_update(const MemoryEntry& entry, const PipelineFlags& flags,
                                     std::string_view currency) const {
  std::string text = render("memory_update", {{"round", std::to_string(entry.round)},
                                              {"my_step", std::string(1, entry.my_label)},
                                              {"opponent_step", std::string(1, entry.opponent_label)},
                                              {"my_reward", std::to_string(entry.my_reward)},
                                              {"opponent_reward", std::to_string(entry.opponent_reward)},
                                              {"currency", std::string(currency)}});
  if (flags.need_check_emotions && entry.own_emotion) {
    text += " " + render("emotion_update", {{"emotion", *entry.own_emotion}});
  }
  if (flags.memorize_demonstrated_emotions && entry.shown_emotion) {
    text += " " + render("outer_emotion_update", {{"emotion", *entry.shown_emotion}});
  }
  if (flags.memorize_seen_emotions && entry.seen_emotion) {
    text += " " + render("opponent_emotion_update", {{"emotion", *entry.seen_emotion}});
  }
  return checked(std::move(text));
}

std::string PromptKit::emotion_probe() const { return checked(render("emotion_question", {})); }

std::string PromptKit::outer_emotion_probe() const {
  return checked(render("outer_emotion_question", {}));
}

std::string PromptKit::bargain_request(BargainRole role, long long total_sum,
                                       const CoplayerRelation& relation, std::optional<Split> offer,
                                       std::string_view currency) const {
  const TemplateVars vars{{"coplayer", relation.display},
                          {"currency", std::string(currency)},
                          {"total_sum", std::to_string(total_sum)}};
  switch (role) {
    case BargainRole::DictatorProposer:
      return checked(render("dictator_summary", vars));
    case BargainRole::UltimatumProposer:
      return checked(render("ultimatum_summary_1", vars));
    case BargainRole::UltimatumResponder: {
      if (!offer) throw Error(ErrorCode::InvalidSplit, "responder request needs an offer");
      TemplateVars offer_vars = vars;
      offer_vars["keep"] = std::to_string(offer->keep);
      offer_vars["give"] = std::to_string(offer->give);
      return checked(render("ultimatum_offer", offer_vars) + "\n\n" +
                     render("ultimatum_summary_2", vars));
    }
  }
  return {};
}

}  // namespace emogame
