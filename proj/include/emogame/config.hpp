#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "emogame/game.hpp"
#include "emogame/prompts.hpp"
#include "emogame/strategy.hpp"

namespace emogame {

// One fully specified match. Only the fields that apply to `game` are part
// of its snapshot: rounds/opponent/labels for 2x2 games, budget/role for
// bargaining.
struct MatchConfig {
  GameKind game = GameKind::PrisonersDilemma;
  std::optional<StrategyKind> opponent = StrategyKind::NaiveCooperative;
  int rounds = 10;
  MoveLabels labels;

  long long budget = 100;
  BargainRole role = BargainRole::DictatorProposer;
  std::vector<double> offer_shares = OfferSchedule::default_shares();
  // Scripted responder facing an agent proposer: accepts iff give >= threshold * budget.
  double proposer_accept_threshold = 0.2;

  EmotionKind emotion = EmotionKind::None;
  EmotionPromptStrategy emotion_strategy = EmotionPromptStrategy::Simple;
  CoplayerRelation relation = CoplayerRelation::of(Relation::AnotherPerson);
  PromptOrdering ordering = PromptOrdering::Basic;
  PipelineFlags flags;
  std::string opponent_emotion = "happy";
  std::string currency = "dollars";

  std::string model_id = "gpt-3.5-turbo-0125";
  double temperature = 0.0;
  int max_retries = 3;
  int reask_limit = 3;

  int repetition = 0;

  void validate() const;  // throws ConfigError

  // Canonical description without the repetition index.
  nlohmann::json snapshot() const;
  static MatchConfig from_snapshot(const nlohmann::json& snapshot, int repetition);

  std::string config_hash() const;  // 16 hex chars of SHA-256(snapshot)
  std::string match_id() const;     // "<hash>-r<repetition>"
};

struct ExperimentConfig {
  std::vector<GameKind> games{GameKind::PrisonersDilemma};
  std::vector<StrategyKind> opponents{std::begin(kAllStrategies), std::end(kAllStrategies)};
  std::vector<EmotionKind> emotions{std::begin(kGridEmotions), std::end(kGridEmotions)};
  std::vector<EmotionPromptStrategy> emotion_strategies{EmotionPromptStrategy::Simple};
  std::vector<Relation> relations{Relation::AnotherPerson};
  std::vector<std::string> models{"gpt-3.5-turbo-0125"};
  std::vector<long long> budgets{100};
  std::vector<BargainRole> ultimatum_roles{BargainRole::UltimatumProposer,
                                           BargainRole::UltimatumResponder};
  std::vector<bool> scratchpad{false};

  // Non-grid fields copied into every match.
  MatchConfig base;
  std::optional<MoveLabels> pd_labels;
  std::optional<MoveLabels> bots_labels;
  std::vector<std::pair<Relation, std::string>> relation_names;

  int repetitions = 5;
  std::filesystem::path output_dir = "runs/latest";

  void validate() const;

  // Deterministic, duplicate-free expansion: grid x repetitions, repetition
  // innermost. The emotion-strategy axis collapses for the no-emotion baseline.
  std::vector<MatchConfig> expand() const;
};

// Loads a YAML experiment file and applies "section.key=value" overrides.
// Unknown sections or keys (in the file or in overrides) are errors.
ExperimentConfig load_experiment(const std::filesystem::path& path,
                                 const std::vector<std::string>& overrides = {});
ExperimentConfig parse_experiment(std::string_view yaml_text,
                                  const std::vector<std::string>& overrides = {});

// Every addressable "section.key".
std::vector<std::string> known_config_keys();

}  // namespace emogame
