#pragma once

#include <string_view>
#include <vector>

#include "emogame/game.hpp"

namespace emogame {

enum class StrategyKind { NaiveCooperative, Defective, Alternating, Vindictive, Imitating };

inline constexpr StrategyKind kAllStrategies[] = {
    StrategyKind::NaiveCooperative, StrategyKind::Defective, StrategyKind::Alternating,
    StrategyKind::Vindictive, StrategyKind::Imitating};

std::string_view to_string(StrategyKind kind);
// Human-facing row label used in report tables ("Deflecting", "Naive cooperative", ...).
std::string_view display_name(StrategyKind kind);
StrategyKind parse_strategy_kind(std::string_view name);

// Scripted co-player automaton. opponent_history holds the semantic actions
// of the player it faces, from that player's own point of view.
class StrategyState {
 public:
  explicit StrategyState(StrategyKind kind) : kind_(kind) {}

  StrategyKind kind() const { return kind_; }
  const std::vector<Action>& opponent_history() const { return opponent_history_; }
  bool triggered() const { return triggered_; }

  // Next move for round `round_index`; throws HistoryMismatch when the round
  // index disagrees with the number of observed opponent moves.
  Action next(int round_index) const;

  // Records the opponent's action for the round just played.
  void observe(Action opponent_action);

  // Compact key of everything that influences future moves besides the round
  // index. Two states with equal (round, signature) behave identically.
  int signature() const;

 private:
  StrategyKind kind_;
  std::vector<Action> opponent_history_;
  bool triggered_ = false;
};

// Pure form: move for `kind` given the opponent's history so far.
Action scripted_move(StrategyKind kind, const std::vector<Action>& opponent_history,
                     int round_index);

// Agent-frame option that a scripted co-player's semantic action shows up as.
Option bots_semantic_projection(Action coplayer_semantic);

// Responder offer grid: give-fractions applied to a budget.
struct OfferSchedule {
  long long budget = 100;
  std::vector<double> shares;  // strictly increasing, each in [0, 1]

  static std::vector<double> default_shares();  // 0.0, 0.1, ..., 1.0
  void validate() const;                        // throws ConfigError
  std::vector<Split> splits() const;
};

// Offers presented to a responder: floor(share * budget) given, rest kept.
std::vector<Split> responder_offer_schedule(long long budget,
                                            const std::vector<double>& shares =
                                                OfferSchedule::default_shares());

}  // namespace emogame
