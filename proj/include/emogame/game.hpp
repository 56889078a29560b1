#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emogame/error.hpp"

namespace emogame {

enum class GameKind { PrisonersDilemma, BattleOfSexes, Dictator, Ultimatum };

std::string_view to_string(GameKind game);
GameKind parse_game_kind(std::string_view name);

bool is_repeated(GameKind game);
bool is_bargaining(GameKind game);

// Semantic meaning of a move from the mover's own point of view. In the
// Battle of the Sexes, Cooperate means conceding to the co-player's preferred
// equilibrium and Defect means insisting on one's own.
enum class Action { Cooperate, Defect };

std::string_view to_string(Action action);

// Position of a move in the agent-facing move list: First is {move1}, Second
// is {move2} in the rules templates. Both players' moves are expressed in the
// agent's frame, which is what the agent reads in its memory updates.
//   PD:   First = cooperate, Second = defect (for either player).
//   BotS: First = the co-player's preferred equilibrium,
//         Second = the agent's preferred equilibrium.
enum class Option { First, Second };

// The two single-character labels shown to the agent, {move1} and {move2}.
struct MoveLabels {
  char first = 'J';
  char second = 'F';

  char label(Option option) const { return option == Option::First ? first : second; }
  Option option(char label) const;  // throws IllegalMove
  bool operator==(const MoveLabels&) const = default;
};

// Default labels per game. BotS uses (F, J) so that J is the agent's own
// preference and F the concession, as in the recorded gameplay examples.
MoveLabels default_labels(GameKind game);
void validate_labels(const MoveLabels& labels);  // throws ConfigError

// Agent-frame option for a player's semantic action.
Option agent_option(GameKind game, Action agent_action);
Option coplayer_option(GameKind game, Action coplayer_action);
Action agent_action(GameKind game, Option option);
Action coplayer_action(GameKind game, Option option);

struct Payoff {
  int mine = 0;
  int theirs = 0;
  bool operator==(const Payoff&) const = default;
};

// Agent-frame payoff lookup for the two 2x2 games.
Payoff payoff(GameKind game, Option mine, Option theirs);
// Label-level lookup; throws IllegalMove for labels outside `labels`.
Payoff payoff(GameKind game, const MoveLabels& labels, char mine, char theirs);

struct RoundOutcome {
  Option mine = Option::First;
  Option theirs = Option::First;
  Payoff reward;
  bool operator==(const RoundOutcome&) const = default;
};

struct MatchState {
  int round_index = 0;
  std::vector<RoundOutcome> history;
  Payoff cumulative;

  bool operator==(const MatchState&) const = default;
};

// Returns the successor state; the input is left untouched.
MatchState apply_round(const MatchState& state, Option mine, Option theirs, GameKind game);

enum class Decision { Accepted, Rejected, NotApplicable };

std::string_view to_string(Decision decision);

struct Split {
  long long keep = 0;
  long long give = 0;
  bool operator==(const Split&) const = default;
};

struct BargainState {
  long long total_sum = 0;
  Split split;
  Decision decision = Decision::NotApplicable;
};

enum class BargainRole { DictatorProposer, UltimatumProposer, UltimatumResponder };

std::string_view to_string(BargainRole role);
BargainRole parse_bargain_role(std::string_view name);

struct Payout {
  long long proposer = 0;
  long long responder = 0;
  bool operator==(const Payout&) const = default;
};

void validate_split(const Split& split, long long total_sum);  // throws InvalidSplit
Payout settle_bargain(GameKind game, const BargainState& state);

}  // namespace emogame
