#include "emogame/game.hpp"

#include <array>
#include <cctype>
#include <string>

namespace emogame {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::IllegalMove: return "IllegalMove";
    case ErrorCode::InvalidSplit: return "InvalidSplit";
    case ErrorCode::HistoryMismatch: return "HistoryMismatch";
    case ErrorCode::MissingTemplate: return "MissingTemplate";
    case ErrorCode::UnboundPlaceholder: return "UnboundPlaceholder";
    case ErrorCode::UnparseableMove: return "UnparseableMove";
    case ErrorCode::UnparseableSplit: return "UnparseableSplit";
    case ErrorCode::UnparseableDecision: return "UnparseableDecision";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::ReplayExhausted: return "ReplayExhausted";
    case ErrorCode::ReplayMismatch: return "ReplayMismatch";
    case ErrorCode::PolicyGap: return "PolicyGap";
    case ErrorCode::TooManyRounds: return "TooManyRounds";
    case ErrorCode::WrongGameKind: return "WrongGameKind";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::UnknownOverride: return "UnknownOverride";
    case ErrorCode::GoldenMismatch: return "GoldenMismatch";
    case ErrorCode::ReplayDivergence: return "ReplayDivergence";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(GameKind game) {
  switch (game) {
    case GameKind::PrisonersDilemma: return "prisoners_dilemma";
    case GameKind::BattleOfSexes: return "battle_of_sexes";
    case GameKind::Dictator: return "dictator";
    case GameKind::Ultimatum: return "ultimatum";
  }
  return "unknown";
}

GameKind parse_game_kind(std::string_view name) {
  for (auto game : {GameKind::PrisonersDilemma, GameKind::BattleOfSexes, GameKind::Dictator,
                    GameKind::Ultimatum}) {
    if (to_string(game) == name) return game;
  }
  if (name == "pd") return GameKind::PrisonersDilemma;
  if (name == "bots") return GameKind::BattleOfSexes;
  throw Error(ErrorCode::ConfigError, "unknown game '" + std::string(name) + "'");
}

bool is_repeated(GameKind game) {
  return game == GameKind::PrisonersDilemma || game == GameKind::BattleOfSexes;
}

bool is_bargaining(GameKind game) { return !is_repeated(game); }

std::string_view to_string(Action action) {
  return action == Action::Cooperate ? "cooperate" : "defect";
}

Option MoveLabels::option(char label) const {
  if (label == first) return Option::First;
  if (label == second) return Option::Second;
  throw Error(ErrorCode::IllegalMove,
              std::string("label '") + label + "' is not one of '" + first + "', '" + second + "'");
}

MoveLabels default_labels(GameKind game) {
  if (game == GameKind::BattleOfSexes) return {'F', 'J'};
  return {'J', 'F'};
}

void validate_labels(const MoveLabels& labels) {
  auto printable = [](char c) { return std::isgraph(static_cast<unsigned char>(c)) != 0; };
  if (!printable(labels.first) || !printable(labels.second)) {
    throw Error(ErrorCode::ConfigError, "move labels must be printable characters");
  }
  if (std::tolower(static_cast<unsigned char>(labels.first)) ==
      std::tolower(static_cast<unsigned char>(labels.second))) {
    throw Error(ErrorCode::ConfigError, "move labels must be distinct (case-insensitively)");
  }
}

Option agent_option(GameKind game, Action agent_action) {
  // Agent's cooperate is move1 in both games: PD cooperation, BotS concession.
  (void)game;
  return agent_action == Action::Cooperate ? Option::First : Option::Second;
}

Option coplayer_option(GameKind game, Action coplayer_action) {
  if (game == GameKind::BattleOfSexes) {
    // The co-player's own preference is the agent's move1.
    return coplayer_action == Action::Defect ? Option::First : Option::Second;
  }
  return coplayer_action == Action::Cooperate ? Option::First : Option::Second;
}

Action agent_action(GameKind game, Option option) {
  (void)game;
  return option == Option::First ? Action::Cooperate : Action::Defect;
}

Action coplayer_action(GameKind game, Option option) {
  if (game == GameKind::BattleOfSexes) {
    return option == Option::First ? Action::Defect : Action::Cooperate;
  }
  return option == Option::First ? Action::Cooperate : Action::Defect;
}

Payoff payoff(GameKind game, Option mine, Option theirs) {
  const int i = mine == Option::First ? 0 : 1;
  const int j = theirs == Option::First ? 0 : 1;
  switch (game) {
    case GameKind::PrisonersDilemma: {
      static constexpr std::array<std::array<Payoff, 2>, 2> kTable{{
          {{{3, 3}, {1, 4}}},
          {{{4, 1}, {2, 2}}},
      }};
      return kTable[i][j];
    }
    case GameKind::BattleOfSexes: {
      static constexpr std::array<std::array<Payoff, 2>, 2> kTable{{
          {{{7, 10}, {0, 0}}},
          {{{0, 0}, {10, 7}}},
      }};
      return kTable[i][j];
    }
    default:
      throw Error(ErrorCode::WrongGameKind,
                  std::string("payoff() needs a 2x2 game, got ") + std::string(to_string(game)));
  }
}

Payoff payoff(GameKind game, const MoveLabels& labels, char mine, char theirs) {
  return payoff(game, labels.option(mine), labels.option(theirs));
}

MatchState apply_round(const MatchState& state, Option mine, Option theirs, GameKind game) {
  MatchState next = state;
  const Payoff reward = payoff(game, mine, theirs);
  next.history.push_back({mine, theirs, reward});
  next.round_index = static_cast<int>(next.history.size());
  next.cumulative.mine += reward.mine;
  next.cumulative.theirs += reward.theirs;
  return next;
}

std::string_view to_string(Decision decision) {
  switch (decision) {
    case Decision::Accepted: return "accepted";
    case Decision::Rejected: return "rejected";
    case Decision::NotApplicable: return "not_applicable";
  }
  return "unknown";
}

std::string_view to_string(BargainRole role) {
  switch (role) {
    case BargainRole::DictatorProposer: return "dictator_proposer";
    case BargainRole::UltimatumProposer: return "ultimatum_proposer";
    case BargainRole::UltimatumResponder: return "ultimatum_responder";
  }
  return "unknown";
}

BargainRole parse_bargain_role(std::string_view name) {
  for (auto role : {BargainRole::DictatorProposer, BargainRole::UltimatumProposer,
                    BargainRole::UltimatumResponder}) {
    if (to_string(role) == name) return role;
  }
  throw Error(ErrorCode::ConfigError, "unknown bargaining role '" + std::string(name) + "'");
}

void validate_split(const Split& split, long long total_sum) {
  if (split.keep < 0 || split.give < 0) {
    throw Error(ErrorCode::InvalidSplit, "split parts must be non-negative");
  }
  if (split.keep + split.give != total_sum) {
    throw Error(ErrorCode::InvalidSplit,
                "split " + std::to_string(split.keep) + "," + std::to_string(split.give) +
                    " does not sum to " + std::to_string(total_sum));
  }
}

Payout settle_bargain(GameKind game, const BargainState& state) {
  if (!is_bargaining(game)) {
    throw Error(ErrorCode::WrongGameKind, "settle_bargain needs Dictator or Ultimatum");
  }
  validate_split(state.split, state.total_sum);
  if (game == GameKind::Dictator) return {state.split.keep, state.split.give};
  switch (state.decision) {
    case Decision::Accepted: return {state.split.keep, state.split.give};
    case Decision::Rejected: return {0, 0};
    case Decision::NotApplicable: break;
  }
  throw Error(ErrorCode::InvalidSplit, "ultimatum split has no accept/reject decision");
}

}  // namespace emogame
