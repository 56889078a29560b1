#include "emogame/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace emogame {

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::NaiveCooperative: return "naive_cooperative";
    case StrategyKind::Defective: return "defective";
    case StrategyKind::Alternating: return "alternating";
    case StrategyKind::Vindictive: return "vindictive";
    case StrategyKind::Imitating: return "imitating";
  }
  return "unknown";
}

std::string_view display_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::NaiveCooperative: return "Naive cooperative";
    case StrategyKind::Defective: return "Deflecting";
    case StrategyKind::Alternating: return "Alternating";
    case StrategyKind::Vindictive: return "Vindictive";
    case StrategyKind::Imitating: return "Imitating";
  }
  return "Unknown";
}

StrategyKind parse_strategy_kind(std::string_view name) {
  for (auto kind : kAllStrategies) {
    if (to_string(kind) == name) return kind;
  }
  // Names used elsewhere for the same automata.
  if (name == "deflecting") return StrategyKind::Defective;
  if (name == "alternative" || name == "alterating") return StrategyKind::Alternating;
  if (name == "imitative") return StrategyKind::Imitating;
  throw Error(ErrorCode::ConfigError, "unknown strategy '" + std::string(name) + "'");
}

Action scripted_move(StrategyKind kind, const std::vector<Action>& opponent_history,
                     int round_index) {
  if (round_index < 0 || static_cast<std::size_t>(round_index) != opponent_history.size()) {
    throw Error(ErrorCode::HistoryMismatch,
                "round " + std::to_string(round_index) + " but " +
                    std::to_string(opponent_history.size()) + " observed opponent moves");
  }
  switch (kind) {
    case StrategyKind::NaiveCooperative:
      return Action::Cooperate;
    case StrategyKind::Defective:
      return Action::Defect;
    case StrategyKind::Alternating:
      return round_index % 2 == 0 ? Action::Cooperate : Action::Defect;
    case StrategyKind::Vindictive: {
      const bool grudge = std::find(opponent_history.begin(), opponent_history.end(),
                                    Action::Defect) != opponent_history.end();
      return grudge ? Action::Defect : Action::Cooperate;
    }
    case StrategyKind::Imitating:
      return opponent_history.empty() ? Action::Cooperate : opponent_history.back();
  }
  return Action::Cooperate;
}

Action StrategyState::next(int round_index) const {
  if (kind_ == StrategyKind::Vindictive &&
      static_cast<std::size_t>(round_index) == opponent_history_.size()) {
    return triggered_ ? Action::Defect : Action::Cooperate;
  }
  return scripted_move(kind_, opponent_history_, round_index);
}

void StrategyState::observe(Action opponent_action) {
  opponent_history_.push_back(opponent_action);
  if (opponent_action == Action::Defect) triggered_ = true;
}

int StrategyState::signature() const {
  switch (kind_) {
    case StrategyKind::Vindictive:
      return triggered_ ? 1 : 0;
    case StrategyKind::Imitating:
      if (opponent_history_.empty()) return 0;
      return opponent_history_.back() == Action::Cooperate ? 1 : 2;
    default:
      return 0;
  }
}

Option bots_semantic_projection(Action coplayer_semantic) {
  return coplayer_option(GameKind::BattleOfSexes, coplayer_semantic);
}

std::vector<double> OfferSchedule::default_shares() {
  std::vector<double> shares;
  for (int i = 0; i <= 10; ++i) shares.push_back(i / 10.0);
  return shares;
}

void OfferSchedule::validate() const {
  if (budget <= 0) throw Error(ErrorCode::ConfigError, "offer budget must be positive");
  if (shares.empty()) throw Error(ErrorCode::ConfigError, "offer schedule has no shares");
  for (std::size_t i = 0; i < shares.size(); ++i) {
    if (!(shares[i] >= 0.0 && shares[i] <= 1.0)) {
      throw Error(ErrorCode::ConfigError, "offer share outside [0, 1]");
    }
    if (i > 0 && !(shares[i] > shares[i - 1])) {
      throw Error(ErrorCode::ConfigError, "offer shares must be strictly increasing");
    }
  }
}

std::vector<Split> OfferSchedule::splits() const {
  validate();
  std::vector<Split> out;
  out.reserve(shares.size());
  for (double share : shares) {
    // Shares like 0.3 are not exact in binary; nudge before flooring so
    // 0.3 * 100 gives 30 rather than 29.
    auto give = static_cast<long long>(std::floor(share * static_cast<double>(budget) + 1e-9));
    give = std::clamp(give, 0LL, budget);
    out.push_back({budget - give, give});
  }
  return out;
}

std::vector<Split> responder_offer_schedule(long long budget, const std::vector<double>& shares) {
  return OfferSchedule{budget, shares}.splits();
}

}  // namespace emogame
