#include "emogame/oracle.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <string>
#include <utility>

namespace emogame {

namespace {

void require_repeated(GameKind game, int rounds) {
  if (!is_repeated(game)) {
    throw Error(ErrorCode::WrongGameKind, "best-response oracle needs a 2x2 game");
  }
  if (rounds < 0) throw Error(ErrorCode::ConfigError, "rounds must be non-negative");
}

// One round: opponent moves from its current state, agent plays `mine`.
int step(GameKind game, StrategyState& opponent, int round, Option mine) {
  const Option theirs = coplayer_option(game, opponent.next(round));
  opponent.observe(agent_action(game, mine));
  return payoff(game, mine, theirs).mine;
}

class DpSolver {
 public:
  DpSolver(GameKind game, int rounds) : game_(game), rounds_(rounds) {}

  int value(int round, const StrategyState& state) {
    if (round == rounds_) return 0;
    const auto key = std::make_pair(round, state.signature());
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    int best = std::numeric_limits<int>::min();
    for (Option mine : {Option::First, Option::Second}) {
      StrategyState next = state;
      const int gain = step(game_, next, round, mine);
      best = std::max(best, gain + value(round + 1, next));
    }
    memo_.emplace(key, best);
    return best;
  }

 private:
  GameKind game_;
  int rounds_;
  std::map<std::pair<int, int>, int> memo_;
};

}  // namespace

int simulate_agent_total(GameKind game, StrategyKind opponent, std::span<const Option> agent_moves) {
  require_repeated(game, 0);
  StrategyState state(opponent);
  int total = 0;
  for (std::size_t round = 0; round < agent_moves.size(); ++round) {
    total += step(game, state, static_cast<int>(round), agent_moves[round]);
  }
  return total;
}

int max_payoff_exhaustive(GameKind game, StrategyKind opponent, int rounds) {
  require_repeated(game, rounds);
  if (rounds > kMaxExhaustiveRounds) {
    throw Error(ErrorCode::TooManyRounds,
                std::to_string(rounds) + " rounds exceeds the exhaustive cap of " +
                    std::to_string(kMaxExhaustiveRounds));
  }
  int best = 0;
  std::vector<Option> moves(static_cast<std::size_t>(rounds));
  const unsigned long sequences = 1UL << rounds;
  for (unsigned long mask = 0; mask < sequences; ++mask) {
    for (int r = 0; r < rounds; ++r) {
      moves[static_cast<std::size_t>(r)] = (mask >> r) & 1UL ? Option::Second : Option::First;
    }
    const int total = simulate_agent_total(game, opponent, moves);
    if (mask == 0 || total > best) best = total;
  }
  return best;
}

int max_payoff_dp(GameKind game, StrategyKind opponent, int rounds) {
  require_repeated(game, rounds);
  DpSolver solver(game, rounds);
  return solver.value(0, StrategyState(opponent));
}

std::vector<Option> best_response_plan(GameKind game, StrategyKind opponent, int rounds) {
  require_repeated(game, rounds);
  DpSolver solver(game, rounds);
  std::vector<Option> plan;
  plan.reserve(static_cast<std::size_t>(rounds));
  StrategyState state(opponent);
  for (int round = 0; round < rounds; ++round) {
    const int target = solver.value(round, state);
    for (Option mine : {Option::First, Option::Second}) {
      StrategyState next = state;
      const int gain = step(game, next, round, mine);
      if (gain + solver.value(round + 1, next) == target) {
        plan.push_back(mine);
        state = std::move(next);
        break;
      }
    }
  }
  return plan;
}

int max_attainable_payoff(GameKind game, StrategyKind opponent, int rounds, OracleMode mode) {
  return mode == OracleMode::Exhaustive ? max_payoff_exhaustive(game, opponent, rounds)
                                        : max_payoff_dp(game, opponent, rounds);
}

}  // namespace emogame
