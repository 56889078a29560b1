#pragma once

#include <span>
#include <vector>

#include "emogame/game.hpp"
#include "emogame/strategy.hpp"

namespace emogame {

// Exhaustive enumeration is capped at this many rounds (2^16 sequences).
inline constexpr int kMaxExhaustiveRounds = 16;

// Agent total when playing `agent_moves` against a fresh `opponent`.
int simulate_agent_total(GameKind game, StrategyKind opponent, std::span<const Option> agent_moves);

// Best agent total over all 2^rounds move sequences. TooManyRounds beyond the cap.
int max_payoff_exhaustive(GameKind game, StrategyKind opponent, int rounds);

// Same maximum via dynamic programming over (round, opponent state signature).
int max_payoff_dp(GameKind game, StrategyKind opponent, int rounds);

// A move sequence achieving the DP maximum; ties resolve to Option::First.
std::vector<Option> best_response_plan(GameKind game, StrategyKind opponent, int rounds);

enum class OracleMode { Exhaustive, DynamicProgramming };

int max_attainable_payoff(GameKind game, StrategyKind opponent, int rounds,
                          OracleMode mode = OracleMode::DynamicProgramming);

}  // namespace emogame
