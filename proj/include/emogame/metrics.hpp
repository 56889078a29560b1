#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emogame/oracle.hpp"
#include "emogame/transcript.hpp"

namespace emogame {

// Exact non-negative fraction; kept unreduced so 22/31 reads as recorded.
struct Ratio {
  long long num = 0;
  long long den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  double percent() const { return 100.0 * value(); }
  bool operator==(const Ratio& other) const { return num * other.den == other.num * den; }
};

// Fraction of rounds in which the agent played the cooperative move
// (conceding, in the Battle of the Sexes). WrongGameKind for bargaining.
Ratio cooperation_ratio(const Transcript& transcript);
double cooperation_rate(const Transcript& transcript);

// agent_total over the best-response total against the same scripted opponent.
Ratio percent_of_max_ratio(const Transcript& transcript,
                           OracleMode mode = OracleMode::DynamicProgramming);
double percent_of_max(const Transcript& transcript);

double offered_share(const BargainRecord& record);  // 100 * give / total_sum
// Accepted over presented, counting only decisions the agent made.
Ratio acceptance_ratio(std::span<const BargainRecord> records);
double acceptance_rate(std::span<const BargainRecord> records);

struct MatchMetrics {
  std::optional<double> cooperation_rate;
  std::optional<double> percent_of_max;
  std::optional<Ratio> percent_of_max_exact;
  std::optional<double> offered_share;
  std::optional<double> acceptance_rate;
  std::vector<std::pair<double, bool>> responses;  // (give share %, accepted) per offer
};

MatchMetrics compute_metrics(const Transcript& transcript);

// One transcript reduced to its grouping keys and metrics.
struct MatchSummary {
  std::string match_id;
  std::map<std::string, std::string> keys;  // game, opponent, emotion, ...
  TranscriptStatus status = TranscriptStatus::Completed;
  long long agent_total = 0;
  std::optional<long long> max_payoff;
  MatchMetrics metrics;
};

MatchSummary summarize(const std::string& match_id, const Transcript& transcript);

// Keys usable in group_by.
inline constexpr const char* kGroupKeys[] = {"game",     "opponent", "emotion", "emotion_strategy",
                                             "relation", "model",    "budget",  "role",
                                             "scratchpad"};

struct AggregateRow {
  std::vector<std::string> key;  // values in group_by order
  std::string metric;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  int count = 0;    // Completed matches contributing a value
  int aborted = 0;  // excluded from the statistics
  bool empty() const { return count == 0; }
};

// Groups summaries by `group_by` and reduces `metric` ("cooperation_rate",
// "percent_of_max", "offered_share", "acceptance_rate"). Rows are sorted by
// key; the result does not depend on input order.
std::vector<AggregateRow> aggregate(std::span<const MatchSummary> summaries,
                                    const std::vector<std::string>& group_by,
                                    const std::string& metric);

std::optional<double> metric_value(const MatchSummary& summary, const std::string& metric);

}  // namespace emogame
