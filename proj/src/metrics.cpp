#include "emogame/metrics.hpp"

#include <algorithm>
#include <numeric>

namespace emogame {

namespace {

void require_repeated(const Transcript& t, const char* what) {
  if (!is_repeated(t.config.game)) {
    throw Error(ErrorCode::WrongGameKind, std::string(what) + " needs a PD or BotS transcript");
  }
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"cooperation_rate", "percent_of_max", "offered_share",
                                              "acceptance_rate"};
  return names;
}

}  // namespace

Ratio cooperation_ratio(const Transcript& t) {
  require_repeated(t, "cooperation_rate");
  if (t.rounds.empty()) throw Error(ErrorCode::EmptyGroup, "transcript has no rounds");
  long long cooperative = 0;
  for (const auto& r : t.rounds) {
    if (agent_action(t.config.game, t.config.labels.option(r.agent_move)) == Action::Cooperate) {
      ++cooperative;
    }
  }
  return {cooperative, static_cast<long long>(t.rounds.size())};
}

double cooperation_rate(const Transcript& t) { return cooperation_ratio(t).value(); }

Ratio percent_of_max_ratio(const Transcript& t, OracleMode mode) {
  require_repeated(t, "percent_of_max");
  if (!t.config.opponent) throw Error(ErrorCode::ConfigError, "percent_of_max needs a scripted opponent");
  const int best = max_attainable_payoff(t.config.game, *t.config.opponent, t.config.rounds, mode);
  if (best <= 0) throw Error(ErrorCode::EmptyGroup, "best-response total is zero");
  return {t.agent_total, best};
}

double percent_of_max(const Transcript& t) { return percent_of_max_ratio(t).percent(); }

double offered_share(const BargainRecord& record) {
  if (record.total_sum <= 0) throw Error(ErrorCode::InvalidSplit, "bargain has no budget");
  return 100.0 * static_cast<double>(record.split.give) / static_cast<double>(record.total_sum);
}

Ratio acceptance_ratio(std::span<const BargainRecord> records) {
  Ratio r{0, 0};
  for (const auto& record : records) {
    if (record.decision == Decision::NotApplicable) {
      throw Error(ErrorCode::WrongGameKind, "acceptance_rate needs Ultimatum decisions");
    }
    if (!record.decided_by_agent) continue;
    ++r.den;
    if (record.decision == Decision::Accepted) ++r.num;
  }
  if (r.den == 0) throw Error(ErrorCode::EmptyGroup, "no responder decisions to rate");
  return r;
}

double acceptance_rate(std::span<const BargainRecord> records) {
  return acceptance_ratio(records).value();
}

MatchMetrics compute_metrics(const Transcript& t) {
  MatchMetrics m;
  if (!t.completed()) return m;
  if (is_repeated(t.config.game)) {
    m.cooperation_rate = cooperation_rate(t);
    m.percent_of_max_exact = percent_of_max_ratio(t);
    m.percent_of_max = m.percent_of_max_exact->percent();
    return m;
  }
  const bool responder = t.config.role == BargainRole::UltimatumResponder;
  if (responder) {
    m.acceptance_rate = acceptance_rate(t.bargains);
    for (const auto& b : t.bargains) {
      m.responses.emplace_back(offered_share(b), b.decision == Decision::Accepted);
    }
  } else if (!t.bargains.empty()) {
    m.offered_share = offered_share(t.bargains.front());
  }
  return m;
}

MatchSummary summarize(const std::string& match_id, const Transcript& t) {
  MatchSummary s;
  s.match_id = match_id;
  s.status = t.status;
  s.agent_total = t.agent_total;
  const MatchConfig& c = t.config;
  s.keys["game"] = std::string(to_string(c.game));
  s.keys["emotion"] = std::string(to_string(c.emotion));
  s.keys["emotion_strategy"] = std::string(to_string(c.emotion_strategy));
  s.keys["relation"] = std::string(to_string(c.relation.relation));
  s.keys["model"] = c.model_id;
  s.keys["scratchpad"] = c.flags.do_scratchpad_step ? "true" : "false";
  if (is_repeated(c.game)) {
    s.keys["opponent"] = c.opponent ? std::string(to_string(*c.opponent)) : "";
    s.keys["budget"] = "";
    s.keys["role"] = "";
    if (c.opponent) s.max_payoff = max_attainable_payoff(c.game, *c.opponent, c.rounds);
  } else {
    s.keys["opponent"] = "";
    s.keys["budget"] = std::to_string(c.budget);
    s.keys["role"] = std::string(to_string(c.role));
  }
  s.metrics = compute_metrics(t);
  return s;
}

std::optional<double> metric_value(const MatchSummary& s, const std::string& metric) {
  if (metric == "cooperation_rate") return s.metrics.cooperation_rate;
  if (metric == "percent_of_max") return s.metrics.percent_of_max;
  if (metric == "offered_share") return s.metrics.offered_share;
  if (metric == "acceptance_rate") return s.metrics.acceptance_rate;
  throw Error(ErrorCode::ConfigError, "unknown metric '" + metric + "'");
}

std::vector<AggregateRow> aggregate(std::span<const MatchSummary> summaries,
                                    const std::vector<std::string>& group_by,
                                    const std::string& metric) {
  if (std::find(metric_names().begin(), metric_names().end(), metric) == metric_names().end()) {
    throw Error(ErrorCode::ConfigError, "unknown metric '" + metric + "'");
  }
  for (const auto& key : group_by) {
    if (std::find(std::begin(kGroupKeys), std::end(kGroupKeys), key) == std::end(kGroupKeys)) {
      throw Error(ErrorCode::ConfigError, "unknown group key '" + key + "'");
    }
  }

  struct Bucket {
    std::vector<double> values;
    int aborted = 0;
  };
  std::map<std::vector<std::string>, Bucket> buckets;
  for (const auto& s : summaries) {
    std::vector<std::string> key;
    for (const auto& k : group_by) {
      auto it = s.keys.find(k);
      key.push_back(it == s.keys.end() ? "" : it->second);
    }
    Bucket& bucket = buckets[key];
    if (s.status == TranscriptStatus::Aborted) {
      ++bucket.aborted;
    } else if (auto v = metric_value(s, metric)) {
      bucket.values.push_back(*v);
    }
  }

  std::vector<AggregateRow> rows;
  for (auto& [key, bucket] : buckets) {
    AggregateRow row;
    row.key = key;
    row.metric = metric;
    row.aborted = bucket.aborted;
    row.count = static_cast<int>(bucket.values.size());
    if (!bucket.values.empty()) {
      // Sorted so the floating-point sum is independent of input order.
      std::sort(bucket.values.begin(), bucket.values.end());
      row.min = bucket.values.front();
      row.max = bucket.values.back();
      row.mean = std::accumulate(bucket.values.begin(), bucket.values.end(), 0.0) /
                 static_cast<double>(bucket.values.size());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace emogame
