#include "emogame/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "emogame/runner.hpp"

namespace emogame {

namespace fs = std::filesystem;

namespace {

std::string number(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string optional_number(const std::optional<double>& v) { return v ? number(*v) : ""; }

std::string game_title(const std::string& game) {
  return std::string(parse_game_kind(game) == GameKind::PrisonersDilemma ? "Prisoner's Dilemma"
                     : parse_game_kind(game) == GameKind::BattleOfSexes  ? "Battle of the Sexes"
                     : parse_game_kind(game) == GameKind::Dictator       ? "Dictator"
                                                                         : "Ultimatum");
}

std::string strategy_caption(const std::string& emotion_strategy) {
  if (emotion_strategy == "coplayer") return "emotion linked with a coplayer";
  if (emotion_strategy == "external") return "emotion linked with an outer reason";
  return "simple emotion";
}

std::string metric_caption(const std::string& metric) {
  return metric == "percent_of_max" ? "Percentage of the maximum possible reward"
                                    : "Cooperation rate, %";
}

// Percent, rounded to an integer, for the strategy x emotion tables.
std::string cell_text(const AggregateRow& row, const std::string& metric) {
  if (row.empty()) return "n/a";
  const double scale = metric == "cooperation_rate" || metric == "acceptance_rate" ? 100.0 : 1.0;
  return std::to_string(std::lround(row.mean * scale));
}

const std::string& key(const MatchSummary& s, const char* name) { return s.keys.at(name); }

std::vector<std::string> sorted_strategies(const std::set<std::string>& ids) {
  std::vector<std::string> out(ids.begin(), ids.end());
  std::sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) {
    return display_name(parse_strategy_kind(a)) < display_name(parse_strategy_kind(b));
  });
  return out;
}

std::vector<StrategyEmotionTable> strategy_tables(std::span<const MatchSummary> summaries,
                                                  std::vector<std::string>& flags) {
  // Tables share (game, model, relation, scratchpad); within them each
  // emotion-prompt strategy gets its own block. The no-emotion baseline has a
  // single run per cell and appears in every block.
  using Frame = std::tuple<std::string, std::string, std::string, std::string>;
  std::map<Frame, std::vector<const MatchSummary*>> frames;
  for (const auto& s : summaries) {
    if (!is_repeated(parse_game_kind(key(s, "game")))) continue;
    frames[{key(s, "game"), key(s, "model"), key(s, "relation"), key(s, "scratchpad")}].push_back(&s);
  }

  std::vector<StrategyEmotionTable> tables;
  for (const auto& [frame, members] : frames) {
    std::set<std::string> strategies, emotions, prompt_strategies, baseline_strategies;
    for (const auto* s : members) {
      strategies.insert(key(*s, "opponent"));
      emotions.insert(key(*s, "emotion"));
      if (key(*s, "emotion") == "none") {
        baseline_strategies.insert(key(*s, "emotion_strategy"));
      } else {
        prompt_strategies.insert(key(*s, "emotion_strategy"));
      }
    }
    if (prompt_strategies.empty()) prompt_strategies = baseline_strategies;

    for (const auto& prompt_strategy : prompt_strategies) {
      std::vector<MatchSummary> block;
      for (const auto* s : members) {
        if (key(*s, "emotion") == "none" || key(*s, "emotion_strategy") == prompt_strategy) {
          block.push_back(*s);
        }
      }
      for (const std::string metric : {"percent_of_max", "cooperation_rate"}) {
        StrategyEmotionTable table;
        std::tie(table.game, table.model, table.relation, table.scratchpad) = frame;
        table.emotion_strategy = prompt_strategy;
        table.metric = metric;
        table.rows = sorted_strategies(strategies);
        table.columns.assign(emotions.begin(), emotions.end());

        std::map<std::pair<std::string, std::string>, AggregateRow> by_cell;
        for (auto& row : aggregate(block, {"opponent", "emotion"}, metric)) {
          by_cell[{row.key[0], row.key[1]}] = row;
        }
        for (const auto& strategy : table.rows) {
          auto& cells = table.cells.emplace_back();
          for (const auto& emotion : table.columns) {
            AggregateRow row;
            if (auto it = by_cell.find({strategy, emotion}); it != by_cell.end()) row = it->second;
            row.key = {strategy, emotion};
            row.metric = metric;
            if (row.empty() && metric == "percent_of_max") {
              flags.push_back("EmptyGroup: " + table.game + "/" + table.model + "/" + prompt_strategy +
                              " " + strategy + " x " + emotion);
            }
            cells.push_back(std::move(row));
          }
        }
        tables.push_back(std::move(table));
      }
    }
  }
  return tables;
}

std::vector<ShareBucket> share_buckets(std::span<const MatchSummary> summaries,
                                       const std::vector<double>& grid) {
  // Keyed by share in thousandths of a percent so float noise cannot split buckets.
  using Group = std::pair<std::string, std::string>;
  std::map<Group, std::map<long long, ShareBucket>> groups;
  auto bucket_key = [](double share) { return std::llround(share * 1000.0); };
  for (const auto& s : summaries) {
    if (s.status != TranscriptStatus::Completed || s.metrics.responses.empty()) continue;
    auto& buckets = groups[{key(s, "model"), key(s, "emotion")}];
    for (const auto& [share, accepted] : s.metrics.responses) {
      auto& b = buckets[bucket_key(share)];
      b.share = share;
      ++b.offers;
      if (accepted) ++b.accepted;
    }
  }
  if (groups.empty()) groups[{"all", "all"}];

  std::vector<ShareBucket> out;
  for (auto& [group, buckets] : groups) {
    for (double fraction : grid) {
      auto& b = buckets[bucket_key(100.0 * fraction)];
      if (b.offers == 0) b.share = 100.0 * fraction;
    }
    for (auto& [k, b] : buckets) {
      b.model = group.first;
      b.emotion = group.second;
      out.push_back(b);
    }
  }
  return out;
}

void render_strategy_table(std::ostringstream& md, const StrategyEmotionTable& t) {
  md << "### " << game_title(t.game) << ", " << t.model << "\n\n";
  md << metric_caption(t.metric) << "; " << strategy_caption(t.emotion_strategy)
     << "; co-player: " << t.relation << "; scratchpad: " << (t.scratchpad == "true" ? "on" : "off")
     << ".\n\n";
  md << "| Strategy |";
  for (const auto& c : t.columns) md << ' ' << c << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < t.columns.size(); ++i) md << "---:|";
  md << '\n';
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    md << "| " << display_name(parse_strategy_kind(t.rows[r])) << " |";
    for (const auto& cell : t.cells[r]) md << ' ' << cell_text(cell, t.metric) << " |";
    md << '\n';
  }
  md << '\n';
}

// Model rows x emotion columns for one bargaining metric, with a human row on top.
void render_bargain_table(std::ostringstream& md, std::span<const MatchSummary> summaries,
                          const std::string& metric, const std::string& first_column,
                          const char* human_value) {
  std::set<std::string> models;
  std::set<std::string> emotions{"anger", "disgust", "fear", "happiness", "sadness"};
  for (const auto& s : summaries) {
    models.insert(key(s, "model"));
    if (key(s, "emotion") != "none") emotions.insert(key(s, "emotion"));
  }
  std::map<std::pair<std::string, std::string>, AggregateRow> cells;
  for (auto& row : aggregate(summaries, {"model", "emotion"}, metric)) {
    cells[{row.key[0], row.key[1]}] = row;
  }
  md << "| Model | " << first_column << " |";
  for (const auto& e : emotions) md << ' ' << e << " |";
  md << "\n|---|---:|";
  for (std::size_t i = 0; i < emotions.size(); ++i) md << "---:|";
  md << '\n';
  if (human_value) {
    md << "| Human | " << human_value << " |";
    for (std::size_t i = 0; i < emotions.size(); ++i) md << " - |";
    md << '\n';
  }
  auto text = [&](const std::string& model, const std::string& emotion) {
    auto it = cells.find({model, emotion});
    if (it == cells.end() || it->second.empty()) return std::string("n/a");
    return cell_text(it->second, metric) + "%";
  };
  for (const auto& model : models) {
    md << "| " << model << " | " << text(model, "none") << " |";
    for (const auto& e : emotions) md << ' ' << text(model, e) << " |";
    md << '\n';
  }
  if (models.empty()) {
    md << "| (no runs) | n/a |";
    for (std::size_t i = 0; i < emotions.size(); ++i) md << " n/a |";
    md << '\n';
  }
  md << '\n';
}

std::vector<MatchSummary> filter(std::span<const MatchSummary> summaries, const std::string& game,
                                 const std::string& role = "") {
  std::vector<MatchSummary> out;
  for (const auto& s : summaries) {
    if (key(s, "game") == game && (role.empty() || key(s, "role") == role)) out.push_back(s);
  }
  return out;
}

}  // namespace

std::size_t StrategyEmotionTable::populated() const {
  std::size_t n = 0;
  for (const auto& row : cells) {
    n += static_cast<std::size_t>(std::count_if(row.begin(), row.end(),
                                                [](const AggregateRow& c) { return !c.empty(); }));
  }
  return n;
}

Report build_report(std::vector<MatchSummary> summaries, const std::vector<double>& share_grid) {
  std::sort(summaries.begin(), summaries.end(),
            [](const MatchSummary& a, const MatchSummary& b) { return a.match_id < b.match_id; });
  Report report;
  for (const auto& s : summaries) {
    if (s.status == TranscriptStatus::Completed) {
      ++report.completed;
    } else {
      ++report.aborted;
      report.flags.push_back("Aborted: " + s.match_id);
    }
  }
  report.tables = strategy_tables(summaries, report.flags);
  report.acceptance = share_buckets(summaries, share_grid);
  report.summaries = std::move(summaries);
  return report;
}

std::string render_markdown(const Report& report) {
  std::ostringstream md;
  md << "# Emotional prompting report\n\n";
  md << "Matches: " << report.completed + report.aborted << " (completed " << report.completed
     << ", aborted " << report.aborted << "). Aborted matches are excluded from every mean.\n\n";

  md << "## Repeated games: strategy x emotion\n\n";
  if (report.tables.empty()) md << "No repeated-game matches in this run.\n\n";
  for (const auto& t : report.tables) render_strategy_table(md, t);

  md << "## Dictator: offered share\n\n";
  render_bargain_table(md, filter(report.summaries, "dictator"), "offered_share", "Offered share",
                       BaselineTable::kDictatorMeanGive);
  md << "## Ultimatum proposer: offered share\n\n";
  render_bargain_table(md, filter(report.summaries, "ultimatum", "ultimatum_proposer"),
                       "offered_share", "Offered share", BaselineTable::kUltimatumProposerGive);
  md << "## Ultimatum responder: acceptance rate\n\n";
  render_bargain_table(md, filter(report.summaries, "ultimatum", "ultimatum_responder"),
                       "acceptance_rate", "Acceptance rate", nullptr);
  md << "Human responders commonly reject offers below "
     << std::lround(BaselineTable::kRejectionRegionShare) << "% of the budget.\n\n";

  md << "### Acceptance by offered share\n\n| Model | Emotion | Share | Offers | Accepted | Rate |\n"
        "|---|---|---:|---:|---:|---:|\n";
  for (const auto& b : report.acceptance) {
    md << "| " << b.model << " | " << b.emotion << " | " << std::lround(b.share) << "% | " << b.offers
       << " | " << b.accepted << " | "
       << (b.offers ? std::to_string(std::lround(100.0 * b.accepted / b.offers)) + "%" : "n/a")
       << " |\n";
  }
  md << '\n';

  if (!report.flags.empty()) {
    md << "## Flags\n\n";
    for (const auto& f : report.flags) md << "- " << f << '\n';
    md << '\n';
  }
  return md.str();
}

std::string render_metrics_csv(const Report& report) {
  std::ostringstream csv;
  csv << "match_id";
  for (const char* k : kGroupKeys) csv << ',' << k;
  csv << ",status,agent_total,max_payoff,cooperation_rate,percent_of_max,offered_share,acceptance_rate\n";
  for (const auto& s : report.summaries) {
    csv << csv_field(s.match_id);
    for (const char* k : kGroupKeys) csv << ',' << csv_field(s.keys.at(k));
    csv << ',' << to_string(s.status) << ',' << s.agent_total << ','
        << (s.max_payoff ? std::to_string(*s.max_payoff) : "") << ','
        << optional_number(s.metrics.cooperation_rate) << ','
        << optional_number(s.metrics.percent_of_max) << ','
        << optional_number(s.metrics.offered_share) << ','
        << optional_number(s.metrics.acceptance_rate) << '\n';
  }
  return csv.str();
}

std::string render_acceptance_csv(const Report& report) {
  std::ostringstream csv;
  csv << "model,emotion,share,offers,accepted,acceptance_rate\n";
  for (const auto& b : report.acceptance) {
    csv << csv_field(b.model) << ',' << csv_field(b.emotion) << ',' << number(b.share) << ','
        << b.offers << ',' << b.accepted << ','
        << (b.offers ? number(static_cast<double>(b.accepted) / b.offers) : "") << '\n';
  }
  return csv.str();
}

Report emit_report(const fs::path& manifest_path, const std::optional<fs::path>& out_dir) {
  const auto entries = read_manifest(manifest_path);
  const fs::path run_dir = manifest_path.parent_path();
  const fs::path dest = out_dir.value_or(run_dir);
  fs::create_directories(dest);

  std::vector<MatchSummary> summaries;
  std::ostringstream rounds;
  rounds << "match_id,game,opponent,emotion,emotion_strategy,model,repetition,round,agent_move,"
            "opponent_move,agent_cooperated,agent_reward,opponent_reward,agent_cumulative\n";
  for (const auto& entry : entries) {
    const Transcript t = read_transcript(run_dir / entry.transcript);
    summaries.push_back(summarize(entry.match_id, t));
    if (!is_repeated(t.config.game)) continue;
    long long cumulative = 0;
    for (const auto& r : t.rounds) {
      cumulative += r.rewards.mine;
      const bool cooperated =
          agent_action(t.config.game, t.config.labels.option(r.agent_move)) == Action::Cooperate;
      rounds << entry.match_id << ',' << to_string(t.config.game) << ','
             << to_string(*t.config.opponent) << ',' << to_string(t.config.emotion) << ','
             << to_string(t.config.emotion_strategy) << ',' << csv_field(t.config.model_id) << ','
             << t.config.repetition << ',' << r.round << ',' << r.agent_move << ','
             << r.opponent_move << ',' << (cooperated ? 1 : 0) << ',' << r.rewards.mine << ','
             << r.rewards.theirs << ',' << cumulative << '\n';
    }
  }

  Report report = build_report(std::move(summaries));
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(dest / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dest / name).string());
    out << text;
  };
  write("report.md", render_markdown(report));
  write("metrics.csv", render_metrics_csv(report));
  write("acceptance_by_share.csv", render_acceptance_csv(report));
  write("rounds.csv", rounds.str());
  return report;
}

}  // namespace emogame
