#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emogame/metrics.hpp"

namespace emogame {

// Human reference values, shown next to model rows and never asserted on.
struct BaselineTable {
  static constexpr const char* kDictatorMeanGive = "28.35%";
  static constexpr const char* kUltimatumProposerGive = "41%";
  static constexpr double kRejectionRegionShare = 20.0;  // offers below this share are usually rejected
};

// Scripted strategies as rows, injected emotions as columns.
struct StrategyEmotionTable {
  std::string game;
  std::string model;
  std::string emotion_strategy;
  std::string relation;
  std::string scratchpad;
  std::string metric;
  std::vector<std::string> rows;     // strategy ids, display-name order
  std::vector<std::string> columns;  // emotion ids, alphabetical
  std::vector<std::vector<AggregateRow>> cells;

  std::size_t populated() const;
};

struct ShareBucket {
  std::string model;
  std::string emotion;
  double share = 0.0;  // percent of budget given to the responder
  int offers = 0;
  int accepted = 0;
};

struct Report {
  std::vector<MatchSummary> summaries;
  std::vector<StrategyEmotionTable> tables;
  std::vector<ShareBucket> acceptance;
  std::vector<std::string> flags;  // empty groups and aborted matches
  std::size_t completed = 0;
  std::size_t aborted = 0;
};

Report build_report(std::vector<MatchSummary> summaries,
                    const std::vector<double>& share_grid = OfferSchedule::default_shares());

std::string render_markdown(const Report& report);
std::string render_metrics_csv(const Report& report);
std::string render_acceptance_csv(const Report& report);

// Reads the manifest and its transcripts, then writes report.md, metrics.csv,
// acceptance_by_share.csv and rounds.csv into out_dir (default: the run directory).
Report emit_report(const std::filesystem::path& manifest_path,
                   const std::optional<std::filesystem::path>& out_dir = std::nullopt);

}  // namespace emogame
