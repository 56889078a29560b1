#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "emogame/config.hpp"
#include "emogame/gateway.hpp"
#include "emogame/prompts.hpp"
#include "emogame/transcript.hpp"

namespace emogame {

struct MatchEnv {
  const PromptKit& prompts;
  Gateway& gateway;
  bool deterministic = false;  // zero wall-clock fields in the transcript
};

// Each runner returns a transcript even on failure: parse failures past the
// re-ask budget, transport errors and replay mismatches end the match as
// Aborted with the error code recorded. AuthError is not per-match and
// propagates.
Transcript run_repeated_match(const MatchConfig& config, const MatchEnv& env);
Transcript run_dictator(const MatchConfig& config, const MatchEnv& env);
Transcript run_ultimatum(const MatchConfig& config, const MatchEnv& env);
Transcript run_match(const MatchConfig& config, const MatchEnv& env);

// ---- experiments ----

struct ManifestEntry {
  std::string match_id;
  std::string config_hash;
  int repetition = 0;
  TranscriptStatus status = TranscriptStatus::Completed;
  std::string abort_code;
  std::string reason;
  std::string transcript;  // relative to the run directory
  std::string calls;       // relative to the run directory
  nlohmann::json config;   // MatchConfig snapshot

  MatchConfig match_config() const { return MatchConfig::from_snapshot(config, repetition); }
};

struct RunManifest {
  std::filesystem::path run_dir;
  std::vector<ManifestEntry> entries;  // grid order
  std::size_t newly_run = 0;
  std::size_t skipped = 0;  // already Completed on resume

  std::size_t count(TranscriptStatus status) const;
};

struct RunOptions {
  std::string backend = "mock:always-cooperate";
  unsigned jobs = 0;  // 0: one worker per hardware thread
  bool deterministic = false;
  std::optional<std::size_t> stop_after;  // run at most this many new matches
  std::optional<std::filesystem::path> templates;
  RetryPolicy retry;
};

inline constexpr const char* kManifestName = "manifest.jsonl";

// Runs every expanded match not yet Completed in experiment.output_dir and
// writes transcripts/<id>.jsonl, calls/<id>.jsonl and manifest.jsonl.
RunManifest run_experiment(const ExperimentConfig& experiment, const RunOptions& options);

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest_path);
void write_manifest(const std::vector<ManifestEntry>& entries,
                    const std::filesystem::path& manifest_path);

struct ReplayDiff {
  std::size_t compared = 0;
  std::vector<std::string> divergent;  // match ids whose replayed bytes differ
  std::size_t audited_records = 0;
  std::size_t reward_mismatches = 0;
};

// Re-runs every manifest entry against its recorded calls and compares the
// replayed transcript bytes with the stored file. Transcripts are compared
// with their wall-clock fields zeroed.
ReplayDiff replay_manifest(const std::filesystem::path& manifest_path,
                           const std::optional<std::filesystem::path>& templates = std::nullopt,
                           unsigned jobs = 0);

}  // namespace emogame
