#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "emogame/runner.hpp"

namespace emogame {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json entry_json(const ManifestEntry& e) {
  return json{{"match_id", e.match_id},
              {"config_hash", e.config_hash},
              {"repetition", e.repetition},
              {"status", to_string(e.status)},
              {"abort_code", e.abort_code},
              {"reason", e.reason},
              {"transcript", e.transcript},
              {"calls", e.calls},
              {"config", e.config}};
}

ManifestEntry entry_from_json(const json& j) {
  ManifestEntry e;
  e.match_id = j.at("match_id").get<std::string>();
  e.config_hash = j.at("config_hash").get<std::string>();
  e.repetition = j.at("repetition").get<int>();
  e.status = j.at("status").get<std::string>() == "completed" ? TranscriptStatus::Completed
                                                              : TranscriptStatus::Aborted;
  e.abort_code = j.value("abort_code", "");
  e.reason = j.value("reason", "");
  e.transcript = j.at("transcript").get<std::string>();
  e.calls = j.value("calls", "");
  e.config = j.at("config");
  return e;
}

unsigned worker_count(unsigned requested, std::size_t work) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, work)));
}

// Runs body(i) for i in [0, count) on `jobs` threads; the first exception
// stops scheduling and is rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t count, unsigned jobs, Body body) {
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      if (failed) return;
      const std::size_t i = next++;
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> threads;
  for (unsigned t = 1; t < worker_count(jobs, count); ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

PromptKit load_prompts(const std::optional<fs::path>& templates) {
  return PromptKit(templates ? TemplateCatalog::load(*templates) : TemplateCatalog::load_default());
}

}  // namespace

std::size_t RunManifest::count(TranscriptStatus status) const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [&](const ManifestEntry& e) { return e.status == status; }));
}

std::vector<ManifestEntry> read_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read manifest " + manifest_path.string());
  std::vector<ManifestEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(entry_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::IoError, "malformed manifest line in " + manifest_path.string() + ": " +
                                          e.what());
    }
  }
  return out;
}

void write_manifest(const std::vector<ManifestEntry>& entries, const fs::path& manifest_path) {
  const auto tmp = manifest_path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp);
    for (const auto& e : entries) out << entry_json(e).dump() << '\n';
  }
  fs::rename(tmp, manifest_path);
}

RunManifest run_experiment(const ExperimentConfig& experiment, const RunOptions& options) {
  const auto configs = experiment.expand();
  {
    std::set<std::string> ids;
    for (const auto& c : configs) {
      if (!ids.insert(c.match_id()).second) {
        throw Error(ErrorCode::ConfigError, "grid expansion produced a duplicate match " + c.match_id());
      }
    }
  }

  RunManifest manifest;
  manifest.run_dir = experiment.output_dir;
  const fs::path run_dir = experiment.output_dir;
  const fs::path manifest_path = run_dir / kManifestName;
  try {
    fs::create_directories(run_dir / "transcripts");
    fs::create_directories(run_dir / "calls");
  } catch (const fs::filesystem_error& e) {
    throw Error(ErrorCode::IoError, std::string("cannot create run directory: ") + e.what());
  }

  std::map<std::string, ManifestEntry> previous;
  if (fs::exists(manifest_path)) {
    for (auto& e : read_manifest(manifest_path)) previous[e.match_id] = std::move(e);
  }

  std::vector<std::size_t> todo;
  std::map<std::string, ManifestEntry> done;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto id = configs[i].match_id();
    auto it = previous.find(id);
    if (it != previous.end() && it->second.status == TranscriptStatus::Completed &&
        fs::exists(run_dir / it->second.transcript)) {
      done[id] = it->second;
      ++manifest.skipped;
    } else {
      todo.push_back(i);
    }
  }
  if (options.stop_after && todo.size() > *options.stop_after) todo.resize(*options.stop_after);

  const PromptKit prompts = load_prompts(options.templates);
  const auto backend = make_backend(options.backend);

  // Entries are appended as matches finish so an interrupted run keeps its
  // progress; the file is rewritten in grid order at the end.
  std::mutex manifest_mutex;
  std::ofstream append(manifest_path, std::ios::binary | std::ios::app);
  if (!append) throw Error(ErrorCode::IoError, "cannot write " + manifest_path.string());

  parallel_for(todo.size(), options.jobs, [&](std::size_t k) {
    const MatchConfig& config = configs[todo[k]];
    const std::string id = config.match_id();
    auto log = std::make_shared<CallLog>();
    Gateway gateway(backend, log, options.retry, options.deterministic);
    const Transcript t = run_match(config, MatchEnv{prompts, gateway, options.deterministic});

    ManifestEntry entry;
    entry.match_id = id;
    entry.config_hash = config.config_hash();
    entry.repetition = config.repetition;
    entry.status = t.status;
    entry.abort_code = t.abort_code;
    entry.reason = t.abort_reason;
    entry.transcript = (fs::path("transcripts") / (id + ".jsonl")).generic_string();
    entry.calls = (fs::path("calls") / (id + ".jsonl")).generic_string();
    entry.config = config.snapshot();
    log->write_jsonl(run_dir / entry.calls);
    write_transcript(t, run_dir / entry.transcript);

    std::lock_guard lock(manifest_mutex);
    append << entry_json(entry).dump() << '\n';
    append.flush();
    done[id] = std::move(entry);
    ++manifest.newly_run;
  });
  append.close();

  for (const auto& c : configs) {
    if (auto it = done.find(c.match_id()); it != done.end()) manifest.entries.push_back(it->second);
  }
  write_manifest(manifest.entries, manifest_path);
  return manifest;
}

ReplayDiff replay_manifest(const fs::path& manifest_path, const std::optional<fs::path>& templates,
                           unsigned jobs) {
  const auto entries = read_manifest(manifest_path);
  const fs::path run_dir = manifest_path.parent_path();
  const PromptKit prompts = load_prompts(templates);

  ReplayDiff diff;
  std::mutex mutex;
  parallel_for(entries.size(), jobs, [&](std::size_t i) {
    const ManifestEntry& entry = entries[i];
    // A stored transcript that no longer parses counts as divergent.
    std::optional<Transcript> stored;
    std::string expected;
    try {
      const std::string stored_bytes = read_file(run_dir / entry.transcript);
      stored = transcript_from_jsonl(stored_bytes);
      const bool stored_deterministic = stored->started_at == 0.0 && stored->elapsed_ms == 0.0;
      stored->started_at = 0.0;
      stored->elapsed_ms = 0.0;
      expected = stored_deterministic ? stored_bytes : to_jsonl(*stored);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::IoError) throw;
      stored.reset();
    }

    auto backend = std::make_shared<ReplayBackend>(CallLog::read_jsonl(run_dir / entry.calls));
    Gateway gateway(backend, std::make_shared<CallLog>(), RetryPolicy{}, true);
    const Transcript replayed = run_match(entry.match_config(), MatchEnv{prompts, gateway, true});
    const bool same = stored && to_jsonl(replayed) == expected && backend->remaining() == 0;

    const std::size_t records = stored ? stored->rounds.size() + stored->bargains.size() : 0;
    const auto mismatches = stored ? static_cast<std::size_t>(audit_rewards(*stored)) : 0;
    std::lock_guard lock(mutex);
    ++diff.compared;
    if (!same) diff.divergent.push_back(entry.match_id);
    diff.audited_records += records;
    diff.reward_mismatches += mismatches;
  });
  std::sort(diff.divergent.begin(), diff.divergent.end());
  return diff;
}

}  // namespace emogame
