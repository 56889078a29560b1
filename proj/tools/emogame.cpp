// emogame: run, replay and report emotional-prompting game experiments.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "emogame/config.hpp"
#include "emogame/report.hpp"
#include "emogame/runner.hpp"

#ifndef EMOGAME_GOLDEN_DIR
#define EMOGAME_GOLDEN_DIR "tests/golden"
#endif

namespace fs = std::filesystem;
using namespace emogame;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string backend = "mock:always-cooperate";
  std::vector<std::string> overrides;
  unsigned jobs = 0;
  bool deterministic = false;
  std::size_t limit = 0;
  std::string templates;
  std::string manifest;
  std::string golden = EMOGAME_GOLDEN_DIR;
};

std::optional<fs::path> templates_of(const Options& o) {
  if (o.templates.empty()) return std::nullopt;
  return fs::path(o.templates);
}

ExperimentConfig load(const Options& o) {
  ExperimentConfig experiment = load_experiment(o.config, o.overrides);
  if (!o.out.empty()) experiment.output_dir = o.out;
  return experiment;
}

fs::path manifest_path(const Options& o) {
  if (!o.manifest.empty()) return o.manifest;
  if (!o.out.empty()) return fs::path(o.out) / kManifestName;
  if (!o.config.empty()) return load(o).output_dir / kManifestName;
  throw Error(ErrorCode::ConfigError, "give --manifest, --out or --config");
}

// Provenance for the run directory; transcripts stay free of it so replays
// compare byte for byte.
void write_run_info(const fs::path& dir, int argc, char** argv, const RunOptions& options) {
  nlohmann::json info{{"backend", options.backend}, {"deterministic", options.deterministic}};
  auto& args = info["argv"] = nlohmann::json::array();
  for (int i = 0; i < argc; ++i) args.push_back(argv[i]);
  std::ofstream out(dir / "run.json", std::ios::binary | std::ios::trunc);
  out << info.dump(2) << '\n';
}

int cmd_run(const Options& o, int argc, char** argv) {
  const ExperimentConfig experiment = load(o);
  RunOptions options;
  options.backend = o.backend;
  options.jobs = o.jobs;
  options.deterministic = o.deterministic;
  if (o.limit > 0) options.stop_after = o.limit;
  options.templates = templates_of(o);
  const RunManifest manifest = run_experiment(experiment, options);
  write_run_info(manifest.run_dir, argc, argv, options);
  std::cout << "manifest: " << (manifest.run_dir / kManifestName).string() << '\n'
            << "entries: " << manifest.entries.size() << " (new " << manifest.newly_run
            << ", resumed " << manifest.skipped << ")\n"
            << "completed: " << manifest.count(TranscriptStatus::Completed)
            << "  aborted: " << manifest.count(TranscriptStatus::Aborted) << '\n';
  return 0;
}

int cmd_report(const Options& o) {
  const fs::path manifest = manifest_path(o);
  const Report report = emit_report(manifest);
  std::cout << "report: " << (manifest.parent_path() / "report.md").string() << '\n'
            << "completed: " << report.completed << "  aborted: " << report.aborted
            << "  flags: " << report.flags.size() << '\n';
  return 0;
}

int cmd_replay(const Options& o) {
  const ReplayDiff diff = replay_manifest(manifest_path(o), templates_of(o), o.jobs);
  std::cout << "replayed: " << diff.compared << "  divergent: " << diff.divergent.size()
            << "  reward mismatches: " << diff.reward_mismatches << '/' << diff.audited_records
            << '\n';
  for (const auto& id : diff.divergent) std::cout << "diverged: " << id << '\n';
  if (!diff.divergent.empty() || diff.reward_mismatches != 0) {
    throw Error(ErrorCode::ReplayDivergence,
                std::to_string(diff.divergent.size()) + " transcript(s) diverged, " +
                    std::to_string(diff.reward_mismatches) + " reward mismatch(es)");
  }
  return 0;
}

int cmd_validate_prompts(const Options& o) {
  const PromptKit kit(o.templates.empty() ? TemplateCatalog::load_default()
                                          : TemplateCatalog::load(o.templates));
  const GoldenReport report = compare_with_goldens(kit, o.golden);
  std::cout << "compared: " << report.compared << "  mismatched: " << report.mismatched.size()
            << "  missing: " << report.missing.size() << "  unbound: " << report.unbound.size()
            << '\n';
  for (const auto& n : report.mismatched) std::cout << "mismatch: " << n << '\n';
  for (const auto& n : report.missing) std::cout << "missing: " << n << '\n';
  for (const auto& n : report.unbound) std::cout << "unbound: " << n << '\n';
  if (!report.ok()) {
    throw Error(ErrorCode::GoldenMismatch, "rendered prompts differ from " + o.golden);
  }
  return 0;
}

int cmd_list_grid(const Options& o) {
  for (const auto& c : load(o).expand()) {
    std::cout << c.match_id() << '\t' << c.snapshot().dump() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emotional prompting experiments for LLM agents in game-theoretic settings"};
  app.require_subcommand(1);
  Options o;

  auto add_config = [&](CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--config", o.config, "experiment YAML file");
    if (required) opt->required();
    cmd->add_option("--override", o.overrides, "section.key=value (repeatable)");
    cmd->add_option("--out", o.out, "run directory (overrides experiment.output)");
  };

  auto* run = app.add_subcommand("run", "run every match of an experiment grid");
  add_config(run, true);
  run->add_option("--backend", o.backend, "live | mock:<policy> | replay:<call logs>");
  run->add_option("--jobs", o.jobs, "concurrent matches (default: hardware threads)");
  run->add_flag("--deterministic", o.deterministic, "zero all wall-clock fields");
  run->add_option("--limit", o.limit, "stop after this many new matches");
  run->add_option("--templates", o.templates, "template directory");

  auto* report = app.add_subcommand("report", "aggregate a run into report.md and CSV tables");
  add_config(report, false);
  report->add_option("--manifest", o.manifest, "manifest.jsonl of the run");

  auto* replay = app.add_subcommand("replay", "re-run a manifest from its call logs and diff");
  add_config(replay, false);
  replay->add_option("--manifest", o.manifest, "manifest.jsonl of the run");
  replay->add_option("--jobs", o.jobs, "concurrent matches");
  replay->add_option("--templates", o.templates, "template directory");

  auto* validate = app.add_subcommand("validate-prompts", "compare rendered prompts with golden files");
  validate->add_option("--templates", o.templates, "template directory");
  validate->add_option("--golden", o.golden, "golden directory");

  auto* list = app.add_subcommand("list-grid", "print the expanded match grid without running");
  add_config(list, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return cmd_run(o, argc, argv);
    if (*report) return cmd_report(o);
    if (*replay) return cmd_replay(o);
    if (*validate) return cmd_validate_prompts(o);
    if (*list) return cmd_list_grid(o);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: IoError: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
