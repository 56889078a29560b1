#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emogame/game.hpp"

namespace emogame {

enum class EmotionKind { None, Anger, Disgust, Fear, Happiness, Sadness, Surprise };

// The default experiment grid: five injected emotions plus the baseline.
inline constexpr EmotionKind kGridEmotions[] = {EmotionKind::Anger,     EmotionKind::Disgust,
                                                EmotionKind::Fear,      EmotionKind::Happiness,
                                                EmotionKind::Sadness,   EmotionKind::None};
inline constexpr EmotionKind kTemplatedEmotions[] = {
    EmotionKind::Anger,     EmotionKind::Disgust, EmotionKind::Fear,
    EmotionKind::Happiness, EmotionKind::Sadness, EmotionKind::Surprise};

std::string_view to_string(EmotionKind emotion);  // "anger", ..., "none"
EmotionKind parse_emotion_kind(std::string_view name);

enum class EmotionPromptStrategy { Simple, CoplayerBased, ExternalBased };

inline constexpr EmotionPromptStrategy kAllEmotionStrategies[] = {
    EmotionPromptStrategy::Simple, EmotionPromptStrategy::CoplayerBased,
    EmotionPromptStrategy::ExternalBased};

std::string_view to_string(EmotionPromptStrategy strategy);  // "simple", "coplayer", "external"
EmotionPromptStrategy parse_emotion_strategy(std::string_view name);

enum class Relation { Colleague, AnotherPerson, Opponent };

inline constexpr Relation kAllRelations[] = {Relation::Colleague, Relation::AnotherPerson,
                                             Relation::Opponent};

std::string_view to_string(Relation relation);
Relation parse_relation(std::string_view name);

// How the co-player is named wherever {coplayer} appears.
struct CoplayerRelation {
  Relation relation = Relation::AnotherPerson;
  std::string display;

  static CoplayerRelation of(Relation relation);  // default display string
  bool operator==(const CoplayerRelation&) const = default;
};

enum class PromptOrdering { Basic, EmotionAfterRules };

std::string_view to_string(PromptOrdering ordering);
PromptOrdering parse_prompt_ordering(std::string_view name);

struct PipelineFlags {
  bool need_check_emotions = false;
  bool need_demonstrate_emotions = false;
  bool memorize_seen_emotions = false;
  bool memorize_demonstrated_emotions = false;
  bool do_scratchpad_step = false;

  bool operator==(const PipelineFlags&) const = default;
};

// Vocabulary of the internal emotion probe, in the order it is listed.
inline constexpr std::string_view kProbeEmotionWords[] = {"angry", "sad", "happy", "guilty",
                                                          "neutral"};

// Plain-text template files keyed by relative path without extension,
// e.g. "pd_rules" or "emotion/anger_simple".
class TemplateCatalog {
 public:
  static TemplateCatalog load(const std::filesystem::path& dir);
  // $EMOGAME_TEMPLATES if set, otherwise the directory baked in at build time.
  static TemplateCatalog load_default();
  static std::filesystem::path default_dir();

  const std::string& get(std::string_view name) const;  // throws MissingTemplate
  bool contains(std::string_view name) const;
  std::vector<std::string> names() const;

  void set(std::string name, std::string text) { templates_[std::move(name)] = std::move(text); }

 private:
  std::map<std::string, std::string, std::less<>> templates_;
};

using TemplateVars = std::map<std::string, std::string, std::less<>>;

// Replaces every {name} in `tmpl`. Substituted values are not rescanned.
// Throws UnboundPlaceholder when a {name} has no binding.
std::string substitute(std::string_view tmpl, const TemplateVars& vars);

// True when `text` still contains something shaped like {identifier}.
bool has_placeholder(std::string_view text);

struct SystemPromptSpec {
  GameKind game = GameKind::PrisonersDilemma;
  EmotionKind emotion = EmotionKind::None;
  EmotionPromptStrategy emotion_strategy = EmotionPromptStrategy::Simple;
  CoplayerRelation relation = CoplayerRelation::of(Relation::AnotherPerson);
  PromptOrdering ordering = PromptOrdering::Basic;
  MoveLabels labels;
  std::string currency = "dollars";
  long long total_sum = 100;
  BargainRole role = BargainRole::DictatorProposer;
};

struct MemoryEntry {
  int round = 0;
  char my_label = 'J';
  char opponent_label = 'J';
  int my_reward = 0;
  int opponent_reward = 0;
  std::optional<std::string> own_emotion;
  std::optional<std::string> shown_emotion;
  std::optional<std::string> seen_emotion;
};

class PromptKit {
 public:
  explicit PromptKit(TemplateCatalog catalog) : catalog_(std::move(catalog)) {}

  const TemplateCatalog& catalog() const { return catalog_; }

  // Empty for EmotionKind::None.
  std::string emotion_clause(EmotionKind emotion, EmotionPromptStrategy strategy,
                             const CoplayerRelation& relation) const;

  std::string system_prompt(const SystemPromptSpec& spec) const;

  std::string round_question(int round, const MoveLabels& labels) const;
  std::string scratchpad_question(int round) const;

  std::string memory_update(const MemoryEntry& entry, const PipelineFlags& flags,
                            std::string_view currency = "dollars") const;

  std::string emotion_probe() const;
  std::string outer_emotion_probe() const;

  // User turn that asks for the bargaining answer (split or ACCEPT/REJECT).
  std::string bargain_request(BargainRole role, long long total_sum,
                              const CoplayerRelation& relation,
                              std::optional<Split> offer = std::nullopt,
                              std::string_view currency = "dollars") const;

 private:
  std::string render(std::string_view name, const TemplateVars& vars) const;

  TemplateCatalog catalog_;
};

// ---- golden grid ----

struct RenderedPrompt {
  std::string name;  // relative golden file path without extension
  std::string text;
};

// Every emotion clause (emotion x strategy x relation), the system prompt of
// each game in plain and emotional variants, both round-question variants,
// memory, probe and bargaining turns.
std::vector<RenderedPrompt> render_prompt_grid(const PromptKit& kit);

struct GoldenReport {
  std::size_t compared = 0;
  std::vector<std::string> mismatched;
  std::vector<std::string> missing;  // no golden file for a rendered prompt
  std::vector<std::string> unbound;  // rendered text still has a placeholder
  bool ok() const { return mismatched.empty() && missing.empty() && unbound.empty(); }
};

// Byte comparison against <golden_dir>/<name>.txt.
GoldenReport compare_with_goldens(const PromptKit& kit, const std::filesystem::path& golden_dir);

// ---- reply parsing ----

Option parse_move(std::string_view reply, const MoveLabels& labels);  // UnparseableMove
Split parse_split(std::string_view reply, long long total_sum);  // UnparseableSplit, InvalidSplit
Decision parse_accept(std::string_view reply);                   // UnparseableDecision

struct EmotionWord {
  std::string word;
  bool flagged = false;  // reply had no allowed word; word fell back to "neutral"
};

EmotionWord parse_emotion(std::string_view reply, std::span<const std::string_view> allowed_words);

// "keep,give" as the split answer format asks for it.
std::string format_split(const Split& split);

}  // namespace emogame
