#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "emogame/prompts.hpp"

#ifndef EMOGAME_TEMPLATE_DIR
#define EMOGAME_TEMPLATE_DIR "resources/templates"
#endif

namespace emogame {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view name, const Enum (&all)[N], std::string_view what) {
  for (auto value : all) {
    if (to_string(value) == name) return value;
  }
  throw Error(ErrorCode::ConfigError,
              "unknown " + std::string(what) + " '" + std::string(name) + "'");
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

// Length of a {identifier} token starting at text[pos] == '{', or 0.
std::size_t placeholder_length(std::string_view text, std::size_t pos) {
  std::size_t end = pos + 1;
  while (end < text.size() && is_ident_char(text[end])) ++end;
  if (end == pos + 1 || end >= text.size() || text[end] != '}') return 0;
  return end - pos + 1;
}

}  // namespace

std::string_view to_string(EmotionKind emotion) {
  switch (emotion) {
    case EmotionKind::None: return "none";
    case EmotionKind::Anger: return "anger";
    case EmotionKind::Disgust: return "disgust";
    case EmotionKind::Fear: return "fear";
    case EmotionKind::Happiness: return "happiness";
    case EmotionKind::Sadness: return "sadness";
    case EmotionKind::Surprise: return "surprise";
  }
  return "unknown";
}

EmotionKind parse_emotion_kind(std::string_view name) {
  static constexpr EmotionKind kAll[] = {EmotionKind::None,      EmotionKind::Anger,
                                         EmotionKind::Disgust,   EmotionKind::Fear,
                                         EmotionKind::Happiness, EmotionKind::Sadness,
                                         EmotionKind::Surprise};
  return parse_enum(name, kAll, "emotion");
}

std::string_view to_string(EmotionPromptStrategy strategy) {
  switch (strategy) {
    case EmotionPromptStrategy::Simple: return "simple";
    case EmotionPromptStrategy::CoplayerBased: return "coplayer";
    case EmotionPromptStrategy::ExternalBased: return "external";
  }
  return "unknown";
}

EmotionPromptStrategy parse_emotion_strategy(std::string_view name) {
  return parse_enum(name, kAllEmotionStrategies, "emotion strategy");
}

std::string_view to_string(Relation relation) {
  switch (relation) {
    case Relation::Colleague: return "colleague";
    case Relation::AnotherPerson: return "another_person";
    case Relation::Opponent: return "opponent";
  }
  return "unknown";
}

Relation parse_relation(std::string_view name) {
  return parse_enum(name, kAllRelations, "relation");
}

CoplayerRelation CoplayerRelation::of(Relation relation) {
  switch (relation) {
    case Relation::Colleague: return {relation, "colleague"};
    case Relation::AnotherPerson: return {relation, "coplayer"};
    case Relation::Opponent: return {relation, "opponent"};
  }
  return {relation, "coplayer"};
}

std::string_view to_string(PromptOrdering ordering) {
  return ordering == PromptOrdering::Basic ? "basic" : "emotion_after_rules";
}

PromptOrdering parse_prompt_ordering(std::string_view name) {
  static constexpr PromptOrdering kAll[] = {PromptOrdering::Basic,
                                            PromptOrdering::EmotionAfterRules};
  return parse_enum(name, kAll, "prompt ordering");
}

TemplateCatalog TemplateCatalog::load(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::MissingTemplate, "template directory not found: " + dir.string());
  }
  TemplateCatalog catalog;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    // Normalize line endings; the file's final newline is not part of the template.
    std::string normalized;
    normalized.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '\r') continue;
      normalized.push_back(text[i]);
    }
    if (!normalized.empty() && normalized.back() == '\n') normalized.pop_back();
    auto key = fs::relative(entry.path(), dir).replace_extension().generic_string();
    catalog.templates_.emplace(std::move(key), std::move(normalized));
  }
  return catalog;
}

std::filesystem::path TemplateCatalog::default_dir() {
  if (const char* env = std::getenv("EMOGAME_TEMPLATES"); env != nullptr && *env != '\0') {
    return env;
  }
  return EMOGAME_TEMPLATE_DIR;
}

TemplateCatalog TemplateCatalog::load_default() { return load(default_dir()); }

const std::string& TemplateCatalog::get(std::string_view name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) {
    throw Error(ErrorCode::MissingTemplate, "no template named '" + std::string(name) + "'");
  }
  return it->second;
}

bool TemplateCatalog::contains(std::string_view name) const {
  return templates_.find(name) != templates_.end();
}

std::vector<std::string> TemplateCatalog::names() const {
  std::vector<std::string> out;
  out.reserve(templates_.size());
  for (const auto& [name, text] : templates_) out.push_back(name);
  return out;
}

std::string substitute(std::string_view tmpl, const TemplateVars& vars) {
  std::string out;
  out.reserve(tmpl.size() + 64);
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    if (tmpl[pos] == '{') {
      if (auto len = placeholder_length(tmpl, pos); len > 0) {
        auto name = tmpl.substr(pos + 1, len - 2);
        auto it = vars.find(name);
        if (it == vars.end()) {
          throw Error(ErrorCode::UnboundPlaceholder,
                      "placeholder {" + std::string(name) + "} has no value");
        }
        out += it->second;
        pos += len;
        continue;
      }
    }
    out.push_back(tmpl[pos++]);
  }
  return out;
}

bool has_placeholder(std::string_view text) {
  for (std::size_t pos = text.find('{'); pos != std::string_view::npos;
       pos = text.find('{', pos + 1)) {
    if (placeholder_length(text, pos) > 0) return true;
  }
  return false;
}

}  // namespace emogame
