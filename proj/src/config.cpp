#include "emogame/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "emogame/digest.hpp"

namespace emogame {

using nlohmann::json;

namespace {

struct KeySpec {
  std::string_view section;
  std::string_view key;
  bool list;
};

constexpr KeySpec kSchema[] = {
    {"experiment", "repetitions", false},
    {"experiment", "output", false},
    {"grid", "game", true},
    {"grid", "opponent", true},
    {"grid", "emotion", true},
    {"grid", "emotion_strategy", true},
    {"grid", "relation", true},
    {"grid", "model", true},
    {"grid", "budget", true},
    {"grid", "ultimatum_role", true},
    {"grid", "scratchpad", true},
    {"match", "rounds", false},
    {"match", "pd_labels", false},
    {"match", "bots_labels", false},
    {"match", "ordering", false},
    {"match", "currency", false},
    {"match", "opponent_emotion", false},
    {"match", "temperature", false},
    {"match", "max_retries", false},
    {"match", "reask_limit", false},
    {"match", "offer_shares", true},
    {"match", "proposer_accept_threshold", false},
    {"pipeline", "need_check_emotions", false},
    {"pipeline", "need_demonstrate_emotions", false},
    {"pipeline", "memorize_seen_emotions", false},
    {"pipeline", "memorize_demonstrated_emotions", false},
    {"coplayer_names", "colleague", false},
    {"coplayer_names", "another_person", false},
    {"coplayer_names", "opponent", false},
};

const KeySpec* find_key(std::string_view section, std::string_view key) {
  for (const auto& spec : kSchema) {
    if (spec.section == section && spec.key == key) return &spec;
  }
  return nullptr;
}

bool section_exists(std::string_view section) {
  return std::any_of(std::begin(kSchema), std::end(kSchema),
                     [&](const KeySpec& spec) { return spec.section == section; });
}

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorCode::ConfigError, message);
}

template <typename T>
T scalar(const YAML::Node& node, std::string_view where) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    config_error("bad value for " + std::string(where));
  }
}

std::vector<std::string> string_list(const YAML::Node& node, std::string_view where) {
  std::vector<std::string> out;
  if (node.IsSequence()) {
    for (const auto& item : node) out.push_back(scalar<std::string>(item, where));
  } else if (node.IsScalar()) {
    out.push_back(node.as<std::string>());
  } else {
    config_error(std::string(where) + " must be a list");
  }
  if (out.empty()) config_error(std::string(where) + " must not be empty");
  return out;
}

bool parse_bool(std::string_view text, std::string_view where) {
  if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
  if (text == "false" || text == "no" || text == "off" || text == "0") return false;
  config_error("expected a boolean for " + std::string(where) + ", got '" + std::string(text) + "'");
}

MoveLabels parse_labels(std::string_view text, std::string_view where) {
  std::string compact;
  for (char c : text) {
    if (c != ',' && c != ' ') compact.push_back(c);
  }
  if (compact.size() != 2) config_error(std::string(where) + " must name two one-letter labels");
  MoveLabels labels{compact[0], compact[1]};
  validate_labels(labels);
  return labels;
}

BargainRole parse_ultimatum_role(std::string_view name) {
  if (name == "proposer") return BargainRole::UltimatumProposer;
  if (name == "responder") return BargainRole::UltimatumResponder;
  return parse_bargain_role(name);
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    auto end = std::min(value.find(',', start), value.size());
    auto item = value.substr(start, end - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.emplace_back(item);
    start = end + 1;
  }
  return out;
}

void apply_override(YAML::Node& root, const std::string& override_text) {
  const auto eq = override_text.find('=');
  if (eq == std::string::npos) {
    throw Error(ErrorCode::UnknownOverride, "override '" + override_text + "' is not key=value");
  }
  const std::string path = override_text.substr(0, eq);
  const std::string value = override_text.substr(eq + 1);
  const auto dot = path.find('.');
  const KeySpec* spec = dot == std::string::npos
                            ? nullptr
                            : find_key(std::string_view(path).substr(0, dot),
                                       std::string_view(path).substr(dot + 1));
  if (spec == nullptr) {
    throw Error(ErrorCode::UnknownOverride, "unknown config key '" + path + "'");
  }
  YAML::Node section = root[std::string(spec->section)];
  if (spec->list) {
    YAML::Node list(YAML::NodeType::Sequence);
    for (const auto& item : split_list(value)) list.push_back(item);
    section[std::string(spec->key)] = list;
  } else {
    section[std::string(spec->key)] = value;
  }
  root[std::string(spec->section)] = section;
}

ExperimentConfig from_yaml(const YAML::Node& root) {
  if (!root.IsMap() && !root.IsNull()) config_error("config must be a mapping of sections");
  for (const auto& section : root) {
    const auto name = section.first.as<std::string>();
    if (!section_exists(name)) config_error("unknown config section '" + name + "'");
    if (!section.second.IsMap()) config_error("section '" + name + "' must be a mapping");
    for (const auto& entry : section.second) {
      const auto key = entry.first.as<std::string>();
      if (find_key(name, key) == nullptr) config_error("unknown config key '" + name + "." + key + "'");
    }
  }

  ExperimentConfig config;
  // A default-constructed YAML::Node counts as defined (null), so absence is
  // reported through optional; explicit nulls are treated as absent too.
  auto get = [&](std::string_view section, std::string_view key) -> std::optional<YAML::Node> {
    const YAML::Node s = root[std::string(section)];
    if (!s.IsDefined() || !s.IsMap()) return std::nullopt;
    const YAML::Node n = s[std::string(key)];
    if (!n.IsDefined() || n.IsNull()) return std::nullopt;
    return n;
  };
  auto where = [](std::string_view section, std::string_view key) {
    return std::string(section) + "." + std::string(key);
  };

  if (auto n = get("experiment", "repetitions")) config.repetitions = scalar<int>(*n, "experiment.repetitions");
  if (auto n = get("experiment", "output")) config.output_dir = scalar<std::string>(*n, "experiment.output");

  if (auto n = get("grid", "game")) {
    config.games.clear();
    for (const auto& s : string_list(*n, "grid.game")) config.games.push_back(parse_game_kind(s));
  }
  if (auto n = get("grid", "opponent")) {
    config.opponents.clear();
    for (const auto& s : string_list(*n, "grid.opponent")) config.opponents.push_back(parse_strategy_kind(s));
  }
  if (auto n = get("grid", "emotion")) {
    config.emotions.clear();
    for (const auto& s : string_list(*n, "grid.emotion")) config.emotions.push_back(parse_emotion_kind(s));
  }
  if (auto n = get("grid", "emotion_strategy")) {
    config.emotion_strategies.clear();
    for (const auto& s : string_list(*n, "grid.emotion_strategy")) {
      config.emotion_strategies.push_back(parse_emotion_strategy(s));
    }
  }
  if (auto n = get("grid", "relation")) {
    config.relations.clear();
    for (const auto& s : string_list(*n, "grid.relation")) config.relations.push_back(parse_relation(s));
  }
  if (auto n = get("grid", "model")) config.models = string_list(*n, "grid.model");
  if (auto n = get("grid", "budget")) {
    config.budgets.clear();
    for (const auto& s : string_list(*n, "grid.budget")) {
      try {
        std::size_t used = 0;
        const long long budget = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        config.budgets.push_back(budget);
      } catch (const std::exception&) {
        config_error("grid.budget entries must be integers, got '" + s + "'");
      }
    }
  }
  if (auto n = get("grid", "ultimatum_role")) {
    config.ultimatum_roles.clear();
    for (const auto& s : string_list(*n, "grid.ultimatum_role")) {
      config.ultimatum_roles.push_back(parse_ultimatum_role(s));
    }
  }
  if (auto n = get("grid", "scratchpad")) {
    config.scratchpad.clear();
    for (const auto& s : string_list(*n, "grid.scratchpad")) {
      config.scratchpad.push_back(parse_bool(s, "grid.scratchpad"));
    }
  }

  MatchConfig& base = config.base;
  if (auto n = get("match", "rounds")) base.rounds = scalar<int>(*n, "match.rounds");
  if (auto n = get("match", "pd_labels")) config.pd_labels = parse_labels(scalar<std::string>(*n, "match.pd_labels"), "match.pd_labels");
  if (auto n = get("match", "bots_labels")) config.bots_labels = parse_labels(scalar<std::string>(*n, "match.bots_labels"), "match.bots_labels");
  if (auto n = get("match", "ordering")) base.ordering = parse_prompt_ordering(scalar<std::string>(*n, "match.ordering"));
  if (auto n = get("match", "currency")) base.currency = scalar<std::string>(*n, "match.currency");
  if (auto n = get("match", "opponent_emotion")) base.opponent_emotion = scalar<std::string>(*n, "match.opponent_emotion");
  if (auto n = get("match", "temperature")) base.temperature = scalar<double>(*n, "match.temperature");
  if (auto n = get("match", "max_retries")) base.max_retries = scalar<int>(*n, "match.max_retries");
  if (auto n = get("match", "reask_limit")) base.reask_limit = scalar<int>(*n, "match.reask_limit");
  if (auto n = get("match", "offer_shares")) {
    base.offer_shares.clear();
    for (const auto& s : string_list(*n, "match.offer_shares")) {
      try {
        base.offer_shares.push_back(std::stod(s));
      } catch (const std::exception&) {
        config_error("match.offer_shares entries must be numbers, got '" + s + "'");
      }
    }
  }
  if (auto n = get("match", "proposer_accept_threshold")) {
    base.proposer_accept_threshold = scalar<double>(*n, "match.proposer_accept_threshold");
  }

  auto flag = [&](std::string_view key, bool& out) {
    if (auto n = get("pipeline", key)) out = parse_bool(scalar<std::string>(*n, where("pipeline", key)), where("pipeline", key));
  };
  flag("need_check_emotions", base.flags.need_check_emotions);
  flag("need_demonstrate_emotions", base.flags.need_demonstrate_emotions);
  flag("memorize_seen_emotions", base.flags.memorize_seen_emotions);
  flag("memorize_demonstrated_emotions", base.flags.memorize_demonstrated_emotions);

  for (auto relation : kAllRelations) {
    if (auto n = get("coplayer_names", to_string(relation))) {
      config.relation_names.emplace_back(relation, scalar<std::string>(*n, where("coplayer_names", to_string(relation))));
    }
  }

  config.validate();
  return config;
}

}  // namespace

// ---- MatchConfig ----

void MatchConfig::validate() const {
  if (is_repeated(game)) {
    if (!opponent) config_error("2x2 matches need a scripted opponent");
    if (rounds <= 0) config_error("rounds must be positive");
    validate_labels(labels);
  } else {
    if (budget <= 0) config_error("budget must be positive");
    const bool role_ok = game == GameKind::Dictator ? role == BargainRole::DictatorProposer
                                                    : role != BargainRole::DictatorProposer;
    if (!role_ok) config_error("bargaining role does not match the game");
    if (role == BargainRole::UltimatumResponder) OfferSchedule{budget, offer_shares}.validate();
    if (!(proposer_accept_threshold >= 0.0 && proposer_accept_threshold <= 1.0)) {
      config_error("proposer_accept_threshold must be in [0, 1]");
    }
  }
  if (relation.display.empty()) config_error("co-player display name must not be empty");
  if (opponent_emotion.empty()) config_error("opponent_emotion must not be empty");
  if (model_id.empty()) config_error("model id must not be empty");
  if (max_retries < 0 || reask_limit < 0) config_error("retry limits must be non-negative");
  if (repetition < 0) config_error("repetition must be non-negative");
}

json MatchConfig::snapshot() const {
  json j{{"game", to_string(game)},
         {"emotion", to_string(emotion)},
         {"emotion_strategy", to_string(emotion_strategy)},
         {"relation", to_string(relation.relation)},
         {"coplayer", relation.display},
         {"currency", currency},
         {"model_id", model_id},
         {"temperature", temperature},
         {"max_retries", max_retries},
         {"reask_limit", reask_limit},
         {"pipeline",
          {{"need_check_emotions", flags.need_check_emotions},
           {"need_demonstrate_emotions", flags.need_demonstrate_emotions},
           {"memorize_seen_emotions", flags.memorize_seen_emotions},
           {"memorize_demonstrated_emotions", flags.memorize_demonstrated_emotions},
           {"do_scratchpad_step", flags.do_scratchpad_step}}}};
  if (is_repeated(game)) {
    j["opponent"] = opponent ? std::string(to_string(*opponent)) : std::string();
    j["rounds"] = rounds;
    j["labels"] = std::string{labels.first, labels.second};
    j["ordering"] = to_string(ordering);
    j["opponent_emotion"] = opponent_emotion;
  } else {
    j["budget"] = budget;
    j["role"] = to_string(role);
    if (role == BargainRole::UltimatumResponder) j["offer_shares"] = offer_shares;
    if (role == BargainRole::UltimatumProposer) {
      j["proposer_accept_threshold"] = proposer_accept_threshold;
    }
  }
  return j;
}

MatchConfig MatchConfig::from_snapshot(const json& j, int repetition_index) {
  try {
    MatchConfig c;
    c.game = parse_game_kind(j.at("game").get<std::string>());
    c.emotion = parse_emotion_kind(j.at("emotion").get<std::string>());
    c.emotion_strategy = parse_emotion_strategy(j.at("emotion_strategy").get<std::string>());
    c.relation = {parse_relation(j.at("relation").get<std::string>()),
                  j.at("coplayer").get<std::string>()};
    c.currency = j.at("currency").get<std::string>();
    c.model_id = j.at("model_id").get<std::string>();
    c.temperature = j.at("temperature").get<double>();
    c.max_retries = j.at("max_retries").get<int>();
    c.reask_limit = j.at("reask_limit").get<int>();
    const auto& p = j.at("pipeline");
    c.flags.need_check_emotions = p.at("need_check_emotions").get<bool>();
    c.flags.need_demonstrate_emotions = p.at("need_demonstrate_emotions").get<bool>();
    c.flags.memorize_seen_emotions = p.at("memorize_seen_emotions").get<bool>();
    c.flags.memorize_demonstrated_emotions = p.at("memorize_demonstrated_emotions").get<bool>();
    c.flags.do_scratchpad_step = p.at("do_scratchpad_step").get<bool>();
    if (is_repeated(c.game)) {
      c.opponent = parse_strategy_kind(j.at("opponent").get<std::string>());
      c.rounds = j.at("rounds").get<int>();
      const auto labels = j.at("labels").get<std::string>();
      if (labels.size() != 2) config_error("snapshot labels must be two characters");
      c.labels = {labels[0], labels[1]};
      c.ordering = parse_prompt_ordering(j.at("ordering").get<std::string>());
      c.opponent_emotion = j.at("opponent_emotion").get<std::string>();
    } else {
      c.opponent.reset();
      c.budget = j.at("budget").get<long long>();
      c.role = parse_bargain_role(j.at("role").get<std::string>());
      if (j.contains("offer_shares")) c.offer_shares = j.at("offer_shares").get<std::vector<double>>();
      if (j.contains("proposer_accept_threshold")) {
        c.proposer_accept_threshold = j.at("proposer_accept_threshold").get<double>();
      }
    }
    c.repetition = repetition_index;
    c.validate();
    return c;
  } catch (const json::exception& e) {
    config_error(std::string("malformed match snapshot: ") + e.what());
  }
}

std::string MatchConfig::config_hash() const { return sha256_hex(snapshot().dump()).substr(0, 16); }

std::string MatchConfig::match_id() const {
  return config_hash() + "-r" + std::to_string(repetition);
}

// ---- ExperimentConfig ----

void ExperimentConfig::validate() const {
  if (repetitions < 1) config_error("repetitions must be at least 1");
  auto non_empty = [](bool ok, const char* what) {
    if (!ok) config_error(std::string("grid axis '") + what + "' must not be empty");
  };
  non_empty(!games.empty(), "game");
  non_empty(!emotions.empty(), "emotion");
  non_empty(!emotion_strategies.empty(), "emotion_strategy");
  non_empty(!relations.empty(), "relation");
  non_empty(!models.empty(), "model");
  non_empty(!scratchpad.empty(), "scratchpad");
  const bool repeated = std::any_of(games.begin(), games.end(), is_repeated);
  const bool bargaining = std::any_of(games.begin(), games.end(), is_bargaining);
  if (repeated) non_empty(!opponents.empty(), "opponent");
  if (bargaining) non_empty(!budgets.empty(), "budget");
  if (std::find(games.begin(), games.end(), GameKind::Ultimatum) != games.end()) {
    non_empty(!ultimatum_roles.empty(), "ultimatum_role");
  }
  if (output_dir.empty()) config_error("experiment.output must not be empty");
}

std::vector<MatchConfig> ExperimentConfig::expand() const {
  validate();
  auto dedupe = [](auto values) {
    decltype(values) out;
    for (const auto& v : values) {
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    return out;
  };
  const auto game_axis = dedupe(games);
  const auto opponent_axis = dedupe(opponents);
  const auto emotion_axis = dedupe(emotions);
  const auto strategy_axis = dedupe(emotion_strategies);
  const auto relation_axis = dedupe(relations);
  const auto model_axis = dedupe(models);
  const auto budget_axis = dedupe(budgets);
  const auto role_axis = dedupe(ultimatum_roles);
  const auto cot_axis = dedupe(scratchpad);

  auto relation_of = [&](Relation relation) {
    CoplayerRelation out = CoplayerRelation::of(relation);
    for (const auto& [r, name] : relation_names) {
      if (r == relation) out.display = name;
    }
    return out;
  };

  // Per-game variants: (opponent) for 2x2 games, (budget, role) for bargaining.
  struct Variant {
    std::optional<StrategyKind> opponent;
    long long budget = 0;
    BargainRole role = BargainRole::DictatorProposer;
  };

  std::vector<MatchConfig> out;
  for (GameKind game : game_axis) {
    std::vector<Variant> variants;
    if (is_repeated(game)) {
      for (auto opponent : opponent_axis) variants.push_back({opponent, 0, {}});
    } else {
      for (auto budget : budget_axis) {
        if (game == GameKind::Dictator) {
          variants.push_back({std::nullopt, budget, BargainRole::DictatorProposer});
        } else {
          for (auto role : role_axis) {
            if (role == BargainRole::DictatorProposer) continue;
            variants.push_back({std::nullopt, budget, role});
          }
        }
      }
    }
    // Scratchpad is a 2x2 pipeline step; bargaining uses a single value.
    const std::vector<bool> cot_values =
        is_repeated(game) ? cot_axis : std::vector<bool>{false};
    for (const auto& variant : variants) {
      for (EmotionKind emotion : emotion_axis) {
        const std::vector<EmotionPromptStrategy> strategies =
            emotion == EmotionKind::None ? std::vector{strategy_axis.front()} : strategy_axis;
        for (auto emotion_strategy : strategies) {
          for (auto relation : relation_axis) {
            for (bool cot : cot_values) {
              for (const auto& model : model_axis) {
                MatchConfig c = base;
                c.game = game;
                c.opponent = variant.opponent;
                c.budget = variant.budget == 0 ? base.budget : variant.budget;
                c.role = variant.role;
                c.emotion = emotion;
                c.emotion_strategy = emotion_strategy;
                c.relation = relation_of(relation);
                c.flags.do_scratchpad_step = cot;
                c.model_id = model;
                if (game == GameKind::PrisonersDilemma) c.labels = pd_labels.value_or(default_labels(game));
                if (game == GameKind::BattleOfSexes) c.labels = bots_labels.value_or(default_labels(game));
                for (int rep = 0; rep < repetitions; ++rep) {
                  c.repetition = rep;
                  c.validate();
                  out.push_back(c);
                }
              }
            }
          }
        }
      }
    }
  }
  return out;
}

ExperimentConfig parse_experiment(std::string_view yaml_text, const std::vector<std::string>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    config_error(std::string("cannot parse config: ") + e.what());
  }
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  for (const auto& o : overrides) apply_override(root, o);
  return from_yaml(root);
}

ExperimentConfig load_experiment(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_error("cannot read config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment(buffer.str(), overrides);
}

std::vector<std::string> known_config_keys() {
  std::vector<std::string> out;
  for (const auto& spec : kSchema) out.push_back(std::string(spec.section) + "." + std::string(spec.key));
  return out;
}

}  // namespace emogame
