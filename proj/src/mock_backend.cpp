#include <cmath>
#include <memory>
#include <sstream>
#include <string>

#include "emogame/gateway.hpp"
#include "emogame/oracle.hpp"
#include "emogame/prompts.hpp"

namespace emogame {

namespace {

std::string reply_for(const CompletionRequest& request, Option option) {
  return std::string(1, request.context.labels.label(option));
}

MockRule move_rule(std::string_view name) {
  if (name == "always-cooperate" || name == "always-concede") {
    return [](const CompletionRequest& r) { return reply_for(r, Option::First); };
  }
  if (name == "always-defect" || name == "always-own") {
    return [](const CompletionRequest& r) { return reply_for(r, Option::Second); };
  }
  if (name == "alternate") {
    return [](const CompletionRequest& r) {
      return reply_for(r, r.context.round % 2 == 0 ? Option::First : Option::Second);
    };
  }
  if (name == "tit-for-tat") {
    return [](const CompletionRequest& r) {
      const auto& ctx = r.context;
      if (ctx.history.empty()) return reply_for(r, Option::First);
      const Action theirs = coplayer_action(ctx.game, ctx.history.back().theirs);
      return reply_for(r, agent_option(ctx.game, theirs));
    };
  }
  if (name == "best-response") {
    // Recomputed per call: the DP is tiny and the backend is shared across threads.
    return [](const CompletionRequest& r) {
      const auto& ctx = r.context;
      if (!ctx.opponent) {
        throw Error(ErrorCode::PolicyGap, "best-response needs a scripted opponent");
      }
      const auto plan = best_response_plan(ctx.game, *ctx.opponent, ctx.rounds);
      return reply_for(r, plan.at(static_cast<std::size_t>(ctx.round)));
    };
  }
  if (name == "junk") {
    return [](const CompletionRequest&) { return std::string("I refuse to answer"); };
  }
  return nullptr;
}

double parse_fraction(std::string_view text, std::string_view rule) {
  try {
    std::size_t used = 0;
    const double value = std::stod(std::string(text), &used);
    if (used != text.size() || !(value >= 0.0 && value <= 1.0)) throw std::invalid_argument("");
    return value;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError,
                "mock rule '" + std::string(rule) + "' needs a fraction in [0, 1]");
  }
}

}  // namespace

std::string MockBackend::send(const CompletionRequest& request) {
  auto it = policy_.rules.find(request.context.kind);
  if (it == policy_.rules.end() || !it->second) {
    throw Error(ErrorCode::PolicyGap, "mock policy '" + policy_.description + "' has no rule for " +
                                          std::string(to_string(request.context.kind)) + " turns");
  }
  return it->second(request);
}

MockPolicy parse_mock_policy(std::string_view spec) {
  MockPolicy policy;
  policy.description = std::string(spec);
  if (spec.empty()) throw Error(ErrorCode::ConfigError, "empty mock policy");

  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t end = std::min(spec.find('+', start), spec.size());
    const std::string_view rule = spec.substr(start, end - start);
    start = end + 1;
    if (rule.empty()) throw Error(ErrorCode::ConfigError, "empty rule in mock policy");

    const std::size_t eq = rule.find('=');
    const std::string_view key = rule.substr(0, eq);
    const std::string value = eq == std::string_view::npos ? "" : std::string(rule.substr(eq + 1));

    if (eq == std::string_view::npos) {
      if (auto move = move_rule(key)) {
        policy.rules[TurnKind::Move] = std::move(move);
        policy.rules.try_emplace(TurnKind::EmotionProbe,
                                 [](const CompletionRequest&) { return std::string("neutral"); });
        policy.rules.try_emplace(TurnKind::OuterProbe,
                                 [](const CompletionRequest&) { return std::string("neutral"); });
        policy.rules.try_emplace(TurnKind::Scratchpad, [](const CompletionRequest&) {
          return std::string("I will weigh both options before answering.");
        });
      } else if (key == "always-accept") {
        policy.rules[TurnKind::Accept] = [](const CompletionRequest&) { return std::string("ACCEPT"); };
      } else if (key == "always-reject") {
        policy.rules[TurnKind::Accept] = [](const CompletionRequest&) { return std::string("REJECT"); };
      } else {
        throw Error(ErrorCode::ConfigError, "unknown mock rule '" + std::string(rule) + "'");
      }
      continue;
    }

    if (key == "move") {
      policy.rules[TurnKind::Move] = [value](const CompletionRequest&) { return value; };
    } else if (key == "emotion") {
      policy.rules[TurnKind::EmotionProbe] = [value](const CompletionRequest&) { return value; };
    } else if (key == "outer") {
      policy.rules[TurnKind::OuterProbe] = [value](const CompletionRequest&) { return value; };
    } else if (key == "scratchpad") {
      policy.rules[TurnKind::Scratchpad] = [value](const CompletionRequest&) { return value; };
    } else if (key == "split") {
      policy.rules[TurnKind::Split] = [value](const CompletionRequest&) { return value; };
    } else if (key == "split-share") {
      const double share = parse_fraction(value, rule);
      policy.rules[TurnKind::Split] = [share](const CompletionRequest& r) {
        const long long total = r.context.total_sum;
        const auto give =
            static_cast<long long>(std::floor(share * static_cast<double>(total) + 1e-9));
        return format_split({total - give, give});
      };
    } else if (key == "accept-threshold") {
      const double threshold = parse_fraction(value, rule);
      policy.rules[TurnKind::Accept] = [threshold](const CompletionRequest& r) {
        if (!r.context.offer) throw Error(ErrorCode::PolicyGap, "accept turn without an offer");
        const double share = static_cast<double>(r.context.offer->give) /
                             static_cast<double>(r.context.total_sum);
        return std::string(share + 1e-12 >= threshold ? "ACCEPT" : "REJECT");
      };
    } else {
      throw Error(ErrorCode::ConfigError, "unknown mock rule '" + std::string(rule) + "'");
    }
  }
  return policy;
}

}  // namespace emogame
