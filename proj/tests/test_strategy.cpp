#include <gtest/gtest.h>

#include <random>

#include "emogame/strategy.hpp"

using namespace emogame;

namespace {

std::vector<Action> random_history(std::mt19937& rng, int n) {
  std::vector<Action> h;
  for (int i = 0; i < n; ++i) h.push_back(rng() % 2 ? Action::Defect : Action::Cooperate);
  return h;
}

}  // namespace

TEST(Strategy, FixedBehaviours) {
  std::mt19937 rng(7);
  for (int n = 0; n < 12; ++n) {
    const auto h = random_history(rng, n);
    EXPECT_EQ(scripted_move(StrategyKind::NaiveCooperative, h, n), Action::Cooperate);
    EXPECT_EQ(scripted_move(StrategyKind::Defective, h, n), Action::Defect);
    EXPECT_EQ(scripted_move(StrategyKind::Alternating, h, n),
              n % 2 == 0 ? Action::Cooperate : Action::Defect);
  }
}

TEST(Strategy, VindictiveHoldsAGrudge) {
  std::vector<Action> h;
  EXPECT_EQ(scripted_move(StrategyKind::Vindictive, h, 0), Action::Cooperate);
  h = {Action::Cooperate, Action::Cooperate};
  EXPECT_EQ(scripted_move(StrategyKind::Vindictive, h, 2), Action::Cooperate);
  h.push_back(Action::Defect);
  for (int extra = 0; extra < 5; ++extra) {
    EXPECT_EQ(scripted_move(StrategyKind::Vindictive, h, static_cast<int>(h.size())), Action::Defect);
    h.push_back(Action::Cooperate);
  }
}

TEST(Strategy, ImitatingCopiesTheLastMove) {
  EXPECT_EQ(scripted_move(StrategyKind::Imitating, {}, 0), Action::Cooperate);
  std::mt19937 rng(11);
  for (int n = 1; n < 10; ++n) {
    const auto h = random_history(rng, n);
    EXPECT_EQ(scripted_move(StrategyKind::Imitating, h, n), h.back());
  }
}

TEST(Strategy, HistoryMismatch) {
  try {
    scripted_move(StrategyKind::Imitating, {Action::Cooperate}, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::HistoryMismatch);
  }
  StrategyState s(StrategyKind::NaiveCooperative);
  EXPECT_THROW(s.next(1), Error);
}

TEST(Strategy, StatefulMatchesPureForm) {
  std::mt19937 rng(3);
  for (auto kind : kAllStrategies) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto h = random_history(rng, 10);
      StrategyState s(kind);
      std::vector<Action> seen;
      for (int r = 0; r < 10; ++r) {
        ASSERT_EQ(s.next(r), scripted_move(kind, seen, r));
        s.observe(h[static_cast<std::size_t>(r)]);
        seen.push_back(h[static_cast<std::size_t>(r)]);
      }
    }
  }
}

TEST(Strategy, EqualSignaturesBehaveIdentically) {
  // Two states at the same round with the same signature produce the same
  // moves for every continuation of opponent actions.
  std::mt19937 rng(5);
  for (auto kind : kAllStrategies) {
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 1 + static_cast<int>(rng() % 6);
      StrategyState a(kind), b(kind);
      for (auto act : random_history(rng, n)) a.observe(act);
      for (auto act : random_history(rng, n)) b.observe(act);
      if (a.signature() != b.signature()) continue;
      const auto tail = random_history(rng, 6);
      for (int r = 0; r < 6; ++r) {
        ASSERT_EQ(a.next(n + r), b.next(n + r));
        a.observe(tail[static_cast<std::size_t>(r)]);
        b.observe(tail[static_cast<std::size_t>(r)]);
      }
    }
  }
}

TEST(Strategy, NamesRoundTrip) {
  for (auto kind : kAllStrategies) EXPECT_EQ(parse_strategy_kind(to_string(kind)), kind);
  EXPECT_EQ(parse_strategy_kind("deflecting"), StrategyKind::Defective);
  EXPECT_EQ(display_name(StrategyKind::Defective), "Deflecting");
  EXPECT_THROW(parse_strategy_kind("random"), Error);
}

TEST(Strategy, BotsProjection) {
  // A defecting co-player insists on its own preference, which is the
  // agent's First option.
  EXPECT_EQ(bots_semantic_projection(Action::Defect), Option::First);
  EXPECT_EQ(bots_semantic_projection(Action::Cooperate), Option::Second);
}

TEST(OfferSchedule, DefaultGrid) {
  const auto splits = responder_offer_schedule(100);
  ASSERT_EQ(splits.size(), 11u);
  for (int i = 0; i <= 10; ++i) {
    EXPECT_EQ(splits[static_cast<std::size_t>(i)], (Split{100 - 10 * i, 10 * i}));
  }
}

TEST(OfferSchedule, SplitsAlwaysSumToBudget) {
  for (long long budget : {1LL, 7LL, 100LL, 999LL, 1000LL, 1000000LL}) {
    for (const auto& s : responder_offer_schedule(budget)) {
      EXPECT_EQ(s.keep + s.give, budget);
      EXPECT_GE(s.give, 0);
    }
  }
  EXPECT_EQ(responder_offer_schedule(1000)[3], (Split{700, 300}));
}

TEST(OfferSchedule, Validation) {
  EXPECT_THROW((OfferSchedule{0, {0.5}}.validate()), Error);
  EXPECT_THROW((OfferSchedule{100, {}}.validate()), Error);
  EXPECT_THROW((OfferSchedule{100, {0.5, 0.5}}.validate()), Error);
  EXPECT_THROW((OfferSchedule{100, {1.5}}.validate()), Error);
  EXPECT_NO_THROW((OfferSchedule{100, {0.0, 0.25, 1.0}}.validate()));
}
