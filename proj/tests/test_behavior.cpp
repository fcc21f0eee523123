#include <numeric>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "tvrec/behavior.hpp"

using namespace tvrec;

namespace {

InteractionTensor one_user(std::vector<TensorCell> cells, int slots = 672) {
  const std::size_t n = cells.size();
  return InteractionTensor(slots, {"u"}, {0, n}, std::move(cells));
}

}  // namespace

TEST_CASE("behavior matrix from counts") {
  // counts (w5, c2): 3 and (w9, c1): 1, split over two items in slot 5
  auto t = one_user({{0, 2, 5, 2}, {1, 2, 5, 1}, {0, 1, 9, 1}});
  auto bm = behavior_matrix(t, 0);
  CHECK(bm.entries().size() == 2);
  CHECK(bm.at(SlotIndex(5), 2) == 0.75);
  CHECK(bm.at(SlotIndex(9), 1) == 0.25);
  CHECK(bm.at(SlotIndex(9), 2) == 0.0);
  CHECK(bm.max() == 0.75);
}

TEST_CASE("single event") {
  auto bm = behavior_matrix(one_user({{3, 1, 1, 1}}), 0);
  REQUIRE(bm.entries().size() == 1);
  CHECK(bm.at(SlotIndex(1), 1) == 1.0);
}

TEST_CASE("user without interactions is an error") {
  InteractionTensor t(672, {"a", "b"}, {0, 1, 1}, {TensorCell{0, 0, 1, 1}});
  CHECK_NOTHROW(behavior_matrix(t, 0));
  CHECK_THROWS_AS(behavior_matrix(t, 1), DataError);
}

TEST_CASE("dense 4-slot 2-channel toy matches the definition") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TensorCell> cells;
    for (int w = 1; w <= 4; ++w)
      for (ChannelIdx c = 0; c < 2; ++c)
        for (ProgramIdx i = 0; i < 3; ++i) {
          const int count = test::uniform_int(rng, 0, 4);
          if (count > 0) cells.push_back({i, c, static_cast<std::uint16_t>(w), static_cast<std::uint32_t>(count)});
        }
    if (cells.empty()) continue;
    auto t = one_user(cells, 4);
    auto bm = behavior_matrix(t, 0);
    auto ref = test::ref_behavior(t, 0, 4, 2);
    double sum = 0;
    for (int w = 1; w <= 4; ++w)
      for (ChannelIdx c = 0; c < 2; ++c) {
        CHECK(bm.at(SlotIndex(w), c) == ref[w][c]);
        sum += bm.at(SlotIndex(w), c);
      }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& e : bm.entries()) CHECK(e.probability > 0.0);
  }
}

TEST_CASE("behavior score examples") {
  BehaviorMatrix bm({{5, 2, 0.75}, {6, 2, 0.10}});
  auto s = behavior_score(bm, SlotIndex(5), 2, 2, 672);
  CHECK(s.score == 0.75);
  CHECK(s.argmax == GroupKey{SlotIndex(5), 2});

  auto never = behavior_score(bm, SlotIndex(5), 2, 7, 672);
  CHECK(never.score == 0.0);
  CHECK(never.argmax == GroupKey{SlotIndex(5), 7});
}

TEST_CASE("argmax ties go to the earliest slot of the span, across the week end") {
  BehaviorMatrix bm({{1, 0, 0.4}, {672, 0, 0.4}, {2, 0, 0.2}});
  auto s = behavior_score(bm, SlotIndex(672), 3, 0, 672);
  CHECK(s.score == 0.4);
  CHECK(s.argmax.slot.value() == 672);
  auto later = behavior_score(bm, SlotIndex(1), 2, 0, 672);
  CHECK(later.argmax.slot.value() == 1);
}

TEST_CASE("score from catalog metadata") {
  Catalog cat({{"p", "c0", test::kMay11 + 3600, test::kMay11 + 3600 + 1800, ""}});
  BehaviorMatrix bm({{6, 0, 0.3}, {7, 0, 0.5}, {8, 0, 0.2}});
  auto s = behavior_score(bm, cat, 0, TimeGrid());
  // 01:00-01:30 closed span covers slots 5, 6, 7
  CHECK(s.score == 0.5);
  CHECK(s.argmax.slot.value() == 7);
}

TEST_CASE("efficient score equals the dense product on random instances") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    auto toy = test::random_toy(rng);
    TimeGrid grid(toy.slots, toy.offset);
    auto bm = behavior_matrix(toy.tensor, 0);
    auto dense = test::ref_behavior(toy.tensor, 0, toy.slots, toy.channels);
    double sum = 0;
    for (const auto& e : bm.entries()) sum += e.probability;
    REQUIRE(sum == doctest::Approx(1.0).epsilon(1e-9));
    for (const auto& id : toy.candidate_ids) {
      const auto p = *toy.catalog.find(id);
      const auto& m = toy.catalog.meta(p);
      const auto got = behavior_score(bm, toy.catalog, p, grid);
      const auto ref = test::ref_behavior_score(dense, test::ref_span(m.start, m.end, toy.slots, toy.offset),
                                                toy.catalog.channel_of(p), toy.channels);
      REQUIRE(std::abs(got.score - ref.score) <= 1e-12);
      REQUIRE(got.argmax.slot.value() == ref.slot);
      REQUIRE(got.argmax.channel == ref.channel);
      REQUIRE(got.score >= 0.0);
      REQUIRE(got.score <= bm.max());
    }
  }
}
