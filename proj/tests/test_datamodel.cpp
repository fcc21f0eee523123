#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "tvrec/datamodel.hpp"

using namespace tvrec;
using test::kMay11;

namespace {

constexpr Timestamp kSplit = kMay11 + kSecondsPerWeek;

SplitSpec week_split() { return {kSplit, kSecondsPerWeek, kSecondsPerWeek}; }

ProgramMeta prog(std::string id, std::string ch, Timestamp start, Duration len = 1800) {
  return {std::move(id), std::move(ch), start, start + len, "text"};
}

ViewingLog watch(std::string u, std::string p, std::string ch, Timestamp t, Duration dt = 1200) {
  return {std::move(u), std::move(p), std::move(ch), t, dt};
}

// Training programs a1 (c1, Monday 01:00) and a2 (c2, Tuesday 10:00);
// test programs b1 (c1), b2 (c2) in the following week.
std::vector<ProgramMeta> small_catalog() {
  return {prog("a1", "c1", kMay11 + 3600), prog("a2", "c2", kMay11 + kSecondsPerDay + 36000),
          prog("b1", "c1", kSplit + 3600), prog("b2", "c2", kSplit + 7200)};
}

}  // namespace

TEST_CASE("parse a log line") {
  std::istringstream in(R"({"user":"u1","program":"p9","channel":"c3","t":1554076800,"dt":1200})");
  auto r = parse_logs(in);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0] == ViewingLog{"u1", "p9", "c3", 1554076800, 1200});
  CHECK(r.skipped == 0);
}

TEST_CASE("parse empty input") {
  std::istringstream in("");
  auto r = parse_logs(in);
  CHECK(r.records.empty());
  CHECK(r.skipped == 0);
}

TEST_CASE("malformed lines are skipped and counted") {
  std::istringstream in(
      "{\"user\":\"u1\",\"program\":\"p\",\"channel\":\"c\",\"t\":1,\"dt\":5}\n"
      "{\"user\":\"u1\",\"program\":\"p\",\"channel\":\"c\",\"t\":2}\n"
      "\n"
      "{\"_meta\":{\"seed\":1}}\n"
      "{\"user\":\"u2\",\"program\":\"p\",\"channel\":\"c\",\"t\":3,\"dt\":7}\n");
  auto r = parse_logs(in);
  CHECK(r.records.size() == 2);
  CHECK(r.skipped == 1);
  CHECK(r.lines == 3);
}

TEST_CASE("invalid field values are malformed") {
  std::istringstream in(
      "{\"user\":\"u1\",\"program\":\"p\",\"channel\":\"c\",\"t\":1,\"dt\":-5}\n"
      "{\"user\":\"u1\",\"program\":\"p\",\"channel\":\"c\",\"t\":\"x\",\"dt\":5}\n"
      "{\"user\":\"u1\",\"program\":\"p\",\"channel\":\"c\",\"t\":1,\"dt\":5}\n"
      "{\"user\":\"u1\",\"program\":\"p\",\"channel\":\"c\",\"t\":1,\"dt\":6}\n"
      "{\"user\":\"u1\",\"program\":\"p\",\"channel\":\"c\",\"t\":1,\"dt\":7}\n");
  auto r = parse_logs(in);
  CHECK(r.records.size() == 3);
  CHECK(r.skipped == 2);
}

TEST_CASE("mostly malformed input is a format error") {
  std::istringstream in("not json\n{\"user\":1}\n{\"user\":\"u\",\"program\":\"p\",\"channel\":\"c\",\"t\":1,\"dt\":1}\n");
  CHECK_THROWS_AS(parse_logs(in), DataError);
}

TEST_CASE("unreadable stream is an error") {
  std::istringstream in("x");
  in.setstate(std::ios::badbit);
  CHECK_THROWS_AS(parse_logs(in), DataError);
}

TEST_CASE("parse programs") {
  std::istringstream in(
      "{\"program\":\"p1\",\"channel\":\"c1\",\"start\":100,\"end\":200,\"text\":\"News at nine\"}\n"
      "{\"program\":\"p2\",\"channel\":\"c1\",\"start\":200,\"end\":200,\"text\":\"\"}\n"
      "{\"program\":\"p3\",\"channel\":\"c1\",\"start\":0,\"end\":604800,\"text\":\"\"}\n"
      "{\"program\":\"p4\",\"channel\":\"c1\",\"start\":0,\"end\":604799,\"text\":\"\"}\n");
  auto r = parse_programs(in);
  REQUIRE(r.records.size() == 2);
  CHECK(r.records[0] == ProgramMeta{"p1", "c1", 100, 200, "News at nine"});
  CHECK(r.skipped == 2);
}

TEST_CASE("flip filter boundary") {
  std::vector<ViewingLog> logs{watch("u", "p", "c", 0, 900), watch("u", "p", "c", 1, 899),
                               watch("u", "p", "c", 2, 0)};
  auto kept = filter_flips(logs, 900);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].dt == 900);
  CHECK(filter_flips(logs, 0) == logs);
}

TEST_CASE("flip filter is idempotent and order preserving") {
  std::mt19937_64 rng(3);
  std::vector<ViewingLog> logs;
  for (int i = 0; i < 500; ++i) logs.push_back(watch("u", "p" + std::to_string(i), "c", i, test::uniform_int(rng, 0, 2000)));
  const auto once = filter_flips(logs, 900);
  CHECK(filter_flips(once, 900) == once);
  CHECK(std::is_sorted(once.begin(), once.end(), [](auto& a, auto& b) { return a.t < b.t; }));
  for (const auto& l : once) CHECK(l.dt >= 900);
  CHECK(once.size() == static_cast<std::size_t>(std::count_if(logs.begin(), logs.end(), [](auto& l) { return l.dt >= 900; })));
}

TEST_CASE("split boundaries") {
  std::vector<ProgramMeta> metas{prog("at", "c1", kSplit), prog("before", "c1", kSplit - 1),
                                 prog("old", "c1", kSplit - kSecondsPerWeek - 1), prog("late", "c1", kSplit + kSecondsPerWeek)};
  std::vector<ViewingLog> logs{watch("u", "before", "c1", kSplit - 1), watch("u", "at", "c1", kSplit),
                               watch("u", "at", "c1", kSplit + kSecondsPerWeek),
                               watch("u", "old", "c1", kSplit - kSecondsPerWeek - 1)};
  auto s = split(logs, metas, week_split());
  CHECK(s.test_items == std::vector<std::string>{"at"});
  CHECK(s.train_items == std::vector<std::string>{"before"});
  REQUIRE(s.train.size() == 1);
  CHECK(s.train[0].t == kSplit - 1);
  REQUIRE(s.test.size() == 1);
  CHECK(s.test[0].t == kSplit);
}

TEST_CASE("split outside the data range is an error") {
  std::vector<ViewingLog> logs{watch("u", "a1", "c1", kSplit - 100)};
  CHECK_THROWS_AS(split(logs, small_catalog(), week_split()), DataError);
  std::vector<ViewingLog> later{watch("u", "b1", "c1", kSplit + 100)};
  CHECK_THROWS_AS(split(later, small_catalog(), week_split()), DataError);
  CHECK_THROWS_AS((SplitSpec{kSplit, 0, 10}.validate()), ConfigError);
}

TEST_CASE("train and test item sets are disjoint") {
  std::mt19937_64 rng(11);
  std::vector<ProgramMeta> metas;
  std::vector<ViewingLog> logs;
  for (int i = 0; i < 400; ++i) {
    const Timestamp s = kSplit + test::uniform_int(rng, -2 * kSecondsPerWeek, 2 * kSecondsPerWeek);
    metas.push_back(prog("p" + std::to_string(i), "c1", s));
    logs.push_back(watch("u", "p" + std::to_string(i), "c1", s + 60));
  }
  for (Duration train : {Duration{3600}, kSecondsPerWeek, 3 * kSecondsPerWeek}) {
    auto s = split(logs, metas, {kSplit, train, kSecondsPerWeek});
    std::vector<std::string> both;
    std::set_intersection(s.train_items.begin(), s.train_items.end(), s.test_items.begin(), s.test_items.end(),
                          std::back_inserter(both));
    CHECK(both.empty());
  }
}

TEST_CASE("tensor counts logs per cell") {
  const auto metas = small_catalog();
  Catalog cat(metas);
  TimeGrid grid;
  // slot 5 is Monday 01:00-01:15
  std::vector<ViewingLog> logs{watch("u", "a1", "c1", kMay11 + 3600), watch("u", "a1", "c1", kMay11 + 3600 + 899),
                               watch("u", "b1", "c1", kSplit + 3600)};
  auto t = build_tensor(split(logs, metas, week_split()), cat, grid);
  REQUIRE(t.user_count() == 1);
  const auto a1 = *cat.find("a1");
  const auto c1 = *cat.find_channel("c1");
  CHECK(t.count(0, a1, SlotIndex(5), c1) == 2);
  CHECK(t.count(0, a1, SlotIndex(6), c1) == 0);
  CHECK(t.nonzeros() == 1);
  CHECK(t.total() == 2);
}

TEST_CASE("one log gives a single unit cell") {
  const auto metas = small_catalog();
  Catalog cat(metas);
  std::vector<ViewingLog> logs{watch("u", "a2", "c2", kMay11 + kSecondsPerDay + 36000 + 10),
                               watch("u", "b2", "c2", kSplit + 7200)};
  auto t = build_tensor(split(logs, metas, week_split()), cat, TimeGrid());
  REQUIRE(t.nonzeros() == 1);
  const auto& cell = t.cells(0)[0];
  CHECK(cell.count == 1);
  CHECK(cell.item == *cat.find("a2"));
  CHECK(cell.slot == 96 + 41);
  CHECK(t.count(0, cell.item, SlotIndex(cell.slot), *cat.find_channel("c1")) == 0);
}

TEST_CASE("users need both training and test activity") {
  const auto metas = small_catalog();
  Catalog cat(metas);
  std::vector<ViewingLog> logs{watch("both", "a1", "c1", kMay11 + 3600), watch("both", "b1", "c1", kSplit + 3600),
                               watch("train_only", "a1", "c1", kMay11 + 3600),
                               watch("test_only", "b2", "c2", kSplit + 7200)};
  auto t = build_tensor(split(logs, metas, week_split()), cat, TimeGrid());
  CHECK(t.users() == std::vector<std::string>{"both"});
  CHECK_FALSE(t.find_user("train_only"));
  CHECK(*t.find_user("both") == 0);
}

TEST_CASE("unknown programs are reported") {
  const auto metas = small_catalog();
  std::vector<ViewingLog> logs{watch("u", "zz9", "c1", kMay11 + 3600), watch("u", "b1", "c1", kSplit + 3600)};
  auto s = split(logs, metas, week_split());
  try {
    build_tensor(s, Catalog(metas), TimeGrid());
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("zz9") != std::string::npos);
  }
}

TEST_CASE("catalog rejects duplicates and bad intervals") {
  CHECK_THROWS_AS(Catalog({prog("a", "c", 0), prog("a", "c", 10)}), DataError);
  CHECK_THROWS_AS(Catalog({ProgramMeta{"a", "c", 10, 10, ""}}), DataError);
  Catalog ok({prog("a", "c1", 0), prog("b", "c2", 0), prog("c", "c1", 0)});
  CHECK(ok.channel_count() == 2);
  CHECK(ok.channel_of(*ok.find("c")) == *ok.find_channel("c1"));
  CHECK_FALSE(ok.find("nope"));
}

TEST_CASE("ground truth has set semantics") {
  const auto metas = small_catalog();
  std::vector<ViewingLog> logs{watch("u", "a1", "c1", kMay11 + 3600), watch("u", "b1", "c1", kSplit + 3600),
                               watch("u", "b1", "c1", kSplit + 4000), watch("u", "b2", "c2", kSplit + 7300),
                               watch("v", "a1", "c1", kMay11 + 3700), watch("v", "b2", "c2", kSplit + 7200)};
  auto s = split(logs, metas, week_split());
  CHECK(ground_truth(s, "u") == std::vector<std::string>{"b1", "b2"});
  CHECK(ground_truth(s, "v") == std::vector<std::string>{"b2"});
  auto t = build_tensor(s, Catalog(metas), TimeGrid());
  auto all = ground_truth_all(s, t);
  REQUIRE(all.size() == 2);
  CHECK(all[*t.find_user("u")] == ground_truth(s, "u"));
  CHECK(all[*t.find_user("v")] == ground_truth(s, "v"));
}

TEST_CASE("tensor invariants on random logs") {
  std::mt19937_64 rng(5);
  std::vector<ProgramMeta> metas;
  for (int i = 0; i < 60; ++i) {
    const Timestamp s = kSplit + test::uniform_int(rng, -kSecondsPerWeek, kSecondsPerWeek - 4000);
    metas.push_back(prog("p" + std::to_string(i), "c" + std::to_string(i % 4), s));
  }
  std::vector<ViewingLog> logs;
  for (int i = 0; i < 3000; ++i) {
    const auto& m = metas[test::uniform_int(rng, 0, 59)];
    logs.push_back(watch("u" + std::to_string(test::uniform_int(rng, 0, 40)), m.program, m.channel,
                         kSplit + test::uniform_int(rng, -kSecondsPerWeek, kSecondsPerWeek - 1)));
  }
  Catalog cat(metas);
  TimeGrid grid;
  const auto s = split(logs, metas, week_split());
  const auto t = build_tensor(s, cat, grid);
  REQUIRE(t.user_count() > 0);

  // total count equals the training logs of U on training programs
  std::uint64_t expected = 0;
  for (const auto& l : s.train) {
    if (t.find_user(l.user) && std::binary_search(s.train_items.begin(), s.train_items.end(), l.program)) ++expected;
  }
  CHECK(t.total() == expected);
  for (UserIdx u = 0; u < t.user_count(); ++u) {
    CHECK(t.user_total(u) > 0);
    for (const auto& c : t.cells(u)) {
      CHECK(c.count > 0);
      CHECK(c.slot >= 1);
      CHECK(c.slot <= 672);
    }
  }

  // log order does not matter
  auto shuffled = logs;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto t2 = build_tensor(split(shuffled, metas, week_split()), cat, grid);
  REQUIRE(t2.users() == t.users());
  for (UserIdx u = 0; u < t.user_count(); ++u) {
    REQUIRE(t2.cells(u).size() == t.cells(u).size());
    for (std::size_t i = 0; i < t.cells(u).size(); ++i) {
      CHECK(t2.cells(u)[i].item == t.cells(u)[i].item);
      CHECK(t2.cells(u)[i].slot == t.cells(u)[i].slot);
      CHECK(t2.cells(u)[i].count == t.cells(u)[i].count);
    }
  }

  // binarizing keeps every user's total positive
  const auto b = t.binarized();
  CHECK(b.nonzeros() == t.nonzeros());
  for (UserIdx u = 0; u < b.user_count(); ++u) {
    CHECK(b.user_total(u) > 0);
    for (const auto& c : b.cells(u)) CHECK(c.count == 1);
  }
}

TEST_CASE("tensor constructor validates cells") {
  CHECK_THROWS_AS(InteractionTensor(672, {"u"}, {0, 1}, {TensorCell{0, 0, 1, 0}}), InvariantError);
  CHECK_THROWS_AS(InteractionTensor(672, {"u"}, {0, 1}, {TensorCell{0, 0, 673, 1}}), InvariantError);
  CHECK_THROWS_AS(InteractionTensor(672, {"u"}, {0, 2}, {TensorCell{0, 0, 3, 1}}), InvariantError);
}

TEST_CASE("schedule orders by start then id") {
  Catalog cat({prog("z", "c1", 500), prog("b", "c2", 100), prog("a", "c1", 500), prog("y", "c1", 100)});
  std::vector<std::string> ids{"z", "a", "b", "y"};
  auto s = schedule(cat, ids, TimeGrid());
  std::vector<std::string> order;
  for (const auto& p : s) order.push_back(cat.meta(p.program).program);
  CHECK(order == std::vector<std::string>{"b", "y", "a", "z"});
  std::vector<std::string> bad{"nope"};
  CHECK_THROWS_AS(schedule(cat, bad, TimeGrid()), DataError);
}
