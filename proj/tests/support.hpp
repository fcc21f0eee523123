// Random toy instances and brute-force reference implementations shared by
// the unit tests and the acceptance runner. The references deliberately
// avoid the library's own slot arithmetic and sparse code paths.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tvrec/behavior.hpp"
#include "tvrec/datamodel.hpp"
#include "tvrec/preference.hpp"
#include "tvrec/ranker.hpp"
#include "tvrec/timegrid.hpp"

namespace tvrec::test {

// Monday 1970-01-05 00:00 UTC.
inline constexpr Timestamp kMonday = 345600;
// Monday 2020-05-11 00:00 UTC.
inline constexpr Timestamp kMay11 = 1589155200;

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Slot of t by direct calendar arithmetic.
inline int ref_slot(Timestamp t, int n, Duration offset) {
  const std::int64_t len = kSecondsPerWeek / n;
  std::int64_t s = (t + offset - kMonday) % kSecondsPerWeek;
  if (s < 0) s += kSecondsPerWeek;
  return static_cast<int>(s / len) + 1;
}

// Slots touched by [s, e], found by walking slot boundaries.
inline std::vector<int> ref_span(Timestamp s, Timestamp e, int n, Duration offset) {
  const std::int64_t len = kSecondsPerWeek / n;
  std::vector<int> out;
  Timestamp t = s;
  while (t <= e) {
    out.push_back(ref_slot(t, n, offset));
    std::int64_t local = t + offset - kMonday;
    std::int64_t next = (local >= 0 ? local / len + 1 : -((-local - 1) / len)) * len;
    t = next - offset + kMonday;
  }
  return out;
}

using Dense = std::vector<std::vector<double>>;  // [slot][channel], slot 1-based

// Behavior matrix by summing every cell of a dense count array.
inline Dense ref_behavior(const InteractionTensor& tensor, UserIdx u, int n, std::size_t channels) {
  std::vector<std::vector<std::uint64_t>> counts(n + 1, std::vector<std::uint64_t>(channels, 0));
  for (const auto& c : tensor.cells(u)) counts[c.slot][c.channel] += c.count;
  std::uint64_t total = 0;
  for (int w = 1; w <= n; ++w)
    for (std::size_t c = 0; c < channels; ++c) total += counts[w][c];
  Dense b(n + 1, std::vector<double>(channels, 0.0));
  for (int w = 1; w <= n; ++w)
    for (std::size_t c = 0; c < channels; ++c)
      b[w][c] = static_cast<double>(counts[w][c]) / static_cast<double>(total);
  return b;
}

struct RefScore {
  double score;
  int slot;
  ChannelIdx channel;
};

// MAX of the element-wise product of the user matrix and the program's
// indicator matrix; IdxMax ties go to the earliest slot of the span.
inline RefScore ref_behavior_score(const Dense& b, const std::vector<int>& span, ChannelIdx channel,
                                   std::size_t channels) {
  const int n = static_cast<int>(b.size()) - 1;
  Dense item(n + 1, std::vector<double>(channels, 0.0));
  for (int w : span) item[w][channel] = 1.0;
  double best = 0.0;
  for (int w = 1; w <= n; ++w)
    for (std::size_t c = 0; c < channels; ++c) best = std::max(best, b[w][c] * item[w][c]);
  RefScore out{best, span.front(), channel};
  for (int w : span) {
    if (b[w][channel] * item[w][channel] == best) {
      out.slot = w;
      break;
    }
  }
  if (best == 0.0) out.slot = span.front();
  return out;
}

inline std::vector<double> to_dense(const Embedding& e, std::size_t dim) {
  std::vector<double> v(dim, 0.0);
  for (std::size_t j = 0; j < e.nonzeros(); ++j) v[e.indices()[j]] = e.values()[j];
  return v;
}

inline double dense_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

// Mean of the embeddings of the distinct items matching `keep`.
template <class Keep>
std::vector<double> ref_profile(const InteractionTensor& tensor, UserIdx u, const ItemEmbeddings& emb,
                                std::size_t dim, Keep keep) {
  std::set<ProgramIdx> items;
  for (const auto& c : tensor.cells(u))
    if (keep(c)) items.insert(c.item);
  std::vector<double> v(dim, 0.0);
  if (items.empty()) return v;
  for (auto i : items) {
    auto d = to_dense(*emb[i], dim);
    for (std::size_t j = 0; j < dim; ++j) v[j] += d[j];
  }
  for (auto& x : v) x /= static_cast<double>(items.size());
  return v;
}

struct Toy {
  int slots = 12;
  Duration offset = 0;
  std::size_t channels = 1;
  std::size_t dim = 6;
  std::vector<ProgramMeta> metas;
  std::vector<std::string> candidate_ids;
  Catalog catalog;
  InteractionTensor tensor;
  ItemEmbeddings embeddings;
};

// Random instance: up to 50 candidates on up to 8 channels over a week of
// up to 12 slots, with frequent ties in starts, scores and embeddings.
inline Toy random_toy(std::mt19937_64& rng, int max_slots = 12, std::size_t max_channels = 8,
                      int max_candidates = 50, std::size_t users = 1) {
  static const int kDivisors[] = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 14, 15, 16, 18, 20, 21, 24};
  Toy t;
  std::vector<int> options;
  for (int d : kDivisors)
    if (d <= max_slots && d >= 2) options.push_back(d);
  t.slots = options[uniform_int(rng, 0, static_cast<int>(options.size()) - 1)];
  t.offset = uniform_int(rng, 0, 3) == 0 ? uniform_int(rng, -43200, 43200) : 0;
  t.channels = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<int>(max_channels)));
  const Duration len = kSecondsPerWeek / t.slots;
  const Timestamp week0 = kMay11 - t.offset;  // local Monday 00:00

  // Channel names interned in order c0, c1, ...
  for (std::size_t c = 0; c < t.channels; ++c) {
    t.metas.push_back({"h-seed-" + std::to_string(c), "c" + std::to_string(c), week0 - 3 * kSecondsPerWeek,
                       week0 - 3 * kSecondsPerWeek + 600, ""});
  }
  const int history = uniform_int(rng, 1, 20);
  for (int h = 0; h < history; ++h) {
    const auto c = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(t.channels) - 1));
    const Timestamp s = week0 - kSecondsPerWeek + uniform_int(rng, 0, kSecondsPerWeek - 4000);
    t.metas.push_back({"h" + std::to_string(h), "c" + std::to_string(c), s, s + 1800, ""});
  }
  const int candidates = uniform_int(rng, 1, max_candidates);
  std::vector<int> names(candidates);
  std::iota(names.begin(), names.end(), 0);
  std::shuffle(names.begin(), names.end(), rng);
  std::vector<Timestamp> starts;
  for (int i = 0; i < candidates; ++i) {
    const auto c = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(t.channels) - 1));
    Timestamp s;
    if (!starts.empty() && uniform_int(rng, 0, 3) == 0) {
      s = starts[uniform_int(rng, 0, static_cast<int>(starts.size()) - 1)];
    } else {
      const int slot = uniform_int(rng, 0, t.slots - 1);
      s = week0 + slot * len + (uniform_int(rng, 0, 2) == 0 ? 0 : uniform_int(rng, 0, static_cast<int>(len) - 1));
    }
    starts.push_back(s);
    Duration d = uniform_int(rng, 0, 2) == 0 ? len * uniform_int(rng, 1, 3) : uniform_int(rng, 1, static_cast<int>(3 * len));
    d = std::min<Duration>(d, kSecondsPerWeek - 1);
    char id[16];
    std::snprintf(id, sizeof id, "p%02d", names[i]);
    t.metas.push_back({id, "c" + std::to_string(c), s, s + d, ""});
    t.candidate_ids.push_back(id);
  }
  t.catalog = Catalog(t.metas);

  // Embeddings: small integers so ties are common; some programs share one.
  t.embeddings.assign(t.metas.size(), std::nullopt);
  std::vector<Embedding> pool;
  for (std::size_t i = 0; i < t.metas.size(); ++i) {
    if (!pool.empty() && uniform_int(rng, 0, 4) == 0) {
      t.embeddings[i] = pool[uniform_int(rng, 0, static_cast<int>(pool.size()) - 1)];
      continue;
    }
    std::vector<std::uint32_t> idx;
    std::vector<double> val;
    for (std::size_t j = 0; j < t.dim; ++j) {
      const int v = uniform_int(rng, -1, 3);
      if (v > 0) {
        idx.push_back(static_cast<std::uint32_t>(j));
        val.push_back(v * 0.25);
      }
    }
    pool.emplace_back(idx, val);
    t.embeddings[i] = pool.back();
  }

  // History counts: item channel is the program's channel, slot anywhere.
  std::vector<std::string> user_names;
  std::vector<std::size_t> offsets{0};
  std::vector<TensorCell> cells;
  for (std::size_t u = 0; u < users; ++u) {
    user_names.push_back("u" + std::to_string(u));
    std::map<std::tuple<int, ChannelIdx, ProgramIdx>, std::uint32_t> acc;
    const int events = uniform_int(rng, 1, 12);
    for (int e = 0; e < events; ++e) {
      const auto item = static_cast<ProgramIdx>(uniform_int(rng, 0, static_cast<int>(t.channels) + history - 1));
      const int slot = uniform_int(rng, 1, t.slots);
      acc[{slot, t.catalog.channel_of(item), item}] += static_cast<std::uint32_t>(uniform_int(rng, 1, 3));
    }
    for (const auto& [key, count] : acc) {
      cells.push_back({std::get<2>(key), std::get<1>(key), static_cast<std::uint16_t>(std::get<0>(key)), count});
    }
    offsets.push_back(cells.size());
  }
  t.tensor = InteractionTensor(t.slots, user_names, offsets, cells);
  return t;
}

struct RefEntry {
  std::string id;
  double score;
};

// Stage one by brute force: candidates in (start, id) order, dense behavior
// scores, stable sort by score.
struct RefStageOne {
  std::string id;
  std::uint32_t position;  // in (start, id) order
  double score;
  int slot;
  ChannelIdx channel;
  double preference;
};

inline std::vector<RefStageOne> ref_stage_one(const Toy& t, UserIdx u, PreferenceMode mode) {
  std::vector<const ProgramMeta*> order;
  for (const auto& id : t.candidate_ids) order.push_back(&t.catalog.meta(*t.catalog.find(id)));
  std::sort(order.begin(), order.end(), [](const ProgramMeta* a, const ProgramMeta* b) {
    return a->start != b->start ? a->start < b->start : a->program < b->program;
  });
  const Dense b = ref_behavior(t.tensor, u, t.slots, t.channels);
  const auto global = ref_profile(t.tensor, u, t.embeddings, t.dim, [](const TensorCell&) { return true; });
  std::vector<RefStageOne> out;
  for (std::uint32_t p = 0; p < order.size(); ++p) {
    const auto* m = order[p];
    const auto ch = *t.catalog.find_channel(m->channel);
    const auto s = ref_behavior_score(b, ref_span(m->start, m->end, t.slots, t.offset), ch, t.channels);
    std::vector<double> profile = global;
    if (mode == PreferenceMode::time_aware) {
      const int w = ref_slot(m->start, t.slots, t.offset);
      bool any = false;
      for (const auto& c : t.tensor.cells(u)) any |= c.slot == w;
      if (any) profile = ref_profile(t.tensor, u, t.embeddings, t.dim, [w](const TensorCell& c) { return c.slot == w; });
    }
    const double pref = dense_dot(profile, to_dense(*t.embeddings[*t.catalog.find(m->program)], t.dim));
    out.push_back({m->program, p, s.score, s.slot, s.channel, pref});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RefStageOne& a, const RefStageOne& b) { return a.score > b.score; });
  return out;
}

// Groups consecutive entries with equal (slot, channel), keeps the first
// entry with the run's largest preference, stops after k winners.
template <class Entry, class Key, class Pref>
std::vector<std::size_t> ref_collapse(const std::vector<Entry>& stage, Key key, Pref pref, std::size_t k) {
  std::vector<std::vector<std::size_t>> runs;
  for (std::size_t i = 0; i < stage.size(); ++i) {
    if (runs.empty() || key(stage[runs.back().front()]) != key(stage[i])) runs.push_back({});
    runs.back().push_back(i);
  }
  std::vector<std::size_t> out;
  for (const auto& run : runs) {
    if (out.size() == k) break;
    std::size_t best = run.front();
    for (auto i : run)
      if (pref(stage[i]) > pref(stage[best])) best = i;
    out.push_back(best);
  }
  return out;
}

inline CandidateSet toy_candidates(const Toy& t) {
  const TimeGrid grid(t.slots, t.offset);
  return CandidateSet(schedule(t.catalog, t.candidate_ids, grid), t.embeddings, t.slots);
}

}  // namespace tvrec::test
