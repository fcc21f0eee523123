#include "tvrec/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "tvrec/eval.hpp"

namespace tvrec {

CandidateSet::CandidateSet(std::vector<ScheduledProgram> programs, const ItemEmbeddings& embeddings,
                           int slots)
    : programs_(std::move(programs)), slots_(slots) {
  embeddings_.reserve(programs_.size());
  for (const auto& p : programs_) {
    if (p.program >= embeddings.size() || !embeddings[p.program]) {
      throw DataError("candidate program #" + std::to_string(p.program) + " has no embedding");
    }
    embeddings_.push_back(*embeddings[p.program]);
  }
}

namespace {

bool better(double sa, std::uint32_t ia, double sb, std::uint32_t ib) {
  return sa != sb ? sa > sb : ia < ib;
}

}  // namespace

RankedList rank_by_score(std::span<const double> scores) {
  // Zero scores dominate sparse rankings; they are already in tie order.
  RankedList positive, zero, negative;
  for (std::uint32_t i = 0; i < scores.size(); ++i) {
    const double s = scores[i];
    if (s > 0.0) {
      positive.push_back({i, s});
    } else if (s == 0.0) {
      zero.push_back({i, s});
    } else {
      negative.push_back({i, s});
    }
  }
  auto cmp = [](const RankedEntry& a, const RankedEntry& b) {
    return better(a.score, a.item, b.score, b.item);
  };
  std::sort(positive.begin(), positive.end(), cmp);
  std::sort(negative.begin(), negative.end(), cmp);
  positive.insert(positive.end(), zero.begin(), zero.end());
  positive.insert(positive.end(), negative.begin(), negative.end());
  return positive;
}

std::vector<StageOneEntry> behavior_stage(const BehaviorMatrix& bm, const CandidateSet& candidates) {
  std::vector<StageOneEntry> scored;
  std::vector<StageOneEntry> unscored;
  scored.reserve(256);
  unscored.reserve(candidates.size());
  for (std::uint32_t i = 0; i < candidates.size(); ++i) {
    const BehaviorScore s = behavior_score(bm, candidates.program(i), candidates.slots());
    if (s.score > 0.0) {
      scored.push_back({i, s.score, s.argmax});
    } else {
      unscored.push_back({i, s.score, s.argmax});
    }
  }
  std::sort(scored.begin(), scored.end(), [](const StageOneEntry& a, const StageOneEntry& b) {
    return better(a.score, a.item, b.score, b.item);
  });
  scored.insert(scored.end(), unscored.begin(), unscored.end());
  return scored;
}

RankedList rank_behavior(const BehaviorMatrix& bm, const CandidateSet& candidates) {
  auto stage = behavior_stage(bm, candidates);
  RankedList out;
  out.reserve(stage.size());
  for (const auto& e : stage) out.push_back({e.item, e.score});
  return out;
}

std::vector<double> preference_scores(const PreferenceModel& model, UserIdx user,
                                      const CandidateSet& candidates) {
  std::vector<double> scores(candidates.size());
  for (std::uint32_t i = 0; i < candidates.size(); ++i) {
    scores[i] = model.score(user, candidates.embedding(i), candidates.program(i).start_slot);
  }
  return scores;
}

RankedList rank_preference(const PreferenceModel& model, UserIdx user,
                           const CandidateSet& candidates) {
  return rank_by_score(preference_scores(model, user, candidates));
}

RankedList two_stage(const BehaviorMatrix& bm, const PreferenceModel& model, UserIdx user,
                     const CandidateSet& candidates, std::size_t k, TwoStageStats* stats) {
  if (k == 0) throw ConfigError("k must be at least 1");
  const auto stage = behavior_stage(bm, candidates);
  return collapse_runs(
      std::span<const StageOneEntry>(stage),
      [&](std::uint32_t item) {
        return model.score(user, candidates.embedding(item), candidates.program(item).start_slot);
      },
      k, stats);
}

namespace {

// rank_of[item] = 1-based position; throws unless both lists rank one item set.
struct RankTable {
  std::vector<std::uint32_t> behavior;
  std::vector<std::uint32_t> preference;
  std::size_t universe = 0;
};

RankTable rank_table(const RankedList& kb, const RankedList& kp) {
  if (kb.size() != kp.size()) throw InvariantError("fused rankings cover different item sets");
  std::uint32_t max_item = 0;
  for (const auto& e : kb) max_item = std::max(max_item, e.item);
  for (const auto& e : kp) max_item = std::max(max_item, e.item);
  RankTable t;
  t.universe = kb.empty() ? 0 : static_cast<std::size_t>(max_item) + 1;
  t.behavior.assign(t.universe, 0);
  t.preference.assign(t.universe, 0);
  for (std::size_t p = 0; p < kb.size(); ++p) {
    if (t.behavior[kb[p].item] != 0) throw InvariantError("duplicate item in behavior ranking");
    t.behavior[kb[p].item] = static_cast<std::uint32_t>(p + 1);
  }
  for (std::size_t p = 0; p < kp.size(); ++p) {
    if (t.preference[kp[p].item] != 0) throw InvariantError("duplicate item in preference ranking");
    if (t.behavior[kp[p].item] == 0) throw InvariantError("fused rankings cover different item sets");
    t.preference[kp[p].item] = static_cast<std::uint32_t>(p + 1);
  }
  return t;
}

void check_fusion_params(double eta, double xi) {
  if (!(eta >= 0.0)) throw ConfigError("eta must be non-negative");
  if (!(xi >= 0.0 && xi <= 1.0)) throw ConfigError("xi must lie in [0, 1]");
}

double fused(double wb, double wp, std::uint32_t rb, std::uint32_t rp, double eta) {
  return wb / (rb + eta) + wp / (rp + eta);
}

RankedList fuse(const RankedList& kb, const RankedList& kp, double eta, double wb, double wp) {
  const RankTable t = rank_table(kb, kp);
  RankedList out;
  out.reserve(kb.size());
  for (const auto& e : kb) {
    out.push_back({e.item, fused(wb, wp, t.behavior[e.item], t.preference[e.item], eta)});
  }
  std::sort(out.begin(), out.end(), [](const RankedEntry& a, const RankedEntry& b) {
    return better(a.score, a.item, b.score, b.item);
  });
  return out;
}

}  // namespace

RankedList rrf(const RankedList& behavior, const RankedList& preference, double eta) {
  check_fusion_params(eta, 0.5);
  return fuse(behavior, preference, eta, 1.0, 1.0);
}

RankedList rrf_weighted(const RankedList& behavior, const RankedList& preference, double eta,
                        double xi) {
  check_fusion_params(eta, xi);
  return fuse(behavior, preference, eta, xi, 1.0 - xi);
}

RankedList rrf_weighted_top(const RankedList& behavior, const RankedList& preference, double eta,
                            double xi, std::size_t k) {
  check_fusion_params(eta, xi);
  const RankTable t = rank_table(behavior, preference);
  const std::size_t n = behavior.size();
  k = std::min(k, n);
  if (k == 0) return {};
  const double wb = xi;
  const double wp = 1.0 - xi;
  auto cmp = [](const RankedEntry& a, const RankedEntry& b) {
    return better(a.score, a.item, b.score, b.item);
  };

  std::vector<char> seen(t.universe, 0);
  RankedList pool;
  std::size_t head = std::max<std::size_t>(k, 16);
  std::size_t taken = 0;
  for (;;) {
    head = std::min(head, n);
    for (; taken < head; ++taken) {
      for (const RankedEntry* e : {&behavior[taken], &preference[taken]}) {
        if (seen[e->item]) continue;
        seen[e->item] = 1;
        pool.push_back({e->item, fused(wb, wp, t.behavior[e->item], t.preference[e->item], eta)});
      }
    }
    std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k), pool.end(), cmp);
    if (head == n) break;
    // Anything outside both heads has both ranks > head.
    const double bound = 1.0 / (static_cast<double>(head) + 1.0 + eta);
    if (pool[k - 1].score > bound * (1.0 + 1e-12)) break;
    head *= 2;
  }
  pool.resize(k);
  return pool;
}

RrfChoice tune_rrf(std::span<const RrfCase> cases, std::span<const double> eta_grid,
                   std::span<const double> xi_grid, std::size_t cutoff) {
  if (cases.empty()) throw ConfigError("tuning needs a non-empty development set");
  if (eta_grid.empty() || xi_grid.empty()) throw ConfigError("tuning grid is empty");
  RrfChoice best;
  bool have = false;
  std::vector<std::uint32_t> items;
  for (double eta : eta_grid) {
    for (double xi : xi_grid) {
      double sum = 0.0;
      std::size_t counted = 0;
      for (const auto& c : cases) {
        if (c.truth.empty()) continue;
        const auto top = rrf_weighted_top(c.behavior, c.preference, eta, xi, cutoff);
        items.clear();
        for (const auto& e : top) items.push_back(e.item);
        sum += recall_at<std::uint32_t>(items, c.truth, cutoff);
        ++counted;
      }
      if (counted == 0) throw ConfigError("development set has no users with ground truth");
      const double recall = sum / static_cast<double>(counted);
      if (!have || recall > best.recall) {
        best = {eta, xi, recall};
        have = true;
      }
    }
  }
  return best;
}

std::vector<double> default_eta_grid() {
  std::vector<double> g;
  for (int e = 1; e <= 100; ++e) g.push_back(e);
  return g;
}

std::vector<double> default_xi_grid() {
  std::vector<double> g;
  for (int x = 0; x <= 10; ++x) g.push_back(x / 10.0);
  return g;
}

std::vector<UserIdx> sample_users(std::size_t user_count, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("sample fraction must be in (0, 1]");
  std::vector<UserIdx> all(user_count);
  std::iota(all.begin(), all.end(), 0);
  std::mt19937_64 rng(seed);
  // Fisher-Yates with an explicit bound; std::shuffle's draws are unspecified.
  for (std::size_t i = all.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(all[i - 1], all[j]);
  }
  const auto take = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(user_count)));
  all.resize(std::min(take, all.size()));
  std::sort(all.begin(), all.end());
  return all;
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::behavior: return "behavior";
    case Method::preference: return "preference";
    case Method::two_stage: return "two-stage";
    case Method::rrf: return "rrf";
    case Method::rrf_weighted: return "rrf-weighted";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::behavior, Method::preference, Method::two_stage, Method::rrf,
                   Method::rrf_weighted}) {
    if (name == to_string(m)) return m;
  }
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

Recommender::Recommender(const InteractionTensor& tensor, const PreferenceModel& preferences,
                         const CandidateSet& candidates)
    : tensor_(&tensor), preferences_(&preferences), candidates_(&candidates) {
  if (preferences.user_count() != tensor.user_count()) {
    throw InvariantError("preference model and tensor disagree on the user set");
  }
}

RankedList Recommender::recommend(UserIdx user, const RecommendOptions& options,
                                  TwoStageStats* stats) const {
  if (options.k == 0) throw ConfigError("k must be at least 1");
  auto truncate = [&](RankedList list) {
    if (list.size() > options.k) list.resize(options.k);
    return list;
  };
  switch (options.method) {
    case Method::behavior:
      return truncate(rank_behavior(behavior_matrix(*tensor_, user), *candidates_));
    case Method::preference:
      return truncate(rank_preference(*preferences_, user, *candidates_));
    case Method::two_stage:
      return two_stage(behavior_matrix(*tensor_, user), *preferences_, user, *candidates_,
                       options.k, stats);
    case Method::rrf:
    case Method::rrf_weighted: {
      const auto kb = rank_behavior(behavior_matrix(*tensor_, user), *candidates_);
      const auto kp = rank_preference(*preferences_, user, *candidates_);
      return truncate(options.method == Method::rrf
                          ? rrf(kb, kp, options.eta)
                          : rrf_weighted(kb, kp, options.eta, options.xi));
    }
  }
  throw InvariantError("unhandled method");
}

}  // namespace tvrec
