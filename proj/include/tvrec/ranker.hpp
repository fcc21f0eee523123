#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tvrec/behavior.hpp"
#include "tvrec/datamodel.hpp"
#include "tvrec/preference.hpp"
#include "tvrec/textenc.hpp"

namespace tvrec {

/// Ranked items, best first. `item` is a position in the CandidateSet.
struct RankedEntry {
  std::uint32_t item = 0;
  double score = 0.0;

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};
using RankedList = std::vector<RankedEntry>;

/**
 * The new programs of the test window, indexed for inference.
 *
 * Candidates are kept in (start time, program id) order and every ranker
 * breaks score ties by that position, so "earlier start first, then id" is
 * simply "lower position first".
 */
class CandidateSet {
 public:
  CandidateSet() = default;
  /// `programs` must come from schedule(). Throws DataError if a program has
  /// no embedding.
  CandidateSet(std::vector<ScheduledProgram> programs, const ItemEmbeddings& embeddings, int slots);

  std::size_t size() const { return programs_.size(); }
  int slots() const { return slots_; }
  const ScheduledProgram& program(std::uint32_t i) const { return programs_[i]; }
  const Embedding& embedding(std::uint32_t i) const { return embeddings_[i]; }

 private:
  std::vector<ScheduledProgram> programs_;
  std::vector<Embedding> embeddings_;
  int slots_ = TimeGrid::kDefaultSlots;
};

/// Orders positions by score descending, ties by position ascending.
RankedList rank_by_score(std::span<const double> scores);

struct StageOneEntry {
  std::uint32_t item = 0;
  double score = 0.0;
  GroupKey key;
};

/// Behavior scores of every candidate, in behavior-ranking order.
std::vector<StageOneEntry> behavior_stage(const BehaviorMatrix& bm, const CandidateSet& candidates);

RankedList rank_behavior(const BehaviorMatrix& bm, const CandidateSet& candidates);

std::vector<double> preference_scores(const PreferenceModel& model, UserIdx user,
                                      const CandidateSet& candidates);
RankedList rank_preference(const PreferenceModel& model, UserIdx user,
                           const CandidateSet& candidates);

struct TwoStageStats {
  std::size_t scanned = 0;                  // stage-one entries consumed
  std::size_t preference_evaluations = 0;   // preference scores computed
};

/**
 * Second stage of two-stage ranking over a behavior-ordered list.
 *
 * Each maximal run of consecutive entries sharing a GroupKey collapses to
 * its member with the highest preference score (ties: earlier in the run).
 * Winners are emitted in run order until k items are out. Preference scores
 * are computed only for members of runs that get scanned.
 */
template <class PreferenceFn>
RankedList collapse_runs(std::span<const StageOneEntry> stage_one, PreferenceFn&& preference,
                         std::size_t k, TwoStageStats* stats = nullptr) {
  RankedList out;
  out.reserve(k);
  std::size_t i = 0;
  std::size_t evaluations = 0;
  while (i < stage_one.size() && out.size() < k) {
    std::size_t best = i;
    double best_pref = preference(stage_one[i].item);
    ++evaluations;
    std::size_t j = i + 1;
    for (; j < stage_one.size() && stage_one[j].key == stage_one[i].key; ++j) {
      const double p = preference(stage_one[j].item);
      ++evaluations;
      if (p > best_pref) {
        best_pref = p;
        best = j;
      }
    }
    out.push_back({stage_one[best].item, stage_one[best].score});
    i = j;
  }
  if (stats != nullptr) {
    stats->scanned = i;
    stats->preference_evaluations = evaluations;
  }
  return out;
}

RankedList two_stage(const BehaviorMatrix& bm, const PreferenceModel& model, UserIdx user,
                     const CandidateSet& candidates, std::size_t k,
                     TwoStageStats* stats = nullptr);

/// Reciprocal rank fusion: sum of 1 / (rank + eta) over both lists.
/// Both lists must rank the same items; throws InvariantError otherwise.
RankedList rrf(const RankedList& behavior, const RankedList& preference, double eta);

/// Weighted fusion: xi / (rank_b + eta) + (1 - xi) / (rank_p + eta).
RankedList rrf_weighted(const RankedList& behavior, const RankedList& preference, double eta,
                        double xi);

/// First k entries of rrf_weighted, computed by scoring only the heads of
/// both lists and widening until no item further down can reach the top k.
RankedList rrf_weighted_top(const RankedList& behavior, const RankedList& preference, double eta,
                            double xi, std::size_t k);

struct RrfCase {
  RankedList behavior;
  RankedList preference;
  std::vector<std::uint32_t> truth;  // sorted item positions
};

struct RrfChoice {
  double eta = 60.0;
  double xi = 0.5;
  double recall = 0.0;  // mean recall at the cutoff over the cases
};

/// Grid search for the (eta, xi) with the best mean recall@cutoff. Ties
/// keep the smallest eta, then the smallest xi. Throws on an empty case set.
RrfChoice tune_rrf(std::span<const RrfCase> cases, std::span<const double> eta_grid,
                   std::span<const double> xi_grid, std::size_t cutoff = 30);

std::vector<double> default_eta_grid();  // 1, 2, ..., 100
std::vector<double> default_xi_grid();   // 0, 0.1, ..., 1

/// Seeded sample of ceil(fraction * user_count) distinct users, sorted.
std::vector<UserIdx> sample_users(std::size_t user_count, double fraction, std::uint64_t seed);

enum class Method { behavior, preference, two_stage, rrf, rrf_weighted };

std::string_view to_string(Method method);
/// Accepts behavior, preference, two-stage, rrf, rrf-weighted.
Method parse_method(std::string_view name);

struct RecommendOptions {
  Method method = Method::two_stage;
  std::size_t k = 30;
  double eta = 60.0;
  double xi = 0.5;
};

/**
 * Per-user top-k inference over prebuilt, immutable models. Each call builds
 * the user's behavior matrix from the tensor; preference profiles and item
 * embeddings are looked up from the prebuilt index.
 */
class Recommender {
 public:
  Recommender(const InteractionTensor& tensor, const PreferenceModel& preferences,
              const CandidateSet& candidates);

  RankedList recommend(UserIdx user, const RecommendOptions& options,
                       TwoStageStats* stats = nullptr) const;

  const CandidateSet& candidates() const { return *candidates_; }

 private:
  const InteractionTensor* tensor_;
  const PreferenceModel* preferences_;
  const CandidateSet* candidates_;
};

}  // namespace tvrec
