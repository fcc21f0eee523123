#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tvrec/datamodel.hpp"
#include "tvrec/timegrid.hpp"

namespace tvrec {

/// A (weekly slot, channel) cell; the grouping key of two-stage ranking.
struct GroupKey {
  SlotIndex slot;
  ChannelIdx channel = 0;

  friend bool operator==(const GroupKey&, const GroupKey&) = default;
};

/**
 * A user's viewing distribution over (slot, channel): the share of the user's
 * training counts that fall in each cell. Only positive cells are stored,
 * sorted by (slot, channel).
 */
class BehaviorMatrix {
 public:
  struct Entry {
    std::uint16_t slot;
    ChannelIdx channel;
    double probability;
  };

  BehaviorMatrix() = default;
  explicit BehaviorMatrix(std::vector<Entry> entries);

  std::span<const Entry> entries() const { return entries_; }
  double at(SlotIndex slot, ChannelIdx channel) const;
  double max() const;

 private:
  std::vector<Entry> entries_;
};

/// Marginalizes the user's tensor row over items and normalizes it.
/// Throws DataError if the user has no interactions.
BehaviorMatrix behavior_matrix(const InteractionTensor& tensor, UserIdx user);

struct BehaviorScore {
  double score = 0.0;
  GroupKey argmax;
};

/**
 * Best cell of the user's distribution among the program's slot span on the
 * program's channel. Ties go to the chronologically earliest slot; a program
 * with no support scores 0 and keys on its first slot.
 */
BehaviorScore behavior_score(const BehaviorMatrix& bm, SlotIndex first_slot, int span_length,
                             ChannelIdx channel, int slots);

inline BehaviorScore behavior_score(const BehaviorMatrix& bm, const ScheduledProgram& p,
                                    int slots) {
  return behavior_score(bm, p.start_slot, p.span_length, p.channel, slots);
}

BehaviorScore behavior_score(const BehaviorMatrix& bm, const Catalog& catalog, ProgramIdx program,
                             const TimeGrid& grid);

}  // namespace tvrec
