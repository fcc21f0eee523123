#pragma once

#include <compare>
#include <cstdint>
#include <vector>

#include "tvrec/types.hpp"

namespace tvrec {

/// 1-based index of a weekly time slot.
class SlotIndex {
 public:
  constexpr SlotIndex() = default;
  constexpr explicit SlotIndex(int value) : value_(value) {}

  constexpr int value() const { return value_; }

  friend constexpr auto operator<=>(SlotIndex, SlotIndex) = default;

 private:
  int value_ = 1;
};

/**
 * The week (Monday 00:00 local time onwards) cut into `slots` equal slots.
 *
 * Slots are left-closed, right-open: slot i covers
 * [week_start + (i-1) * slot_length, week_start + i * slot_length).
 * Timestamps are UTC and are shifted by a fixed offset to local wall-clock
 * time before projection.
 */
class TimeGrid {
 public:
  static constexpr int kDefaultSlots = 672;

  explicit TimeGrid(int slots = kDefaultSlots, Duration utc_offset = 0);

  int slots() const { return slots_; }
  Duration slot_length() const { return slot_length_; }
  Duration utc_offset() const { return utc_offset_; }

  SlotIndex slot_of(Timestamp t) const;

  /// Slots touched by the closed span [s, e] in chronological order,
  /// wrapping from slot n back to slot 1 across the week boundary.
  /// Throws DataError when s > e or the span covers a week or more.
  std::vector<SlotIndex> slots_of_span(Timestamp s, Timestamp e) const;

  /// Number of slots in slots_of_span(s, e) without materializing it.
  int span_length(Timestamp s, Timestamp e) const;

  /// Slot reached by stepping `steps` slots forward from `first`, modulo n.
  SlotIndex advance(SlotIndex first, int steps) const {
    return SlotIndex((first.value() - 1 + steps) % slots_ + 1);
  }

  /// UTC timestamp of the local Monday 00:00 at or before t.
  Timestamp week_start(Timestamp t) const;

  /// Absolute slot counter since the reference Monday (may be negative).
  std::int64_t absolute_slot(Timestamp t) const;

 private:
  int slots_;
  Duration slot_length_;
  Duration utc_offset_;
};

}  // namespace tvrec
