#include "tvrec/timegrid.hpp"

#include <string>

namespace tvrec {

namespace {

// 1970-01-05 00:00, the first Monday after the Unix epoch.
constexpr Timestamp kReferenceMonday = 4 * kSecondsPerDay;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

TimeGrid::TimeGrid(int slots, Duration utc_offset)
    : slots_(slots), slot_length_(0), utc_offset_(utc_offset) {
  if (slots <= 0 || kSecondsPerWeek % slots != 0) {
    throw ConfigError("slot count must divide 604800 exactly, got " +
                      std::to_string(slots));
  }
  if (utc_offset <= -kSecondsPerDay || utc_offset >= kSecondsPerDay) {
    throw ConfigError("utc offset must be within one day");
  }
  slot_length_ = kSecondsPerWeek / slots;
}

std::int64_t TimeGrid::absolute_slot(Timestamp t) const {
  return floor_div(t + utc_offset_ - kReferenceMonday, slot_length_);
}

SlotIndex TimeGrid::slot_of(Timestamp t) const {
  std::int64_t within = absolute_slot(t) % slots_;
  if (within < 0) within += slots_;
  return SlotIndex(static_cast<int>(within) + 1);
}

int TimeGrid::span_length(Timestamp s, Timestamp e) const {
  if (s > e) throw DataError("span start after end");
  if (e - s >= kSecondsPerWeek) throw DataError("span covers a full week or more");
  return static_cast<int>(absolute_slot(e) - absolute_slot(s)) + 1;
}

std::vector<SlotIndex> TimeGrid::slots_of_span(Timestamp s, Timestamp e) const {
  const int count = span_length(s, e);
  const SlotIndex first = slot_of(s);
  std::vector<SlotIndex> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) out.push_back(advance(first, j));
  return out;
}

Timestamp TimeGrid::week_start(Timestamp t) const {
  const std::int64_t week = floor_div(t + utc_offset_ - kReferenceMonday, kSecondsPerWeek);
  return kReferenceMonday + week * kSecondsPerWeek - utc_offset_;
}

}  // namespace tvrec
