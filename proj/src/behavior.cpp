#include "tvrec/behavior.hpp"

#include <algorithm>

namespace tvrec {

BehaviorMatrix::BehaviorMatrix(std::vector<Entry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return a.slot != b.slot ? a.slot < b.slot : a.channel < b.channel;
  });
}

double BehaviorMatrix::at(SlotIndex slot, ChannelIdx channel) const {
  const auto s = static_cast<std::uint16_t>(slot.value());
  auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{s, channel},
                             [](const Entry& e, const std::pair<std::uint16_t, ChannelIdx>& k) {
                               return e.slot != k.first ? e.slot < k.first : e.channel < k.second;
                             });
  if (it != entries_.end() && it->slot == s && it->channel == channel) return it->probability;
  return 0.0;
}

double BehaviorMatrix::max() const {
  double best = 0.0;
  for (const auto& e : entries_) best = std::max(best, e.probability);
  return best;
}

BehaviorMatrix behavior_matrix(const InteractionTensor& tensor, UserIdx user) {
  auto row = tensor.cells(user);
  std::vector<BehaviorMatrix::Entry> entries;
  std::uint64_t total = 0;
  // Row is sorted by (slot, channel, item): equal cells are adjacent.
  for (const auto& c : row) {
    total += c.count;
    if (!entries.empty() && entries.back().slot == c.slot && entries.back().channel == c.channel) {
      entries.back().probability += c.count;
    } else {
      entries.push_back({c.slot, c.channel, static_cast<double>(c.count)});
    }
  }
  if (total == 0) {
    throw DataError("user " + tensor.user_name(user) + " has no training interactions");
  }
  const double denom = static_cast<double>(total);
  for (auto& e : entries) e.probability /= denom;
  return BehaviorMatrix(std::move(entries));
}

BehaviorScore behavior_score(const BehaviorMatrix& bm, SlotIndex first_slot, int span_length,
                             ChannelIdx channel, int slots) {
  BehaviorScore best{0.0, {first_slot, channel}};
  if (bm.entries().empty()) return best;
  for (int j = 0; j < span_length; ++j) {
    const SlotIndex slot((first_slot.value() - 1 + j) % slots + 1);
    const double p = bm.at(slot, channel);
    if (p > best.score) best = {p, {slot, channel}};
  }
  return best;
}

BehaviorScore behavior_score(const BehaviorMatrix& bm, const Catalog& catalog, ProgramIdx program,
                             const TimeGrid& grid) {
  const auto& m = catalog.meta(program);
  return behavior_score(bm, grid.slot_of(m.start), grid.span_length(m.start, m.end),
                        catalog.channel_of(program), grid.slots());
}

}  // namespace tvrec
