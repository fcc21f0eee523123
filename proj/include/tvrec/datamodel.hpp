#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tvrec/timegrid.hpp"
#include "tvrec/types.hpp"

namespace tvrec {

using ProgramIdx = std::uint32_t;  // position in a Catalog
using ChannelIdx = std::uint32_t;  // channel interned by a Catalog
using UserIdx = std::uint32_t;     // position in an InteractionTensor

/// One channel-switch event.
struct ViewingLog {
  std::string user;
  std::string program;
  std::string channel;
  Timestamp t = 0;
  Duration dt = 0;

  friend bool operator==(const ViewingLog&, const ViewingLog&) = default;
};

/// Broadcast metadata of one program; `text` is title, artists and abstract.
struct ProgramMeta {
  std::string program;
  std::string channel;
  Timestamp start = 0;
  Timestamp end = 0;
  std::string text;

  friend bool operator==(const ProgramMeta&, const ProgramMeta&) = default;
};

template <class Record>
struct ParseResult {
  std::vector<Record> records;
  std::size_t lines = 0;    // non-blank, non-provenance lines seen
  std::size_t skipped = 0;  // malformed lines dropped
};

// JSONL readers. Blank lines and `{"_meta": ...}` provenance lines are
// ignored. Malformed lines are skipped and counted; DataError is thrown when
// more than half of the lines are malformed or the stream fails.
ParseResult<ViewingLog> parse_logs(std::istream& in);
ParseResult<ProgramMeta> parse_programs(std::istream& in);

/// Keeps logs with dt >= min_duration, preserving order.
std::vector<ViewingLog> filter_flips(std::span<const ViewingLog> logs, Duration min_duration);

struct SplitSpec {
  Timestamp t_split = 0;
  Duration train = 90 * kSecondsPerDay;
  Duration test = 7 * kSecondsPerDay;

  void validate() const;
};

/// Train/test partition by time. Item lists are sorted by program id.
struct Split {
  std::vector<ViewingLog> train;
  std::vector<ViewingLog> test;
  std::vector<std::string> train_items;
  std::vector<std::string> test_items;
};

/// D_train = logs in [t_split - train, t_split), D_test = logs in
/// [t_split, t_split + test); item sets by broadcast start in the same
/// windows. Throws DataError if either log set is empty.
Split split(std::span<const ViewingLog> logs, std::span<const ProgramMeta> metas,
            const SplitSpec& spec);

/// Program metadata indexed by dense ids, with channels interned.
class Catalog {
 public:
  Catalog() = default;
  /// Throws DataError on duplicate program ids or invalid broadcast spans.
  explicit Catalog(std::vector<ProgramMeta> metas);

  std::size_t size() const { return metas_.size(); }
  std::size_t channel_count() const { return channel_names_.size(); }

  const ProgramMeta& meta(ProgramIdx i) const { return metas_[i]; }
  ChannelIdx channel_of(ProgramIdx i) const { return channel_of_[i]; }
  const std::string& channel_name(ChannelIdx c) const { return channel_names_[c]; }

  std::optional<ProgramIdx> find(std::string_view program) const;
  std::optional<ChannelIdx> find_channel(std::string_view channel) const;

 private:
  std::vector<ProgramMeta> metas_;
  std::vector<ChannelIdx> channel_of_;
  std::vector<std::string> channel_names_;
  std::unordered_map<std::string, ProgramIdx> program_index_;
  std::unordered_map<std::string, ChannelIdx> channel_index_;
};

struct TensorCell {
  ProgramIdx item = 0;
  ChannelIdx channel = 0;
  std::uint16_t slot = 1;
  std::uint32_t count = 0;
};

/**
 * Sparse user x item x slot x channel counts, stored row-compressed by user.
 *
 * Users are sorted by id. Within a user, cells are sorted by
 * (slot, channel, item) so that marginalizing over items is a linear scan.
 * Every stored count is positive.
 */
class InteractionTensor {
 public:
  InteractionTensor() = default;
  InteractionTensor(int slots, std::vector<std::string> users, std::vector<std::size_t> offsets,
                    std::vector<TensorCell> cells);

  int slots() const { return slots_; }
  std::size_t user_count() const { return users_.size(); }
  const std::string& user_name(UserIdx u) const { return users_[u]; }
  const std::vector<std::string>& users() const { return users_; }
  std::optional<UserIdx> find_user(std::string_view user) const;

  std::span<const TensorCell> cells(UserIdx u) const {
    return {cells_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }
  std::uint64_t user_total(UserIdx u) const;
  std::uint64_t total() const;
  std::size_t nonzeros() const { return cells_.size(); }

  std::uint32_t count(UserIdx u, ProgramIdx item, SlotIndex slot, ChannelIdx channel) const;

  /// Copy with every positive count replaced by 1.
  InteractionTensor binarized() const;

 private:
  int slots_ = TimeGrid::kDefaultSlots;
  std::vector<std::string> users_;
  std::vector<std::size_t> offsets_{0};
  std::vector<TensorCell> cells_;
  std::unordered_map<std::string, UserIdx> user_index_;
};

/**
 * Counts D_train logs into the tensor, one increment at
 * (user, program, slot_of(t), channel) per log.
 *
 * Only programs in I_train contribute. The user set is restricted to users
 * with at least one such training count and at least one D_test log on an
 * I_test program. Throws DataError listing program ids of D_train logs that
 * are missing from the catalog.
 */
InteractionTensor build_tensor(const Split& split, const Catalog& catalog, const TimeGrid& grid);

/// Distinct I_test programs the user watched in D_test, sorted by id.
std::vector<std::string> ground_truth(const Split& split, std::string_view user);

/// Ground truth for every tensor user at once, indexed by UserIdx.
std::vector<std::vector<std::string>> ground_truth_all(const Split& split,
                                                       const InteractionTensor& tensor);

/// A program as the rankers see it: dense ids and its slot span.
struct ScheduledProgram {
  ProgramIdx program = 0;
  ChannelIdx channel = 0;
  Timestamp start = 0;
  Timestamp end = 0;
  SlotIndex start_slot;
  int span_length = 1;  // slots_of_span(start, end).size()
};

/// Index `ids` against the catalog, sorted by (start, program id). That order
/// is the global tie-break for every ranker. Throws DataError on unknown ids.
std::vector<ScheduledProgram> schedule(const Catalog& catalog, std::span<const std::string> ids,
                                       const TimeGrid& grid);

}  // namespace tvrec
