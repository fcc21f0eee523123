#include "tvrec/datamodel.hpp"

#include <algorithm>
#include <istream>
#include <set>
#include <unordered_set>
#include <string>
#include <tuple>

#include "json.hpp"

namespace tvrec {

namespace {

using nlohmann::json;

bool is_ignorable(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

bool is_provenance(const json& j) { return j.is_object() && j.contains("_meta"); }

template <class Record, class Decode>
ParseResult<Record> parse_jsonl(std::istream& in, const char* what, Decode decode) {
  if (!in) throw DataError(std::string("cannot read ") + what);
  ParseResult<Record> result;
  std::string line;
  while (std::getline(in, line)) {
    if (is_ignorable(line)) continue;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (is_provenance(j)) continue;
    ++result.lines;
    std::optional<Record> rec;
    if (j.is_object()) rec = decode(j);
    if (rec) {
      result.records.push_back(std::move(*rec));
    } else {
      ++result.skipped;
    }
  }
  if (in.bad()) throw DataError(std::string("I/O error while reading ") + what);
  if (result.lines > 0 && result.skipped * 2 > result.lines) {
    throw DataError(std::string(what) + ": " + std::to_string(result.skipped) + " of " +
                    std::to_string(result.lines) + " lines malformed");
  }
  return result;
}

const json* field(const json& j, const char* name) {
  auto it = j.find(name);
  return it == j.end() ? nullptr : &*it;
}

std::optional<std::string> string_field(const json& j, const char* name) {
  const json* f = field(j, name);
  if (f == nullptr || !f->is_string()) return std::nullopt;
  return f->get<std::string>();
}

std::optional<std::int64_t> int_field(const json& j, const char* name) {
  const json* f = field(j, name);
  if (f == nullptr || !f->is_number_integer()) return std::nullopt;
  return f->get<std::int64_t>();
}

}  // namespace

ParseResult<ViewingLog> parse_logs(std::istream& in) {
  return parse_jsonl<ViewingLog>(in, "logs", [](const json& j) -> std::optional<ViewingLog> {
    auto user = string_field(j, "user");
    auto program = string_field(j, "program");
    auto channel = string_field(j, "channel");
    auto t = int_field(j, "t");
    auto dt = int_field(j, "dt");
    if (!user || !program || !channel || !t || !dt || *dt < 0) return std::nullopt;
    return ViewingLog{std::move(*user), std::move(*program), std::move(*channel), *t, *dt};
  });
}

ParseResult<ProgramMeta> parse_programs(std::istream& in) {
  return parse_jsonl<ProgramMeta>(in, "programs", [](const json& j) -> std::optional<ProgramMeta> {
    auto program = string_field(j, "program");
    auto channel = string_field(j, "channel");
    auto start = int_field(j, "start");
    auto end = int_field(j, "end");
    auto text = string_field(j, "text");
    if (!program || !channel || !start || !end || !text) return std::nullopt;
    if (*start >= *end || *end - *start >= kSecondsPerWeek) return std::nullopt;
    return ProgramMeta{std::move(*program), std::move(*channel), *start, *end, std::move(*text)};
  });
}

std::vector<ViewingLog> filter_flips(std::span<const ViewingLog> logs, Duration min_duration) {
  std::vector<ViewingLog> kept;
  kept.reserve(logs.size());
  std::copy_if(logs.begin(), logs.end(), std::back_inserter(kept),
               [min_duration](const ViewingLog& d) { return d.dt >= min_duration; });
  return kept;
}

void SplitSpec::validate() const {
  if (train <= 0) throw ConfigError("training window must be positive");
  if (test <= 0) throw ConfigError("test window must be positive");
}

Split split(std::span<const ViewingLog> logs, std::span<const ProgramMeta> metas,
            const SplitSpec& spec) {
  spec.validate();
  const Timestamp train_begin = spec.t_split - spec.train;
  const Timestamp test_end = spec.t_split + spec.test;

  Split out;
  for (const auto& d : logs) {
    if (d.t >= train_begin && d.t < spec.t_split) {
      out.train.push_back(d);
    } else if (d.t >= spec.t_split && d.t < test_end) {
      out.test.push_back(d);
    }
  }
  for (const auto& m : metas) {
    if (m.start >= train_begin && m.start < spec.t_split) {
      out.train_items.push_back(m.program);
    } else if (m.start >= spec.t_split && m.start < test_end) {
      out.test_items.push_back(m.program);
    }
  }
  std::sort(out.train_items.begin(), out.train_items.end());
  out.train_items.erase(std::unique(out.train_items.begin(), out.train_items.end()),
                        out.train_items.end());
  std::sort(out.test_items.begin(), out.test_items.end());
  out.test_items.erase(std::unique(out.test_items.begin(), out.test_items.end()),
                       out.test_items.end());

  if (out.train.empty()) throw DataError("no training logs: split lies outside the data range");
  if (out.test.empty()) throw DataError("no test logs: split lies outside the data range");
  return out;
}

Catalog::Catalog(std::vector<ProgramMeta> metas) : metas_(std::move(metas)) {
  channel_of_.reserve(metas_.size());
  program_index_.reserve(metas_.size());
  for (std::size_t i = 0; i < metas_.size(); ++i) {
    const auto& m = metas_[i];
    if (m.start >= m.end || m.end - m.start >= kSecondsPerWeek) {
      throw DataError("program " + m.program + " has an invalid broadcast interval");
    }
    if (!program_index_.emplace(m.program, static_cast<ProgramIdx>(i)).second) {
      throw DataError("duplicate program id " + m.program);
    }
    auto [it, inserted] =
        channel_index_.emplace(m.channel, static_cast<ChannelIdx>(channel_names_.size()));
    if (inserted) channel_names_.push_back(m.channel);
    channel_of_.push_back(it->second);
  }
}

std::optional<ProgramIdx> Catalog::find(std::string_view program) const {
  auto it = program_index_.find(std::string(program));
  if (it == program_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<ChannelIdx> Catalog::find_channel(std::string_view channel) const {
  auto it = channel_index_.find(std::string(channel));
  if (it == channel_index_.end()) return std::nullopt;
  return it->second;
}

InteractionTensor::InteractionTensor(int slots, std::vector<std::string> users,
                                     std::vector<std::size_t> offsets,
                                     std::vector<TensorCell> cells)
    : slots_(slots), users_(std::move(users)), offsets_(std::move(offsets)),
      cells_(std::move(cells)) {
  if (offsets_.size() != users_.size() + 1 || offsets_.back() != cells_.size()) {
    throw InvariantError("tensor offsets do not match users and cells");
  }
  for (const auto& c : cells_) {
    if (c.count == 0) throw InvariantError("tensor stores a zero count");
    if (c.slot < 1 || c.slot > slots_) throw InvariantError("tensor slot out of range");
  }
  user_index_.reserve(users_.size());
  for (std::size_t u = 0; u < users_.size(); ++u) {
    user_index_.emplace(users_[u], static_cast<UserIdx>(u));
  }
}

std::optional<UserIdx> InteractionTensor::find_user(std::string_view user) const {
  auto it = user_index_.find(std::string(user));
  if (it == user_index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t InteractionTensor::user_total(UserIdx u) const {
  std::uint64_t sum = 0;
  for (const auto& c : cells(u)) sum += c.count;
  return sum;
}

std::uint64_t InteractionTensor::total() const {
  std::uint64_t sum = 0;
  for (const auto& c : cells_) sum += c.count;
  return sum;
}

std::uint32_t InteractionTensor::count(UserIdx u, ProgramIdx item, SlotIndex slot,
                                       ChannelIdx channel) const {
  auto row = cells(u);
  auto key = std::make_tuple(static_cast<int>(slot.value()), channel, item);
  auto it = std::lower_bound(row.begin(), row.end(), key, [](const TensorCell& c, const auto& k) {
    return std::make_tuple(static_cast<int>(c.slot), c.channel, c.item) < k;
  });
  if (it != row.end() && it->slot == slot.value() && it->channel == channel && it->item == item) {
    return it->count;
  }
  return 0;
}

InteractionTensor InteractionTensor::binarized() const {
  std::vector<TensorCell> cells = cells_;
  for (auto& c : cells) c.count = 1;
  return InteractionTensor(slots_, users_, offsets_, std::move(cells));
}

InteractionTensor build_tensor(const Split& split, const Catalog& catalog, const TimeGrid& grid) {
  std::set<std::string> unknown;
  for (const auto& d : split.train) {
    if (!catalog.find(d.program)) unknown.insert(d.program);
  }
  if (!unknown.empty()) {
    std::string msg = "training logs reference unknown programs:";
    std::size_t listed = 0;
    for (const auto& id : unknown) {
      if (++listed > 20) {
        msg += " ... (" + std::to_string(unknown.size()) + " total)";
        break;
      }
      msg += " " + id;
    }
    throw DataError(msg);
  }

  std::vector<char> in_train(catalog.size(), 0);
  for (const auto& id : split.train_items) {
    if (auto p = catalog.find(id)) in_train[*p] = 1;
  }
  std::vector<char> in_test(catalog.size(), 0);
  for (const auto& id : split.test_items) {
    if (auto p = catalog.find(id)) in_test[*p] = 1;
  }

  std::unordered_set<std::string_view> test_users;
  for (const auto& d : split.test) {
    auto p = catalog.find(d.program);
    if (p && in_test[*p]) test_users.insert(d.user);
  }

  struct Event {
    std::uint32_t user;
    int slot;
    ChannelIdx channel;
    ProgramIdx item;
    auto key() const { return std::make_tuple(user, slot, channel, item); }
  };
  std::unordered_map<std::string_view, std::uint32_t> user_ids;
  std::vector<std::string_view> user_names;
  std::vector<Event> events;
  events.reserve(split.train.size());
  for (const auto& d : split.train) {
    const ProgramIdx item = *catalog.find(d.program);
    if (!in_train[item] || !test_users.contains(d.user)) continue;
    auto channel = catalog.find_channel(d.channel);
    if (!channel) {
      throw DataError("log for program " + d.program + " references unknown channel " + d.channel);
    }
    auto [it, inserted] =
        user_ids.emplace(d.user, static_cast<std::uint32_t>(user_names.size()));
    if (inserted) user_names.push_back(d.user);
    events.push_back({it->second, grid.slot_of(d.t).value(), *channel, item});
  }

  // Renumber users in id order so the tensor layout is independent of log order.
  std::vector<std::uint32_t> order(user_names.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return user_names[a] < user_names[b]; });
  std::vector<std::uint32_t> rank(order.size());
  for (std::uint32_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  for (auto& e : events) e.user = rank[e.user];
  std::sort(events.begin(), events.end(),
            [](const Event& a, const Event& b) { return a.key() < b.key(); });

  std::vector<std::string> users;
  users.reserve(order.size());
  for (auto i : order) users.emplace_back(user_names[i]);
  std::vector<std::size_t> offsets(users.size() + 1, 0);
  std::vector<TensorCell> cells;
  for (std::size_t i = 0; i < events.size();) {
    std::size_t j = i;
    while (j < events.size() && events[j].key() == events[i].key()) ++j;
    const auto& e = events[i];
    cells.push_back({e.item, e.channel, static_cast<std::uint16_t>(e.slot),
                     static_cast<std::uint32_t>(j - i)});
    offsets[e.user + 1] = cells.size();
    i = j;
  }
  for (std::size_t u = 1; u < offsets.size(); ++u) offsets[u] = std::max(offsets[u], offsets[u - 1]);
  return InteractionTensor(grid.slots(), std::move(users), std::move(offsets), std::move(cells));
}

std::vector<std::string> ground_truth(const Split& split, std::string_view user) {
  std::vector<std::string> truth;
  for (const auto& d : split.test) {
    if (d.user != user) continue;
    if (std::binary_search(split.test_items.begin(), split.test_items.end(), d.program)) {
      truth.push_back(d.program);
    }
  }
  std::sort(truth.begin(), truth.end());
  truth.erase(std::unique(truth.begin(), truth.end()), truth.end());
  return truth;
}

std::vector<std::vector<std::string>> ground_truth_all(const Split& split,
                                                       const InteractionTensor& tensor) {
  std::vector<std::vector<std::string>> truth(tensor.user_count());
  for (const auto& d : split.test) {
    auto u = tensor.find_user(d.user);
    if (!u) continue;
    if (std::binary_search(split.test_items.begin(), split.test_items.end(), d.program)) {
      truth[*u].push_back(d.program);
    }
  }
  for (auto& t : truth) {
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
  }
  return truth;
}

std::vector<ScheduledProgram> schedule(const Catalog& catalog, std::span<const std::string> ids,
                                       const TimeGrid& grid) {
  std::vector<ScheduledProgram> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto p = catalog.find(id);
    if (!p) throw DataError("unknown program " + id);
    const auto& m = catalog.meta(*p);
    out.push_back({*p, catalog.channel_of(*p), m.start, m.end, grid.slot_of(m.start),
                   grid.span_length(m.start, m.end)});
  }
  std::sort(out.begin(), out.end(), [&](const ScheduledProgram& a, const ScheduledProgram& b) {
    if (a.start != b.start) return a.start < b.start;
    return catalog.meta(a.program).program < catalog.meta(b.program).program;
  });
  return out;
}

}  // namespace tvrec
