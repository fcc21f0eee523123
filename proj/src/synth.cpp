#include "tvrec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>
#include <unordered_set>

#include "tvrec/timegrid.hpp"

namespace tvrec::synth {

namespace {

constexpr int kMinutesPerWeek = 7 * 24 * 60;
constexpr int kSlotMinutes = 15;
constexpr int kSlotsPerWeek = kMinutesPerWeek / kSlotMinutes;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Random stream keyed by (seed, stream id). Draws are defined here rather
// than through std distributions so output does not depend on the standard
// library implementation.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream) : engine_(splitmix64(seed ^ splitmix64(stream))) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
  int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::size_t>(hi - lo + 1))); }
  bool chance(double p) { return uniform() < p; }

  std::size_t weighted(const std::vector<double>& weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    double x = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (x < weights[i]) return i;
      x -= weights[i];
    }
    return weights.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
};

enum StreamId : std::uint64_t { kWords = 1, kSchedule = 2, kAccounts = 1ULL << 32, kViewing = 1ULL << 48 };

std::string pseudo_word(Stream& rng) {
  static constexpr const char* kOnsets[] = {"b", "d", "f", "g", "h", "k", "m", "n", "p",
                                            "r", "s", "t", "v", "z", "ch", "sh", "br", "tr"};
  static constexpr const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};
  std::string w;
  const int syllables = rng.between(2, 3);
  for (int s = 0; s < syllables; ++s) {
    w += kOnsets[rng.below(std::size(kOnsets))];
    w += kVowels[rng.below(std::size(kVowels))];
  }
  if (rng.chance(0.3)) w += "n";
  return w;
}

// Skewed pick: low indices are the frequent words of a topic.
const std::string& topic_word(const std::vector<std::string>& words, Stream& rng) {
  const double u = rng.uniform();
  return words[static_cast<std::size_t>(u * u * static_cast<double>(words.size()))];
}

std::string channel_name(std::size_t c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "ch%02zu", c);
  return buf;
}

struct Show {
  std::uint32_t topic;
  std::vector<std::string> title;
};

Show make_show(std::uint32_t topic, const World& world, Stream& rng) {
  Show s{topic, {}};
  const int n = rng.between(2, 3);
  for (int i = 0; i < n; ++i) s.title.push_back(topic_word(world.topic_words[topic], rng));
  return s;
}

std::uint32_t draw_show_topic(std::uint32_t theme, std::size_t topics, Stream& rng) {
  return rng.chance(0.6) ? theme : static_cast<std::uint32_t>(rng.below(topics));
}

std::string episode_text(const Show& show, const World& world, const SynthConfig& cfg, Stream& rng) {
  std::vector<std::string> tokens = show.title;
  if (rng.chance(0.3)) {
    tokens[rng.below(tokens.size())] = topic_word(world.topic_words[show.topic], rng);
  }
  const int extra = rng.between(5, 15) - static_cast<int>(tokens.size());
  for (int i = 0; i < extra; ++i) {
    if (rng.chance(cfg.common_word_mass)) {
      tokens.push_back(world.common_words[rng.below(world.common_words.size())]);
    } else {
      tokens.push_back(topic_word(world.topic_words[show.topic], rng));
    }
  }
  std::string text;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i == 0) {
      std::string t = tokens[i];
      t[0] = static_cast<char>(t[0] - 'a' + 'A');
      text += t;
    } else {
      text += ' ';
      text += tokens[i];
    }
  }
  return text;
}

// Program lengths in minutes, multiples of 5, averaging `mean`.
std::vector<int> duration_menu(double mean) {
  std::vector<int> menu;
  for (double f : {0.5, 2.0 / 3.0, 5.0 / 6.0, 1.0, 4.0 / 3.0, 5.0 / 3.0}) {
    menu.push_back(std::max(5, static_cast<int>(std::lround(f * mean / 5.0)) * 5));
  }
  return menu;
}


struct DayPart {
  int from;  // minute of day
  int to;    // may exceed 1440 (past midnight)
};

constexpr DayPart kDayParts[] = {
    {6 * 60, 9 * 60}, {10 * 60, 15 * 60}, {15 * 60, 19 * 60}, {19 * 60, 23 * 60}, {22 * 60, 26 * 60}};

}  // namespace

void SynthConfig::validate() const {
  if (accounts < 1 || channels < 1 || topics < 1 || weeks_train < 1 || weeks_test < 1) {
    throw ConfigError("synth counts must all be at least 1");
  }
  if (personas_min < 1 || personas_max < personas_min) {
    throw ConfigError("persona range must satisfy 1 <= min <= max");
  }
  if (personas_max > std::size(kDayParts)) {
    throw ConfigError("at most " + std::to_string(std::size(kDayParts)) + " personas per account");
  }
  if (!(programs_per_slot_target > 1.0)) {
    throw ConfigError("programs_per_slot_target must exceed 1 for a gap-free schedule");
  }
  if (words_per_topic < 1 || common_words < 1) throw ConfigError("word pools must be non-empty");
  for (double p : {common_word_mass, attention, one_off_probability}) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("synth probabilities must lie in [0, 1]");
  }
  if (start != 0) {
    const TimeGrid grid(TimeGrid::kDefaultSlots, utc_offset);
    if (grid.week_start(start) != start) throw ConfigError("synth start must be a local Monday 00:00");
  }
}

Timestamp SynthConfig::first_week() const {
  if (start != 0) return start;
  const TimeGrid grid(TimeGrid::kDefaultSlots, utc_offset);
  return grid.week_start(1546819200 + 3 * kSecondsPerDay);  // week of 2019-01-07
}

Timestamp SynthConfig::t_split() const {
  return first_week() + static_cast<Timestamp>(weeks_train) * kSecondsPerWeek;
}

nlohmann::json SynthConfig::to_json() const {
  return {{"accounts", accounts},
          {"channels", channels},
          {"topics", topics},
          {"weeks_train", weeks_train},
          {"weeks_test", weeks_test},
          {"personas_min", personas_min},
          {"personas_max", personas_max},
          {"programs_per_slot_target", programs_per_slot_target},
          {"seed", seed},
          {"utc_offset_secs", utc_offset},
          {"start", first_week()},
          {"words_per_topic", words_per_topic},
          {"common_words", common_words},
          {"common_word_mass", common_word_mass},
          {"attention", attention},
          {"one_off_probability", one_off_probability}};
}

SynthConfig SynthConfig::from_json(const nlohmann::json& j) {
  SynthConfig c;
  try {
    c.accounts = j.value("accounts", c.accounts);
    c.channels = j.value("channels", c.channels);
    c.topics = j.value("topics", c.topics);
    c.weeks_train = j.value("weeks_train", c.weeks_train);
    c.weeks_test = j.value("weeks_test", c.weeks_test);
    c.personas_min = j.value("personas_min", c.personas_min);
    c.personas_max = j.value("personas_max", c.personas_max);
    c.programs_per_slot_target = j.value("programs_per_slot_target", c.programs_per_slot_target);
    c.seed = j.value("seed", c.seed);
    c.utc_offset = j.value("utc_offset_secs", c.utc_offset);
    c.start = j.value("start", c.start);
    c.words_per_topic = j.value("words_per_topic", c.words_per_topic);
    c.common_words = j.value("common_words", c.common_words);
    c.common_word_mass = j.value("common_word_mass", c.common_word_mass);
    c.attention = j.value("attention", c.attention);
    c.one_off_probability = j.value("one_off_probability", c.one_off_probability);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad synth config: ") + e.what());
  }
  c.validate();
  return c;
}

std::vector<HabitCell> Persona::habit() const {
  std::vector<HabitCell> cells;
  for (const auto& s : sittings) {
    const double total = std::accumulate(s.channel_weights.begin(), s.channel_weights.end(), 0.0);
    for (int day : s.days) {
      for (int k = 0; k < s.slots; ++k) {
        const int slot = ((day * 1440 + s.start_minute) / kSlotMinutes + k) % kSlotsPerWeek + 1;
        for (std::size_t c = 0; c < s.channels.size(); ++c) {
          cells.push_back({slot, s.channels[c], s.probability * s.channel_weights[c] / total});
        }
      }
    }
  }
  std::sort(cells.begin(), cells.end(), [](const HabitCell& a, const HabitCell& b) {
    return a.slot != b.slot ? a.slot < b.slot : a.channel < b.channel;
  });
  // Merge duplicates (a channel listed twice in one sitting).
  std::vector<HabitCell> merged;
  for (const auto& c : cells) {
    if (!merged.empty() && merged.back().slot == c.slot && merged.back().channel == c.channel) {
      merged.back().probability += c.probability;
    } else {
      merged.push_back(c);
    }
  }
  return merged;
}

World gen_world(const SynthConfig& cfg) {
  cfg.validate();
  World world;
  Stream words(cfg.seed, kWords);
  std::unordered_set<std::string> used;
  auto fresh_word = [&] {
    for (;;) {
      std::string w = pseudo_word(words);
      if (used.insert(w).second) return w;
    }
  };
  world.topic_words.resize(cfg.topics);
  for (auto& topic : world.topic_words) {
    for (std::size_t i = 0; i < cfg.words_per_topic; ++i) topic.push_back(fresh_word());
  }
  for (std::size_t i = 0; i < cfg.common_words; ++i) world.common_words.push_back(fresh_word());

  for (std::size_t c = 0; c < cfg.channels; ++c) {
    world.channels.push_back(channel_name(c));
    world.channel_theme.push_back(static_cast<std::uint32_t>(c % cfg.topics));
  }

  // Touching programs per slot is 1 + slot / mean length for a gap-free schedule.
  const double mean_minutes = std::min(360.0, kSlotMinutes / (cfg.programs_per_slot_target - 1.0));
  const auto menu = duration_menu(mean_minutes);
  const Timestamp origin = cfg.first_week();

  for (std::size_t c = 0; c < cfg.channels; ++c) {
    Stream rng(cfg.seed, kSchedule + 16 * c);
    const std::uint32_t theme = world.channel_theme[c];

    // Weekly template: a gap-free run of shows covering the week.
    struct Airing {
      int start;
      int length;
      Show show;
    };
    std::vector<Airing> week;
    for (int pos = 0; pos < kMinutesPerWeek;) {
      int len = menu[rng.below(menu.size())];
      if (kMinutesPerWeek - (pos + len) < 10) len = kMinutesPerWeek - pos;
      week.push_back({pos, len, make_show(draw_show_topic(theme, cfg.topics, rng), world, rng)});
      pos += len;
    }

    for (std::size_t w = 0; w < cfg.weeks(); ++w) {
      for (std::size_t k = 0; k < week.size(); ++k) {
        const auto& a = week[k];
        Show show = a.show;
        if (rng.chance(cfg.one_off_probability)) {
          show = make_show(draw_show_topic(theme, cfg.topics, rng), world, rng);
        }
        char id[48];
        std::snprintf(id, sizeof id, "%s-w%02zu-%04zu", world.channels[c].c_str(), w, k);
        const Timestamp start = origin + static_cast<Timestamp>(w) * kSecondsPerWeek + a.start * 60;
        world.programs.push_back({id, world.channels[c], start, start + a.length * 60,
                                  episode_text(show, world, cfg, rng)});
        world.program_topic.push_back(show.topic);
      }
    }
  }
  return world;
}

namespace {

std::vector<int> draw_days(Stream& rng) {
  switch (rng.below(5)) {
    case 0: return {0, 1, 2, 3, 4};
    case 1: return {5, 6};
    case 2: return {0, 1, 2, 3, 4, 5, 6};
    case 3: return {static_cast<int>(rng.below(7))};
    default: {
      std::set<int> days;
      while (days.size() < 3) days.insert(static_cast<int>(rng.below(7)));
      return {days.begin(), days.end()};
    }
  }
}

bool overlaps(const Sitting& a, const Sitting& b) {
  for (int da : a.days) {
    for (int db : b.days) {
      const int a0 = da * 1440 + a.start_minute, a1 = a0 + a.slots * kSlotMinutes;
      const int b0 = db * 1440 + b.start_minute, b1 = b0 + b.slots * kSlotMinutes;
      for (int shift : {-kMinutesPerWeek, 0, kMinutesPerWeek}) {
        if (a0 < b1 + shift && b0 + shift < a1) return true;
      }
    }
  }
  return false;
}

std::uint32_t pick_channel(std::uint32_t topic, const World& world, Stream& rng) {
  std::vector<std::uint32_t> themed;
  for (std::uint32_t c = 0; c < world.channels.size(); ++c) {
    if (world.channel_theme[c] == topic) themed.push_back(c);
  }
  if (!themed.empty() && rng.chance(0.7)) return themed[rng.below(themed.size())];
  return static_cast<std::uint32_t>(rng.below(world.channels.size()));
}

}  // namespace

std::vector<Account> gen_accounts(const World& world, const SynthConfig& cfg) {
  cfg.validate();
  std::vector<Account> accounts;
  accounts.reserve(cfg.accounts);
  for (std::size_t a = 0; a < cfg.accounts; ++a) {
    Stream rng(cfg.seed, kAccounts + a);
    Account account;
    char id[16];
    std::snprintf(id, sizeof id, "u%05zu", a);
    account.id = id;

    const int n_personas = rng.between(static_cast<int>(cfg.personas_min), static_cast<int>(cfg.personas_max));
    std::vector<std::size_t> parts(std::size(kDayParts));
    std::iota(parts.begin(), parts.end(), 0);
    std::vector<std::uint32_t> topics(cfg.topics);
    std::iota(topics.begin(), topics.end(), 0);

    for (int p = 0; p < n_personas; ++p) {
      Persona persona;
      persona.attention = cfg.attention;
      persona.topics.assign(cfg.topics, 0.0);
      // Personas of one account get distinct day parts and main topics.
      const std::size_t part_pick = rng.below(parts.size() - static_cast<std::size_t>(p));
      std::swap(parts[part_pick], parts[parts.size() - 1 - static_cast<std::size_t>(p)]);
      const DayPart part = kDayParts[parts[parts.size() - 1 - static_cast<std::size_t>(p)]];
      std::uint32_t main_topic = topics[0];
      if (static_cast<std::size_t>(p) < topics.size()) {
        const std::size_t pick = rng.below(topics.size() - static_cast<std::size_t>(p));
        std::swap(topics[pick], topics[topics.size() - 1 - static_cast<std::size_t>(p)]);
        main_topic = topics[topics.size() - 1 - static_cast<std::size_t>(p)];
      }
      const auto second_topic = static_cast<std::uint32_t>(rng.below(cfg.topics));
      const double main_weight = 0.7 + 0.15 * rng.uniform();
      persona.topics[main_topic] += main_weight;
      persona.topics[second_topic] += 1.0 - main_weight;

      const int n_sittings = rng.between(2, 4);
      for (int attempt = 0; attempt < 12 && persona.sittings.size() < static_cast<std::size_t>(n_sittings);
           ++attempt) {
        Sitting s;
        s.days = draw_days(rng);
        const int room = (part.to - part.from) / kSlotMinutes;
        s.slots = std::min(rng.between(2, 8), room);
        s.start_minute = part.from + kSlotMinutes * rng.between(0, room - s.slots);
        s.probability = 0.5 + 0.4 * rng.uniform();
        const std::uint32_t primary = pick_channel(main_topic, world, rng);
        const std::uint32_t secondary = pick_channel(rng.chance(0.5) ? main_topic : second_topic, world, rng);
        s.channels = {primary};
        s.channel_weights = {0.8};
        if (secondary != primary) {
          s.channels.push_back(secondary);
          s.channel_weights.push_back(0.2);
        } else {
          s.channel_weights[0] = 1.0;
        }
        const bool clash = std::any_of(persona.sittings.begin(), persona.sittings.end(),
                                       [&](const Sitting& o) { return overlaps(s, o); });
        if (!clash) persona.sittings.push_back(std::move(s));
      }
      account.personas.push_back(std::move(persona));
    }
    accounts.push_back(std::move(account));
  }
  return accounts;
}

std::vector<ViewingLog> gen_logs(const World& world, const std::vector<Account>& accounts,
                                 const SynthConfig& cfg) {
  cfg.validate();
  const Timestamp origin = cfg.first_week();
  // Per channel: indices of its programs in start order (programs are
  // generated channel by channel, already sorted).
  std::vector<std::vector<std::uint32_t>> by_channel(world.channels.size());
  for (std::uint32_t i = 0; i < world.programs.size(); ++i) {
    const auto c = std::find(world.channels.begin(), world.channels.end(), world.programs[i].channel) -
                   world.channels.begin();
    by_channel[static_cast<std::size_t>(c)].push_back(i);
  }

  std::vector<ViewingLog> logs;
  std::vector<std::uint32_t> airing;
  for (std::size_t a = 0; a < accounts.size(); ++a) {
    const Account& account = accounts[a];
    Stream rng(cfg.seed, kViewing + a);
    for (const Persona& persona : account.personas) {
      for (std::size_t week = 0; week < cfg.weeks(); ++week) {
        for (const Sitting& sitting : persona.sittings) {
          for (int day : sitting.days) {
            if (!rng.chance(sitting.probability)) continue;
            const std::uint32_t channel = sitting.channels[rng.weighted(sitting.channel_weights)];
            const auto& programs = by_channel[channel];
            const Timestamp window =
                origin + static_cast<Timestamp>(week) * kSecondsPerWeek +
                (static_cast<Timestamp>(day) * 1440 + sitting.start_minute) * 60;

            std::uint32_t current = UINT32_MAX;
            Timestamp seg_begin = 0, seg_end = 0;
            std::set<std::uint32_t> flipped;
            std::set<std::uint32_t> watched;
            auto close = [&] {
              if (current == UINT32_MAX) return;
              const auto& m = world.programs[current];
              logs.push_back({account.id, m.program, m.channel, seg_begin, seg_end - seg_begin});
              watched.insert(current);
              current = UINT32_MAX;
            };

            for (int k = 0; k < sitting.slots; ++k) {
              const Timestamp lo = window + static_cast<Timestamp>(k) * kSlotMinutes * 60;
              const Timestamp hi = lo + kSlotMinutes * 60;
              airing.clear();
              auto it = std::upper_bound(programs.begin(), programs.end(), lo,
                                         [&](Timestamp t, std::uint32_t p) { return t < world.programs[p].end; });
              for (; it != programs.end() && world.programs[*it].start < hi; ++it) airing.push_back(*it);
              if (airing.empty()) {
                close();
                continue;
              }
              std::uint32_t best = airing.front();
              double best_w = persona.topics[world.program_topic[best]];
              for (auto p : airing) {
                const double w = persona.topics[world.program_topic[p]];
                if (w > best_w) {
                  best = p;
                  best_w = w;
                }
              }
              const bool watch = best_w > 0.0 || rng.chance(persona.attention);
              if (!watch || best != current) close();
              if (watch) {
                const auto& m = world.programs[best];
                if (current != best) {
                  current = best;
                  seg_begin = std::max(m.start, lo);
                }
                seg_end = std::min(m.end, hi);
              }
              for (auto p : airing) {
                if ((watch && p == best) || flipped.contains(p)) continue;
                flipped.insert(p);
              }
            }
            close();
            for (auto p : flipped) {
              if (watched.contains(p)) continue;
              const auto& m = world.programs[p];
              const Timestamp t = std::max(m.start, window) + static_cast<Timestamp>(rng.below(60));
              logs.push_back({account.id, m.program, m.channel, t,
                              static_cast<Duration>(20 + rng.below(281))});
            }
          }
        }
      }
    }
  }
  return logs;
}

std::vector<ViewingLog> gen_logs(const World& world, const SynthConfig& cfg) {
  return gen_logs(world, gen_accounts(world, cfg), cfg);
}

nlohmann::json manifest(const SynthConfig& cfg, const World& world,
                        const std::vector<Account>& accounts) {
  nlohmann::json planted = nlohmann::json::array();
  for (const auto& account : accounts) {
    nlohmann::json personas = nlohmann::json::array();
    for (const auto& p : account.personas) {
      nlohmann::json habit = nlohmann::json::array();
      for (const auto& h : p.habit()) {
        habit.push_back({h.slot, world.channels[h.channel], h.probability});
      }
      personas.push_back({{"topics", p.topics}, {"attention", p.attention}, {"habit", std::move(habit)}});
    }
    planted.push_back({{"account", account.id}, {"personas", std::move(personas)}});
  }
  nlohmann::json channels = nlohmann::json::array();
  for (std::size_t c = 0; c < world.channels.size(); ++c) {
    channels.push_back({{"channel", world.channels[c]}, {"theme", world.channel_theme[c]}});
  }
  return {{"seed", cfg.seed},
          {"config", cfg.to_json()},
          {"t_split", cfg.t_split()},
          {"programs", world.programs.size()},
          {"channels", std::move(channels)},
          {"topic_words", world.topic_words},
          {"common_words", world.common_words},
          {"accounts", std::move(planted)}};
}

}  // namespace tvrec::synth
