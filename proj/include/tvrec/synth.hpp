#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "tvrec/datamodel.hpp"
#include "tvrec/types.hpp"

namespace tvrec::synth {

struct SynthConfig {
  std::size_t accounts = 2000;
  std::size_t channels = 30;
  std::size_t topics = 20;
  std::size_t weeks_train = 12;
  std::size_t weeks_test = 1;
  std::size_t personas_min = 1;
  std::size_t personas_max = 3;
  double programs_per_slot_target = 1.5;
  std::uint64_t seed = 1;
  Duration utc_offset = 0;
  // UTC time of the local Monday 00:00 that starts week 0; 0 = derive one
  // in early January 2019.
  Timestamp start = 0;
  std::size_t words_per_topic = 40;
  std::size_t common_words = 60;
  double common_word_mass = 0.2;
  double attention = 0.3;
  double one_off_probability = 0.15;  // airing replaced by a one-off show

  void validate() const;
  Timestamp first_week() const;
  Timestamp t_split() const;
  std::size_t weeks() const { return weeks_train + weeks_test; }

  nlohmann::json to_json() const;
  /// Missing keys keep their defaults; throws ConfigError on bad values.
  static SynthConfig from_json(const nlohmann::json& j);
};

struct World {
  std::vector<ProgramMeta> programs;        // ordered by channel, then start
  std::vector<std::uint32_t> program_topic;  // parallel to programs
  std::vector<std::string> channels;
  std::vector<std::uint32_t> channel_theme;
  std::vector<std::vector<std::string>> topic_words;
  std::vector<std::string> common_words;
};

/// A channel sitting: on `days`, from `start_minute` for `slots` 15-minute
/// slots, tuned with probability `probability` to a channel drawn from
/// `channels`/`channel_weights`.
struct Sitting {
  std::vector<int> days;  // 0 = Monday
  int start_minute = 0;   // minute of day, multiple of 15
  int slots = 1;
  double probability = 0.0;
  std::vector<std::uint32_t> channels;
  std::vector<double> channel_weights;
};

struct HabitCell {
  int slot;  // 1-based slot of the 672-slot week
  std::uint32_t channel;
  double probability;
};

struct Persona {
  std::vector<double> topics;  // sums to 1
  double attention = 0.0;
  std::vector<Sitting> sittings;

  /// Probability of being tuned to each (slot, channel), sorted by slot then channel.
  std::vector<HabitCell> habit() const;
};

struct Account {
  std::string id;
  std::vector<Persona> personas;
};

World gen_world(const SynthConfig& cfg);
std::vector<Account> gen_accounts(const World& world, const SynthConfig& cfg);
std::vector<ViewingLog> gen_logs(const World& world, const std::vector<Account>& accounts,
                                 const SynthConfig& cfg);
std::vector<ViewingLog> gen_logs(const World& world, const SynthConfig& cfg);

/// Seed, config and planted parameters for oracle checks.
nlohmann::json manifest(const SynthConfig& cfg, const World& world,
                        const std::vector<Account>& accounts);

}  // namespace tvrec::synth
