#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tvrec/pipeline.hpp"
#include "tvrec/preference.hpp"
#include "tvrec/ranker.hpp"

namespace tvrec::cli {

/// Engine configuration file. Every key is optional except the split time
/// and the input paths, which may also come from flags.
///
///   {
///     "seed": 1,
///     "grid":       {"slots": 672, "utc_offset_secs": 0},
///     "preprocess": {"min_duration_secs": 900, "t_split": 1554076800,
///                    "train_days": 90, "test_days": 7, "binarize": false},
///     "encoder":    {"tokenizer": "unicode", "min_df": 1, "max_vocab": 0,
///                    "l2_normalize": true},
///     "ranking":    {"k": 30, "method": "two-stage", "mode": "time-aware",
///                    "eta": 60, "xi": 0.5, "cutoffs": [10, 20, 30]},
///     "paths":      {"logs": "logs.jsonl", "programs": "programs.jsonl",
///                    "work_dir": "work"}
///   }
///
/// Relative paths are resolved against the directory of the config file.
struct EngineConfig {
  std::uint64_t seed = 1;
  int slots = TimeGrid::kDefaultSlots;
  Duration utc_offset = 0;
  Duration min_duration = 900;
  std::optional<Timestamp> t_split;
  double train_days = 90;
  double test_days = 7;
  bool binarize = false;
  std::string tokenizer = "unicode";
  std::size_t min_df = 1;
  std::size_t max_vocab = 0;
  bool l2_normalize = true;
  std::size_t k = 30;
  Method method = Method::two_stage;
  PreferenceMode mode = PreferenceMode::time_aware;
  double eta = 60;
  double xi = 0.5;
  std::vector<std::size_t> cutoffs{10, 20, 30};
  std::filesystem::path logs;
  std::filesystem::path programs;
  std::filesystem::path work_dir = "work";

  static EngineConfig load(const std::filesystem::path& file);
  static EngineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base);
  nlohmann::json to_json() const;

  /// Throws ConfigError on violated constraints (k below the largest cutoff,
  /// missing split time, ...).
  void validate() const;
  PrepOptions prep_options() const;
  RecommendOptions recommend_options() const;
  /// FNV-1a of the canonical JSON form without paths, as 16 hex digits.
  std::string hash() const;
};

/// 64-bit FNV-1a of `text`, as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

/// Comma-separated positive integers, e.g. "10,20,30".
std::vector<std::size_t> parse_cutoffs(const std::string& text);

}  // namespace tvrec::cli
