#include "config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace tvrec::cli {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

}  // namespace

EngineConfig EngineConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open config " + file.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("config " + file.string() + " is not a JSON object");
  return from_json(j, file.parent_path());
}

EngineConfig EngineConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base) {
  EngineConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    const auto empty = nlohmann::json::object();
    const auto& grid = j.contains("grid") ? j.at("grid") : empty;
    c.slots = grid.value("slots", c.slots);
    c.utc_offset = grid.value("utc_offset_secs", c.utc_offset);
    const auto& prep = j.contains("preprocess") ? j.at("preprocess") : empty;
    c.min_duration = prep.value("min_duration_secs", c.min_duration);
    if (prep.contains("t_split") && !prep.at("t_split").is_null()) {
      c.t_split = prep.at("t_split").get<Timestamp>();
    }
    c.train_days = prep.value("train_days", c.train_days);
    c.test_days = prep.value("test_days", c.test_days);
    c.binarize = prep.value("binarize", c.binarize);
    const auto& enc = j.contains("encoder") ? j.at("encoder") : empty;
    c.tokenizer = enc.value("tokenizer", c.tokenizer);
    c.min_df = enc.value("min_df", c.min_df);
    c.max_vocab = enc.value("max_vocab", c.max_vocab);
    c.l2_normalize = enc.value("l2_normalize", c.l2_normalize);
    const auto& rank = j.contains("ranking") ? j.at("ranking") : empty;
    c.k = rank.value("k", c.k);
    c.method = parse_method(rank.value("method", std::string(to_string(c.method))));
    c.mode = parse_preference_mode(rank.value("mode", std::string(to_string(c.mode))));
    c.eta = rank.value("eta", c.eta);
    c.xi = rank.value("xi", c.xi);
    c.cutoffs = rank.value("cutoffs", c.cutoffs);
    const auto& paths = j.contains("paths") ? j.at("paths") : empty;
    if (paths.contains("logs")) c.logs = resolve(base, paths.at("logs").get<std::string>());
    if (paths.contains("programs")) c.programs = resolve(base, paths.at("programs").get<std::string>());
    c.work_dir = resolve(base, paths.value("work_dir", std::string("work")));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

nlohmann::json EngineConfig::to_json() const {
  return {{"seed", seed},
          {"grid", {{"slots", slots}, {"utc_offset_secs", utc_offset}}},
          {"preprocess",
           {{"min_duration_secs", min_duration},
            {"t_split", t_split ? nlohmann::json(*t_split) : nlohmann::json()},
            {"train_days", train_days},
            {"test_days", test_days},
            {"binarize", binarize}}},
          {"encoder",
           {{"tokenizer", tokenizer},
            {"min_df", min_df},
            {"max_vocab", max_vocab},
            {"l2_normalize", l2_normalize}}},
          {"ranking",
           {{"k", k},
            {"method", std::string(to_string(method))},
            {"mode", std::string(to_string(mode))},
            {"eta", eta},
            {"xi", xi},
            {"cutoffs", cutoffs}}},
          {"paths",
           {{"logs", logs.string()}, {"programs", programs.string()}, {"work_dir", work_dir.string()}}}};
}

void EngineConfig::validate() const {
  (void)TimeGrid(slots, utc_offset);
  if (min_duration < 0) throw ConfigError("min_duration_secs must be non-negative");
  if (!t_split) throw ConfigError("no split time: set preprocess.t_split or pass --t-split");
  if (!(train_days > 0) || !(test_days > 0)) throw ConfigError("train/test windows must be positive");
  if (k == 0) throw ConfigError("k must be at least 1");
  if (cutoffs.empty()) throw ConfigError("at least one cutoff is required");
  for (auto n : cutoffs) {
    if (n == 0) throw ConfigError("cutoffs must be positive");
    if (n > k) throw ConfigError("k must be at least the largest cutoff");
  }
  if (!(eta >= 0)) throw ConfigError("eta must be non-negative");
  if (!(xi >= 0 && xi <= 1)) throw ConfigError("xi must lie in [0, 1]");
  (void)make_tokenizer(tokenizer);
}

PrepOptions EngineConfig::prep_options() const {
  PrepOptions o;
  o.grid = TimeGrid(slots, utc_offset);
  o.min_duration = min_duration;
  o.split.t_split = t_split.value_or(0);
  o.split.train = static_cast<Duration>(train_days * kSecondsPerDay);
  o.split.test = static_cast<Duration>(test_days * kSecondsPerDay);
  o.binarize = binarize;
  o.tokenizer = tokenizer;
  o.encoder = {min_df, max_vocab, l2_normalize};
  return o;
}

RecommendOptions EngineConfig::recommend_options() const { return {method, k, eta, xi}; }

std::string EngineConfig::hash() const {
  // Locations are left out so a moved or copied run keeps its hash.
  auto j = to_json();
  j.erase("paths");
  return fnv1a_hex(j.dump());
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::size_t> parse_cutoffs(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(part, &used);
    } catch (const std::exception&) {
      throw ConfigError("bad cutoff '" + part + "'");
    }
    if (used != part.size() || v <= 0) throw ConfigError("bad cutoff '" + part + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ConfigError("no cutoffs given");
  return out;
}

}  // namespace tvrec::cli
