#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "config.hpp"
#include "json.hpp"
#include "tvrec/behavior.hpp"
#include "tvrec/eval.hpp"
#include "tvrec/pipeline.hpp"
#include "tvrec/synth.hpp"

namespace tvrec::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::ifstream open_input(const fs::path& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("no ") + what + " path configured");
  std::ifstream in(path);
  if (!in) throw DataError(std::string("cannot open ") + what + " " + path.string());
  return in;
}

json read_json_file(const fs::path& path, const char* what) {
  auto in = open_input(path, what);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw DataError(std::string(what) + " " + path.string() + " is not valid JSON");
  return j;
}

// Lines of a JSONL file with an optional leading {"_meta": ...} line.
struct JsonLines {
  json meta;
  std::vector<json> rows;
};

JsonLines read_jsonl(const fs::path& path, const char* what) {
  auto in = open_input(path, what);
  JsonLines out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw DataError(path.string() + ":" + std::to_string(n) + ": malformed line");
    }
    if (j.contains("_meta")) {
      out.meta = j.at("_meta");
      continue;
    }
    out.rows.push_back(std::move(j));
  }
  return out;
}

// user -> item ids, as written by prep (truth) and recommend (recs).
std::map<std::string, std::vector<std::string>> user_items(const JsonLines& lines, const char* what) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& row : lines.rows) {
    try {
      auto user = row.at("user").get<std::string>();
      auto items = row.at("items").get<std::vector<std::string>>();
      if (!out.emplace(std::move(user), std::move(items)).second) {
        throw DataError(std::string("duplicate user in ") + what);
      }
    } catch (const json::exception&) {
      throw DataError(std::string("bad row in ") + what + ": " + row.dump());
    }
  }
  return out;
}

std::string meta_line(json meta) { return json{{"_meta", std::move(meta)}}.dump() + "\n"; }

json provenance(const EngineConfig& cfg, const char* kind) {
  return {{"kind", kind}, {"config_hash", cfg.hash()}, {"seed", cfg.seed}};
}

// Flags shared by the commands that read the dataset; each overrides the
// matching config key when given.
struct DataFlags {
  std::string config;
  std::string logs, programs, work_dir;
  Timestamp t_split = 0;
  double train_days = 0, test_days = 0;
  Duration min_duration = 0;
  int slots = 0;
  Duration utc_offset = 0;
  std::uint64_t seed = 0;
  bool binarize = false;
  std::map<std::string, CLI::Option*> opts;

  void attach(CLI::App* app) {
    opts["config"] = app->add_option("--config", config, "engine config JSON")->required();
    opts["logs"] = app->add_option("--logs", logs, "viewing logs JSONL");
    opts["programs"] = app->add_option("--programs", programs, "program metadata JSONL");
    opts["work-dir"] = app->add_option("--work-dir", work_dir, "output directory");
    opts["t-split"] = app->add_option("--t-split", t_split, "split time, Unix seconds");
    opts["train-days"] = app->add_option("--train-days", train_days);
    opts["test-days"] = app->add_option("--test-days", test_days);
    opts["min-duration"] = app->add_option("--min-duration-secs", min_duration, "flip threshold");
    opts["slots"] = app->add_option("--slots", slots, "slots per week");
    opts["utc-offset"] = app->add_option("--utc-offset-secs", utc_offset);
    opts["seed"] = app->add_option("--seed", seed);
    opts["binarize"] = app->add_flag("--binarize", binarize, "count each interaction once");
  }

  bool given(const char* name) const { return opts.at(name)->count() > 0; }

  EngineConfig load() const {
    EngineConfig c = EngineConfig::load(config);
    if (given("logs")) c.logs = logs;
    if (given("programs")) c.programs = programs;
    if (given("work-dir")) c.work_dir = work_dir;
    if (given("t-split")) c.t_split = t_split;
    if (given("train-days")) c.train_days = train_days;
    if (given("test-days")) c.test_days = test_days;
    if (given("min-duration")) c.min_duration = min_duration;
    if (given("slots")) c.slots = slots;
    if (given("utc-offset")) c.utc_offset = utc_offset;
    if (given("seed")) c.seed = seed;
    if (given("binarize")) c.binarize = binarize;
    return c;
  }
};

// Ranking flags; same override rule.
struct RankFlags {
  std::string method, mode;
  std::size_t k = 0;
  double eta = 0, xi = 0;
  CLI::Option *o_method = nullptr, *o_mode = nullptr, *o_k = nullptr, *o_eta = nullptr,
              *o_xi = nullptr;

  void attach(CLI::App* app, bool with_method) {
    if (with_method) {
      o_method = app->add_option("--method", method,
                                 "behavior, preference, two-stage, rrf or rrf-weighted");
      o_k = app->add_option("--k", k, "list length");
      o_eta = app->add_option("--eta", eta, "fusion constant");
      o_xi = app->add_option("--xi", xi, "behavior weight of weighted fusion");
    }
    o_mode = app->add_option("--mode", mode, "global or time-aware");
  }

  void apply(EngineConfig& c) const {
    if (o_method && o_method->count()) c.method = parse_method(method);
    if (o_mode && o_mode->count()) c.mode = parse_preference_mode(mode);
    if (o_k && o_k->count()) c.k = k;
    if (o_eta && o_eta->count()) c.eta = eta;
    if (o_xi && o_xi->count()) c.xi = xi;
  }
};

PreparedData load_data(const EngineConfig& cfg, std::ostream& err) {
  cfg.validate();
  auto log_in = open_input(cfg.logs, "logs");
  auto prog_in = open_input(cfg.programs, "programs");
  auto logs = parse_logs(log_in);
  auto programs = parse_programs(prog_in);
  if (logs.skipped > 0) err << "warning: skipped " << logs.skipped << " malformed log lines\n";
  if (programs.skipped > 0) err << "warning: skipped " << programs.skipped << " malformed program lines\n";
  return prepare(logs.records, std::move(programs.records), cfg.prep_options());
}

std::string truth_jsonl(const EngineConfig& cfg, const PreparedData& d) {
  std::string out = meta_line(provenance(cfg, "truth"));
  for (UserIdx u = 0; u < d.tensor.user_count(); ++u) {
    std::vector<std::string> ids;
    for (auto pos : d.truth[u]) ids.push_back(d.catalog.meta(d.candidates.program(pos).program).program);
    std::sort(ids.begin(), ids.end());
    out += json{{"user", d.tensor.user_name(u)}, {"items", ids}}.dump() + "\n";
  }
  return out;
}

PreferenceModel load_or_build_model(const EngineConfig& cfg, const PreparedData& d,
                                    const std::string& model_path) {
  if (model_path.empty()) return PreferenceModel::build(d.tensor, d.catalog, d.embeddings, cfg.mode);
  auto model = PreferenceModel::from_json(read_json_file(model_path, "model"), d.tensor);
  if (model.mode() != cfg.mode) {
    throw ConfigError("model " + model_path + " was built in " + std::string(to_string(model.mode())) +
                      " mode, but " + std::string(to_string(cfg.mode)) + " was requested");
  }
  return model;
}

// ---------------------------------------------------------------- commands

int cmd_synth(const std::string& config, const std::string& out_dir, const std::optional<std::uint64_t>& seed,
              const std::optional<std::size_t>& accounts, std::ostream& out) {
  synth::SynthConfig cfg;
  if (!config.empty()) cfg = synth::SynthConfig::from_json(read_json_file(config, "synth config"));
  if (seed) cfg.seed = *seed;
  if (accounts) cfg.accounts = *accounts;
  cfg.validate();
  const auto world = synth::gen_world(cfg);
  const auto people = synth::gen_accounts(world, cfg);
  const auto logs = synth::gen_logs(world, people, cfg);

  const fs::path dir(out_dir);
  const json meta = {{"kind", "synthetic"}, {"config_hash", fnv1a_hex(cfg.to_json().dump())}, {"seed", cfg.seed}};
  std::string text = meta_line(meta);
  for (const auto& l : logs) {
    text += json{{"user", l.user}, {"program", l.program}, {"channel", l.channel}, {"t", l.t}, {"dt", l.dt}}
                .dump();
    text += '\n';
  }
  write_atomic(dir / "logs.jsonl", text);
  text = meta_line(meta);
  for (const auto& p : world.programs) {
    text += json{{"program", p.program},
                 {"channel", p.channel},
                 {"start", p.start},
                 {"end", p.end},
                 {"text", p.text}}
                .dump();
    text += '\n';
  }
  write_atomic(dir / "programs.jsonl", text);
  json man = synth::manifest(cfg, world, people);
  man["config_hash"] = meta.at("config_hash");
  write_atomic(dir / "manifest.json", man.dump(1) + "\n");

  EngineConfig engine;
  engine.seed = cfg.seed;
  engine.utc_offset = cfg.utc_offset;
  engine.t_split = cfg.t_split();
  engine.train_days = static_cast<double>(cfg.weeks_train * 7);
  engine.test_days = static_cast<double>(cfg.weeks_test * 7);
  json ej = engine.to_json();
  ej["paths"] = {{"logs", "logs.jsonl"}, {"programs", "programs.jsonl"}, {"work_dir", "work"}};
  write_atomic(dir / "engine.json", ej.dump(2) + "\n");

  out << json{{"logs", logs.size()},
              {"programs", world.programs.size()},
              {"accounts", people.size()},
              {"t_split", cfg.t_split()},
              {"out_dir", dir.string()}}
             .dump()
      << "\n";
  return kOk;
}

int cmd_prep(const EngineConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto d = load_data(cfg, err);
  json stats = dataset_stats(d);
  json doc = {{"_meta", provenance(cfg, "stats")}, {"stats", stats}};
  write_atomic(cfg.work_dir / "stats.json", doc.dump(2) + "\n");
  write_atomic(cfg.work_dir / "truth.jsonl", truth_jsonl(cfg, d));
  out << stats.dump(2) << "\n";
  return kOk;
}

int cmd_build(const EngineConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto d = load_data(cfg, err);
  const auto model = PreferenceModel::build(d.tensor, d.catalog, d.embeddings, cfg.mode);
  json vocab = d.vocabulary.to_json();
  vocab["_meta"] = provenance(cfg, "vocabulary");
  json prefs = model.to_json(d.tensor);
  prefs["_meta"] = provenance(cfg, "preferences");
  const auto vocab_path = cfg.work_dir / "vocab.json";
  const auto model_path = cfg.work_dir / ("preference-" + std::string(to_string(cfg.mode)) + ".json");
  write_atomic(vocab_path, vocab.dump() + "\n");
  write_atomic(model_path, prefs.dump() + "\n");
  out << json{{"vocabulary", vocab_path.string()},
              {"dimension", d.vocabulary.dimension()},
              {"model", model_path.string()},
              {"mode", std::string(to_string(cfg.mode))},
              {"users", model.user_count()},
              {"slot_profiles", model.slot_profile_count()}}
             .dump()
      << "\n";
  return kOk;
}

int cmd_recommend(const EngineConfig& cfg, const std::string& model_path, const std::string& out_path,
                  std::ostream& out, std::ostream& err) {
  const auto d = load_data(cfg, err);
  const auto model = load_or_build_model(cfg, d, model_path);
  const Recommender rec(d.tensor, model, d.candidates);
  const auto options = cfg.recommend_options();

  json meta = provenance(cfg, "recommendations");
  meta["method"] = std::string(to_string(cfg.method));
  meta["mode"] = std::string(to_string(cfg.mode));
  meta["k"] = cfg.k;
  meta["eta"] = cfg.eta;
  meta["xi"] = cfg.xi;
  std::string text = meta_line(meta);
  for (UserIdx u = 0; u < d.tensor.user_count(); ++u) {
    const auto list = rec.recommend(u, options);
    std::vector<std::string> items;
    std::vector<double> scores;
    for (const auto& e : list) {
      items.push_back(d.catalog.meta(d.candidates.program(e.item).program).program);
      scores.push_back(e.score);
    }
    text += json{{"user", d.tensor.user_name(u)}, {"items", items}, {"scores", scores}}.dump() + "\n";
  }
  const fs::path path =
      out_path.empty() ? cfg.work_dir / ("recs-" + std::string(to_string(cfg.method)) + ".jsonl")
                       : fs::path(out_path);
  write_atomic(path, text);
  out << json{{"recommendations", path.string()}, {"users", d.tensor.user_count()}}.dump() << "\n";
  return kOk;
}

int cmd_evaluate(const std::vector<std::string>& rec_paths, const std::string& truth_path,
                 const std::vector<std::size_t>& cutoffs, const std::string& out_path, std::ostream& out,
                 std::ostream& err) {
  const auto truth_lines = read_jsonl(truth_path, "truth");
  auto truth = user_items(truth_lines, "truth");
  for (auto& [user, items] : truth) std::sort(items.begin(), items.end());

  std::vector<MetricReport> reports;
  std::vector<std::vector<double>> per_user;  // nDCG at the first cutoff
  json results = json::array();
  for (const auto& path : rec_paths) {
    const auto rec_lines = read_jsonl(path, "recommendations");
    const auto recs = user_items(rec_lines, "recommendations");
    std::size_t unknown = 0;
    for (const auto& [user, items] : recs) unknown += truth.count(user) == 0;
    if (unknown > 0) err << "warning: " << path << ": " << unknown << " users without ground truth ignored\n";

    MetricAccumulator acc(cutoffs);
    std::vector<double> ndcg;
    const std::vector<std::string> none;
    for (const auto& [user, items] : truth) {
      const auto it = recs.find(user);
      const auto& list = it == recs.end() ? none : it->second;
      acc.add<std::string>(list, items);
      if (!items.empty()) ndcg.push_back(ndcg_at<std::string>(list, items, cutoffs.front()));
    }
    std::string name = rec_lines.meta.is_object() ? rec_lines.meta.value("method", path) : path;
    if (rec_lines.meta.is_object() && rec_lines.meta.contains("mode") && name != "behavior") {
      name += " (" + rec_lines.meta.at("mode").get<std::string>() + ")";
    }
    auto report = acc.report(name);
    json r = report.to_json();
    r["source"] = rec_lines.meta.is_null() ? json(path) : rec_lines.meta;
    if (!per_user.empty() && per_user.front().size() >= 2 && ndcg.size() == per_user.front().size()) {
      r["p_value_vs_first"] = paired_ttest(ndcg, per_user.front());
    }
    results.push_back(std::move(r));
    reports.push_back(std::move(report));
    per_user.push_back(std::move(ndcg));
  }
  out << format_table(reports);
  json meta = {{"kind", "metrics"}, {"truth", truth_lines.meta}};
  if (truth_lines.meta.is_object()) {
    meta["config_hash"] = truth_lines.meta.value("config_hash", "");
    meta["seed"] = truth_lines.meta.value("seed", json());
  }
  json doc = {{"_meta", meta}, {"results", results}};
  if (!out_path.empty()) write_atomic(out_path, doc.dump(2) + "\n");
  return kOk;
}

int cmd_bench(const EngineConfig& cfg, std::size_t sample, std::size_t reps, const std::string& out_path,
              std::ostream& out, std::ostream& err) {
  const auto d = load_data(cfg, err);
  const auto model = PreferenceModel::build(d.tensor, d.catalog, d.embeddings, cfg.mode);
  const Recommender rec(d.tensor, model, d.candidates);
  const auto options = cfg.recommend_options();
  const double fraction =
      std::min(1.0, static_cast<double>(sample) / static_cast<double>(d.tensor.user_count()));
  const auto users = sample_users(d.tensor.user_count(), fraction, cfg.seed);

  std::size_t evaluations = 0;
  for (UserIdx u : users) {
    TwoStageStats stats;
    rec.recommend(u, options, &stats);
    evaluations += stats.preference_evaluations;
  }
  volatile std::size_t sink = 0;
  const double spu = bench_seconds_per_user(users, reps, [&](UserIdx u) { sink = sink + rec.recommend(u, options).size(); });
  json doc = {{"_meta", provenance(cfg, "bench")},
              {"method", std::string(to_string(cfg.method))},
              {"mode", std::string(to_string(cfg.mode))},
              {"users", users.size()},
              {"repetitions", reps},
              {"seconds_per_user", spu},
              {"candidates", d.candidates.size()}};
  if (cfg.method == Method::two_stage) {
    doc["mean_preference_evaluations"] =
        static_cast<double>(evaluations) / static_cast<double>(users.size());
  }
  if (!out_path.empty()) write_atomic(out_path, doc.dump(2) + "\n");
  out << doc.dump() << "\n";
  return kOk;
}

int cmd_tune(const EngineConfig& cfg, double dev_fraction, const std::string& out_path, std::ostream& out,
             std::ostream& err) {
  if (!(dev_fraction > 0 && dev_fraction <= 1)) throw ConfigError("--dev-fraction must lie in (0, 1]");
  const auto d = load_data(cfg, err);
  const auto model = PreferenceModel::build(d.tensor, d.catalog, d.embeddings, cfg.mode);
  const auto users = sample_users(d.tensor.user_count(), dev_fraction, cfg.seed);
  const auto cases = rrf_cases(d, model, users);
  const auto etas = default_eta_grid();
  const auto xis = default_xi_grid();
  const double half[] = {0.5};
  const std::size_t cutoff = cfg.cutoffs.back();
  const auto plain = tune_rrf(cases, etas, half, cutoff);
  const auto weighted = tune_rrf(cases, etas, xis, cutoff);
  json doc = {{"_meta", provenance(cfg, "tuning")},
              {"mode", std::string(to_string(cfg.mode))},
              {"dev_users", users.size()},
              {"cutoff", cutoff},
              {"rrf", {{"eta", plain.eta}, {"recall", plain.recall}}},
              {"rrf_weighted", {{"eta", weighted.eta}, {"xi", weighted.xi}, {"recall", weighted.recall}}}};
  if (!out_path.empty()) write_atomic(out_path, doc.dump(2) + "\n");
  out << doc.dump(2) << "\n";
  return kOk;
}

int cmd_inspect(const EngineConfig& cfg, const std::string& user, std::ostream& out, std::ostream& err) {
  const auto d = load_data(cfg, err);
  const auto u = d.tensor.find_user(user);
  if (!u) throw DataError("user " + user + " is not in the evaluated user set");
  const auto bm = behavior_matrix(d.tensor, *u);
  json cells = json::array();
  for (const auto& e : bm.entries()) {
    cells.push_back({{"slot", e.slot}, {"channel", d.catalog.channel_name(e.channel)}, {"p", e.probability}});
  }
  const auto model = PreferenceModel::build(d.tensor, d.catalog, d.embeddings, cfg.mode);
  std::size_t slot_profiles = 0;
  for (int s = 1; s <= d.grid.slots(); ++s) slot_profiles += model.slot_profile(*u, SlotIndex(s)) != nullptr;
  json doc = {{"user", user},
              {"training_count", d.tensor.user_total(*u)},
              {"cells", d.tensor.cells(*u).size()},
              {"truth_size", d.truth[*u].size()},
              {"global_profile_nonzeros", model.global_profile(*u).nonzeros()},
              {"slot_profiles", slot_profiles},
              {"behavior", cells}};
  out << doc.dump(1) << "\n";
  return kOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Top-k recommender for linear TV programs", "tvrec"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  std::string synth_config, synth_out;
  std::uint64_t synth_seed = 0;
  std::size_t synth_accounts = 0;
  synth->add_option("--config", synth_config, "generator config JSON");
  synth->add_option("--out-dir", synth_out, "output directory")->required();
  auto* o_seed = synth->add_option("--seed", synth_seed);
  auto* o_accounts = synth->add_option("--accounts", synth_accounts);

  DataFlags prep_flags, build_flags, rec_flags, bench_flags, tune_flags, inspect_flags;
  RankFlags build_rank, rec_rank, bench_rank, tune_rank, inspect_rank;

  auto* prep = app.add_subcommand("prep", "preprocess logs; write statistics and ground truth");
  prep_flags.attach(prep);

  auto* build = app.add_subcommand("build", "fit the vocabulary and preference profiles");
  build_flags.attach(build);
  build_rank.attach(build, false);

  auto* recommend = app.add_subcommand("recommend", "top-k lists for every evaluated user");
  rec_flags.attach(recommend);
  rec_rank.attach(recommend, true);
  std::string model_path, rec_out;
  recommend->add_option("--model", model_path, "preference model written by build");
  recommend->add_option("--out", rec_out, "output JSONL");

  auto* evaluate = app.add_subcommand("evaluate", "score recommendation files against ground truth");
  std::vector<std::string> eval_recs;
  std::string eval_truth, eval_cutoffs = "10,20,30", eval_out;
  evaluate->add_option("--rec", eval_recs, "recommendation JSONL (repeatable)")->required();
  evaluate->add_option("--truth", eval_truth, "ground-truth JSONL")->required();
  evaluate->add_option("--cutoffs", eval_cutoffs, "comma-separated cutoffs");
  evaluate->add_option("--out", eval_out, "metrics JSON");

  auto* bench = app.add_subcommand("bench", "single-threaded inference time per user");
  bench_flags.attach(bench);
  bench_rank.attach(bench, true);
  std::size_t bench_sample = 1000, bench_reps = 5;
  std::string bench_out;
  bench->add_option("--users-sample", bench_sample);
  bench->add_option("--reps", bench_reps);
  bench->add_option("--out", bench_out);

  auto* tune = app.add_subcommand("tune", "grid-search fusion parameters on a development sample");
  tune_flags.attach(tune);
  tune_rank.attach(tune, false);
  double dev_fraction = 0.1;
  std::string tune_out;
  tune->add_option("--dev-fraction", dev_fraction);
  tune->add_option("--out", tune_out);

  auto* inspect = app.add_subcommand("inspect-user", "show a user's behavior distribution");
  inspect_flags.attach(inspect);
  inspect_rank.attach(inspect, false);
  std::string inspect_user;
  inspect->add_option("--user", inspect_user)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  auto engine = [](const DataFlags& f, const RankFlags& r) {
    auto c = f.load();
    r.apply(c);
    c.validate();
    return c;
  };

  if (*synth) {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> accounts;
    if (o_seed->count()) seed = synth_seed;
    if (o_accounts->count()) accounts = synth_accounts;
    return cmd_synth(synth_config, synth_out, seed, accounts, out);
  }
  if (*prep) return cmd_prep(engine(prep_flags, RankFlags{}), out, err);
  if (*build) return cmd_build(engine(build_flags, build_rank), out, err);
  if (*recommend) return cmd_recommend(engine(rec_flags, rec_rank), model_path, rec_out, out, err);
  if (*evaluate) return cmd_evaluate(eval_recs, eval_truth, parse_cutoffs(eval_cutoffs), eval_out, out, err);
  if (*bench) return cmd_bench(engine(bench_flags, bench_rank), bench_sample, bench_reps, bench_out, out, err);
  if (*tune) return cmd_tune(engine(tune_flags, tune_rank), dev_fraction, tune_out, out, err);
  if (*inspect) return cmd_inspect(engine(inspect_flags, inspect_rank), inspect_user, out, err);
  return kUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const InvariantError& e) {
    err << "invariant violated: " << e.what() << "\n";
    return kInvariant;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInvariant;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace tvrec::cli
