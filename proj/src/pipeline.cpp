#include "tvrec/pipeline.hpp"

#include <algorithm>

#include "tvrec/behavior.hpp"

namespace tvrec {

PreparedData prepare(const std::vector<ViewingLog>& logs, std::vector<ProgramMeta> metas,
                     const PrepOptions& options) {
  PreparedData d;
  d.grid = options.grid;
  d.raw_logs = logs.size();
  const auto kept = filter_flips(logs, options.min_duration);
  d.kept_logs = kept.size();
  d.split = split(kept, metas, options.split);
  d.catalog = Catalog(std::move(metas));
  d.tensor = build_tensor(d.split, d.catalog, d.grid);
  if (options.binarize) d.tensor = d.tensor.binarized();
  if (d.tensor.user_count() == 0) throw DataError("no user appears in both training and test logs");

  const auto tokenizer = make_tokenizer(options.tokenizer);
  std::vector<std::string> corpus;
  std::vector<ProgramIdx> encoded;
  for (const auto* ids : {&d.split.train_items, &d.split.test_items}) {
    for (const auto& id : *ids) {
      const auto p = d.catalog.find(id);
      if (!p) throw DataError("unknown program " + id);
      corpus.push_back(d.catalog.meta(*p).text);
      encoded.push_back(*p);
    }
  }
  d.vocabulary = Vocabulary::fit(corpus, *tokenizer, options.encoder);
  d.embeddings.assign(d.catalog.size(), std::nullopt);
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    d.embeddings[encoded[i]] = d.vocabulary.encode(corpus[i], *tokenizer);
  }

  d.candidates = CandidateSet(schedule(d.catalog, d.split.test_items, d.grid), d.embeddings,
                              d.grid.slots());
  std::vector<std::uint32_t> position(d.catalog.size(), UINT32_MAX);
  for (std::uint32_t i = 0; i < d.candidates.size(); ++i) position[d.candidates.program(i).program] = i;
  const auto truth = ground_truth_all(d.split, d.tensor);
  d.truth.resize(truth.size());
  for (std::size_t u = 0; u < truth.size(); ++u) {
    for (const auto& id : truth[u]) d.truth[u].push_back(position[*d.catalog.find(id)]);
    std::sort(d.truth[u].begin(), d.truth[u].end());
  }
  return d;
}

nlohmann::json dataset_stats(const PreparedData& d) {
  double truth_sum = 0.0;
  for (const auto& t : d.truth) truth_sum += static_cast<double>(t.size());
  std::vector<char> channel_seen(d.catalog.channel_count(), 0);
  for (const auto& id : d.split.train_items) channel_seen[d.catalog.channel_of(*d.catalog.find(id))] = 1;
  for (const auto& id : d.split.test_items) channel_seen[d.catalog.channel_of(*d.catalog.find(id))] = 1;
  return {{"raw_logs", d.raw_logs},
          {"filtered_logs", d.kept_logs},
          {"D_train", d.split.train.size()},
          {"D_test", d.split.test.size()},
          {"I_train", d.split.train_items.size()},
          {"C", std::count(channel_seen.begin(), channel_seen.end(), 1)},
          {"U", d.tensor.user_count()},
          {"I_test", d.split.test_items.size()},
          {"mean_truth_size", d.truth.empty() ? 0.0 : truth_sum / static_cast<double>(d.truth.size())},
          {"vocabulary", d.vocabulary.dimension()},
          {"tensor_nonzeros", d.tensor.nonzeros()}};
}

MetricReport evaluate_method(const PreparedData& data, const Recommender& recommender,
                             const RecommendOptions& options, const std::vector<std::size_t>& cutoffs,
                             std::span<const UserIdx> users) {
  MetricAccumulator acc(cutoffs);
  std::vector<std::uint32_t> items;
  auto one = [&](UserIdx u) {
    const auto rec = recommender.recommend(u, options);
    items.clear();
    for (const auto& e : rec) items.push_back(e.item);
    acc.add<std::uint32_t>(items, data.truth[u]);
  };
  if (users.empty()) {
    for (UserIdx u = 0; u < data.tensor.user_count(); ++u) one(u);
  } else {
    for (UserIdx u : users) one(u);
  }
  return acc.report(std::string(to_string(options.method)));
}

std::vector<RrfCase> rrf_cases(const PreparedData& data, const PreferenceModel& model,
                               std::span<const UserIdx> users) {
  std::vector<RrfCase> cases;
  cases.reserve(users.size());
  for (UserIdx u : users) {
    cases.push_back({rank_behavior(behavior_matrix(data.tensor, u), data.candidates),
                     rank_preference(model, u, data.candidates), data.truth[u]});
  }
  return cases;
}

}  // namespace tvrec
