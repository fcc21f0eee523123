#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "tvrec/datamodel.hpp"
#include "tvrec/eval.hpp"
#include "tvrec/preference.hpp"
#include "tvrec/ranker.hpp"
#include "tvrec/textenc.hpp"
#include "tvrec/timegrid.hpp"

namespace tvrec {

struct PrepOptions {
  TimeGrid grid;
  Duration min_duration = 900;
  SplitSpec split;
  bool binarize = false;
  std::string tokenizer = "unicode";
  EncoderOptions encoder;
};

/// Everything inference needs, built once from raw logs and metadata.
struct PreparedData {
  TimeGrid grid;
  Catalog catalog;
  Split split;
  InteractionTensor tensor;
  Vocabulary vocabulary;
  ItemEmbeddings embeddings;
  CandidateSet candidates;
  std::vector<std::vector<std::uint32_t>> truth;  // per user, sorted candidate positions
  std::size_t raw_logs = 0;
  std::size_t kept_logs = 0;
};

/// Flip filter, split, tensor, tf-idf over I_train and I_test, candidates
/// and ground truth.
PreparedData prepare(const std::vector<ViewingLog>& logs, std::vector<ProgramMeta> metas,
                     const PrepOptions& options);

/// Dataset statistics in the layout of a data-statistics table.
nlohmann::json dataset_stats(const PreparedData& data);

/// Mean metrics of one method over `users` (all tensor users when empty).
MetricReport evaluate_method(const PreparedData& data, const Recommender& recommender,
                             const RecommendOptions& options, const std::vector<std::size_t>& cutoffs,
                             std::span<const UserIdx> users = {});

/// Development cases (both full rankings and truth) for RRF tuning.
std::vector<RrfCase> rrf_cases(const PreparedData& data, const PreferenceModel& model,
                               std::span<const UserIdx> users);

}  // namespace tvrec
