#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tvrec/datamodel.hpp"
#include "tvrec/types.hpp"

namespace tvrec {

// Ranking metrics with binary relevance. `truth` is a sorted, duplicate-free
// list of relevant ids; only the first n entries of `rec` matter.

template <class Id>
std::size_t hits_at(std::span<const Id> rec, std::span<const Id> truth, std::size_t n) {
  std::size_t hits = 0;
  const std::size_t depth = std::min(n, rec.size());
  for (std::size_t p = 0; p < depth; ++p) {
    if (std::binary_search(truth.begin(), truth.end(), rec[p])) ++hits;
  }
  return hits;
}

template <class Id>
double precision_at(std::span<const Id> rec, std::span<const Id> truth, std::size_t n) {
  if (n == 0) throw ConfigError("cutoff must be at least 1");
  return static_cast<double>(hits_at(rec, truth, n)) / static_cast<double>(n);
}

template <class Id>
double recall_at(std::span<const Id> rec, std::span<const Id> truth, std::size_t n) {
  if (n == 0) throw ConfigError("cutoff must be at least 1");
  if (truth.empty()) throw InvariantError("recall is undefined for an empty ground truth");
  return static_cast<double>(hits_at(rec, truth, n)) / static_cast<double>(truth.size());
}

/// DCG with a 1 / log2(position + 1) discount over the ideal DCG of
/// min(n, |truth|) hits.
template <class Id>
double ndcg_at(std::span<const Id> rec, std::span<const Id> truth, std::size_t n) {
  if (n == 0) throw ConfigError("cutoff must be at least 1");
  if (truth.empty()) throw InvariantError("nDCG is undefined for an empty ground truth");
  double dcg = 0.0;
  const std::size_t depth = std::min(n, rec.size());
  for (std::size_t p = 0; p < depth; ++p) {
    if (std::binary_search(truth.begin(), truth.end(), rec[p])) {
      dcg += 1.0 / std::log2(static_cast<double>(p) + 2.0);
    }
  }
  double ideal = 0.0;
  const std::size_t best = std::min(n, truth.size());
  for (std::size_t p = 0; p < best; ++p) ideal += 1.0 / std::log2(static_cast<double>(p) + 2.0);
  return dcg / ideal;
}

/// Mean metrics of one method; the layout of one row of a results table.
struct MetricReport {
  std::string method;
  std::vector<std::size_t> cutoffs;
  std::vector<double> ndcg;
  std::vector<double> precision;
  std::vector<double> recall;
  std::size_t users = 0;
  std::size_t excluded = 0;  // users skipped for an empty ground truth
  std::optional<double> seconds_per_user;

  double ndcg_at_cutoff(std::size_t n) const;
  nlohmann::json to_json() const;
};

/// Unweighted per-user means of nDCG, precision and recall.
class MetricAccumulator {
 public:
  explicit MetricAccumulator(std::vector<std::size_t> cutoffs = {10, 20, 30});

  template <class Id>
  void add(std::span<const Id> rec, std::span<const Id> truth) {
    if (truth.empty()) {
      ++excluded_;
      return;
    }
    for (std::size_t c = 0; c < cutoffs_.size(); ++c) {
      ndcg_[c] += ndcg_at(rec, truth, cutoffs_[c]);
      precision_[c] += precision_at(rec, truth, cutoffs_[c]);
      recall_[c] += recall_at(rec, truth, cutoffs_[c]);
    }
    ++users_;
  }

  MetricReport report(std::string method) const;

 private:
  std::vector<std::size_t> cutoffs_;
  std::vector<double> ndcg_, precision_, recall_;
  std::size_t users_ = 0;
  std::size_t excluded_ = 0;
};

/// Plain-text table: one row per report, nDCG/Prec./Recall per cutoff,
/// values in percent.
std::string format_table(std::span<const MetricReport> reports);

/**
 * Two-sided paired t-test p-value on a[i] - b[i]. When the differences have
 * zero variance the p-value is 1 for a zero mean difference and 0 otherwise.
 * Throws ConfigError on a length mismatch or fewer than two pairs.
 */
double paired_ttest(std::span<const double> a, std::span<const double> b);

/**
 * Single-threaded wall-clock seconds per user: runs `infer` once per user in
 * `users`, `repetitions` times, and returns the median repetition divided by
 * the user count. Throws ConfigError on an empty sample.
 */
double bench_seconds_per_user(std::span<const UserIdx> users, std::size_t repetitions,
                              const std::function<void(UserIdx)>& infer);

}  // namespace tvrec
