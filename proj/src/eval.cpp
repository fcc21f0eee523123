#include "tvrec/eval.hpp"

#include <chrono>
#include <cstdio>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

namespace tvrec {

double MetricReport::ndcg_at_cutoff(std::size_t n) const {
  for (std::size_t c = 0; c < cutoffs.size(); ++c) {
    if (cutoffs[c] == n) return ndcg[c];
  }
  throw ConfigError("cutoff " + std::to_string(n) + " not in report");
}

nlohmann::json MetricReport::to_json() const {
  nlohmann::json metrics = nlohmann::json::object();
  for (std::size_t c = 0; c < cutoffs.size(); ++c) {
    metrics[std::to_string(cutoffs[c])] = {
        {"ndcg", ndcg[c]}, {"precision", precision[c]}, {"recall", recall[c]}};
  }
  nlohmann::json j = {{"method", method}, {"users", users}, {"excluded_users", excluded},
                      {"cutoffs", cutoffs}, {"metrics", std::move(metrics)}};
  j["seconds_per_user"] = seconds_per_user ? nlohmann::json(*seconds_per_user) : nlohmann::json();
  return j;
}

MetricAccumulator::MetricAccumulator(std::vector<std::size_t> cutoffs)
    : cutoffs_(std::move(cutoffs)),
      ndcg_(cutoffs_.size(), 0.0),
      precision_(cutoffs_.size(), 0.0),
      recall_(cutoffs_.size(), 0.0) {
  if (cutoffs_.empty()) throw ConfigError("at least one cutoff is required");
  for (auto n : cutoffs_) {
    if (n == 0) throw ConfigError("cutoff must be at least 1");
  }
}

MetricReport MetricAccumulator::report(std::string method) const {
  MetricReport r;
  r.method = std::move(method);
  r.cutoffs = cutoffs_;
  r.users = users_;
  r.excluded = excluded_;
  const double n = users_ == 0 ? 1.0 : static_cast<double>(users_);
  for (std::size_t c = 0; c < cutoffs_.size(); ++c) {
    r.ndcg.push_back(ndcg_[c] / n);
    r.precision.push_back(precision_[c] / n);
    r.recall.push_back(recall_[c] / n);
  }
  return r;
}

std::string format_table(std::span<const MetricReport> reports) {
  if (reports.empty()) return {};
  std::string out;
  char buf[64];
  std::size_t width = 6;
  for (const auto& r : reports) width = std::max(width, r.method.size());
  out += std::string(width, ' ');
  for (auto n : reports.front().cutoffs) {
    std::snprintf(buf, sizeof buf, " | N=%-22zu", n);
    out += buf;
  }
  out += " | s/user\n";
  out += std::string(width, ' ');
  for (std::size_t c = 0; c < reports.front().cutoffs.size(); ++c) out += " |  nDCG   Prec.  Recall ";
  out += " |\n";
  for (const auto& r : reports) {
    out += r.method + std::string(width - r.method.size(), ' ');
    for (std::size_t c = 0; c < r.cutoffs.size(); ++c) {
      std::snprintf(buf, sizeof buf, " | %6.2f %6.2f %6.2f ", 100 * r.ndcg[c],
                    100 * r.precision[c], 100 * r.recall[c]);
      out += buf;
    }
    if (r.seconds_per_user) {
      std::snprintf(buf, sizeof buf, " | %.6f\n", *r.seconds_per_user);
    } else {
      std::snprintf(buf, sizeof buf, " | -\n");
    }
    out += buf;
  }
  return out;
}

double paired_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("paired t-test needs equally long samples");
  if (a.size() < 2) throw ConfigError("paired t-test needs at least two pairs");
  const double n = static_cast<double>(a.size());
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : d) ss += (x - mean) * (x - mean);
  const double var = ss / (n - 1.0);
  if (var <= 0.0) return mean == 0.0 ? 1.0 : 0.0;
  const double t = mean / std::sqrt(var / n);
  boost::math::students_t dist(n - 1.0);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

double bench_seconds_per_user(std::span<const UserIdx> users, std::size_t repetitions,
                              const std::function<void(UserIdx)>& infer) {
  if (users.empty()) throw ConfigError("benchmark user sample is empty");
  if (repetitions == 0) throw ConfigError("benchmark needs at least one repetition");
  std::vector<double> seconds;
  seconds.reserve(repetitions);
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto begin = std::chrono::steady_clock::now();
    for (UserIdx u : users) infer(u);
    const auto end = std::chrono::steady_clock::now();
    seconds.push_back(std::chrono::duration<double>(end - begin).count());
  }
  std::sort(seconds.begin(), seconds.end());
  const std::size_t m = seconds.size();
  const double median = m % 2 == 1 ? seconds[m / 2] : 0.5 * (seconds[m / 2 - 1] + seconds[m / 2]);
  return median / static_cast<double>(users.size());
}

}  // namespace tvrec
