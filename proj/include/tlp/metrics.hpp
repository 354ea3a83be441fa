#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tlp/numeric.hpp"
#include "tlp/types.hpp"

namespace tlp {

struct EvalRecord {
  bool positive = false;
  double score = 0.0;
  bool is_fallback = false;
};

struct ThresholdMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricReport {
  double au_roc = 0.0;
  double ap = 0.0;
  double au_pr = 0.0;
  ThresholdMetrics at_threshold;
  double threshold = 0.5;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

namespace detail {

inline void check_scores(std::span<const EvalRecord> records) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double s = records[i].score;
    if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
      throw Error("record " + std::to_string(i) + " has score outside [0,1]");
    }
  }
}

/// Tie group on the descending-score sweep.
struct ScoreGroup {
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

inline std::vector<ScoreGroup> descending_groups(std::span<const EvalRecord> records) {
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].score > records[b].score;
  });
  std::vector<ScoreGroup> groups;
  for (std::size_t k = 0; k < order.size();) {
    const double s = records[order[k]].score;
    ScoreGroup g;
    for (; k < order.size() && records[order[k]].score == s; ++k) {
      (records[order[k]].positive ? g.positives : g.negatives) += 1;
    }
    groups.push_back(g);
  }
  return groups;
}

inline std::size_t count_positives(std::span<const EvalRecord> records) {
  return static_cast<std::size_t>(std::count_if(
      records.begin(), records.end(), [](const EvalRecord& r) { return r.positive; }));
}

}  // namespace detail

/// Probability that a random positive outscores a random negative, ties
/// counted half. Computed from tie-averaged ranks in exact integer
/// arithmetic (doubled ranks).
inline double au_roc(std::span<const EvalRecord> records) {
  detail::check_scores(records);
  const std::size_t n_pos = detail::count_positives(records);
  const std::size_t n_neg = records.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw Error("au_roc: needs both positive and negative records");

  // Ascending sweep; a group occupying ranks [r+1, r+m] has doubled average
  // rank 2r + m + 1.
  const auto groups = detail::descending_groups(records);
  unsigned __int128 doubled_rank_sum = 0;
  std::uint64_t below = 0;
  for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
    const std::uint64_t m = it->positives + it->negatives;
    doubled_rank_sum += static_cast<unsigned __int128>(2 * below + m + 1) * it->positives;
    below += m;
  }
  // 2*U = doubled_rank_sum - n_pos*(n_pos+1)
  const unsigned __int128 doubled_u =
      doubled_rank_sum - static_cast<unsigned __int128>(n_pos) * (n_pos + 1);
  return static_cast<double>(doubled_u) /
         (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

/// Step-interpolated area under the precision-recall sweep:
/// sum over tie groups of (recall gain) x (precision at the group's end).
inline double average_precision(std::span<const EvalRecord> records) {
  detail::check_scores(records);
  const std::size_t n_pos = detail::count_positives(records);
  if (n_pos == 0) throw Error("average_precision: no positive records");
  CompensatedSum ap;
  std::size_t tp = 0;
  std::size_t seen = 0;
  for (const auto& g : detail::descending_groups(records)) {
    tp += g.positives;
    seen += g.positives + g.negatives;
    if (g.positives == 0) continue;
    ap += (static_cast<double>(g.positives) / static_cast<double>(n_pos)) *
          (static_cast<double>(tp) / static_cast<double>(seen));
  }
  return ap.value();
}

/// Trapezoidal area under the precision-recall curve anchored at
/// (recall 0, precision 1).
inline double au_pr(std::span<const EvalRecord> records) {
  detail::check_scores(records);
  const std::size_t n_pos = detail::count_positives(records);
  if (n_pos == 0) throw Error("au_pr: no positive records");
  CompensatedSum area;
  double prev_recall = 0.0;
  double prev_precision = 1.0;
  std::size_t tp = 0;
  std::size_t seen = 0;
  for (const auto& g : detail::descending_groups(records)) {
    tp += g.positives;
    seen += g.positives + g.negatives;
    const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(seen);
    area += (recall - prev_recall) * (precision + prev_precision) / 2.0;
    prev_recall = recall;
    prev_precision = precision;
  }
  return area.value();
}

/// Fixed-threshold metrics; a record is predicted positive iff score >= threshold.
inline ThresholdMetrics threshold_metrics(std::span<const EvalRecord> records,
                                          double threshold = 0.5) {
  if (records.empty()) throw Error("threshold_metrics: no records");
  detail::check_scores(records);
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (const auto& r : records) {
    const bool predicted = r.score >= threshold;
    if (r.positive) {
      (predicted ? tp : fn) += 1;
    } else {
      (predicted ? fp : tn) += 1;
    }
  }
  ThresholdMetrics m;
  m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(records.size());
  m.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  m.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  m.f1 = m.precision + m.recall == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

inline MetricReport metric_report(std::span<const EvalRecord> records, double threshold = 0.5) {
  MetricReport r;
  r.au_roc = au_roc(records);
  r.ap = average_precision(records);
  r.au_pr = au_pr(records);
  r.at_threshold = threshold_metrics(records, threshold);
  r.threshold = threshold;
  r.positives = detail::count_positives(records);
  r.negatives = records.size() - r.positives;
  return r;
}

}  // namespace tlp
