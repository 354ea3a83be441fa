#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tlp/numeric.hpp"
#include "tlp/types.hpp"

namespace tlp {

/// One timestamped interaction. Edge features live in the owning stream.
struct Edge {
  NodePair pair;
  Timestamp timestamp = 0.0;
  std::optional<double> weight;
};

/// Convenience input row carrying its own feature vector; used by callers
/// that assemble streams edge by edge.
struct EdgeRecord {
  std::uint32_t source = 0;
  std::uint32_t destination = 0;
  Timestamp timestamp = 0.0;
  std::optional<double> weight;
  std::vector<double> features;
};

/// Row-major feature block, `values.size() == edge_count * dim`.
struct FeatureMatrix {
  std::size_t dim = 0;
  std::vector<double> values;
};

/// Chronologically ordered, immutable edge stream.
class EdgeStream {
 public:
  EdgeStream() = default;

  [[nodiscard]] std::span<const Edge> edges() const { return edges_; }
  [[nodiscard]] const Edge& operator[](std::size_t i) const { return edges_[i]; }
  [[nodiscard]] std::size_t size() const { return edges_.size(); }
  [[nodiscard]] bool empty() const { return edges_.empty(); }
  [[nodiscard]] std::size_t node_count() const { return node_count_; }
  [[nodiscard]] bool directed() const { return directed_; }
  [[nodiscard]] std::size_t feature_dim() const { return features_.dim; }
  [[nodiscard]] bool has_features() const { return !features_.values.empty(); }
  [[nodiscard]] const std::string& name() const { return name_; }

  [[nodiscard]] std::span<const double> features(std::size_t i) const {
    if (!has_features()) return {};
    return std::span<const double>(features_.values)
        .subspan(i * features_.dim, features_.dim);
  }

  [[nodiscard]] Timestamp first_timestamp() const { return edges_.front().timestamp; }
  [[nodiscard]] Timestamp last_timestamp() const { return edges_.back().timestamp; }

  friend EdgeStream build_stream(std::vector<Edge> edges, bool directed,
                                 FeatureMatrix features, std::string name);

 private:
  std::vector<Edge> edges_;
  FeatureMatrix features_;
  std::size_t node_count_ = 0;
  bool directed_ = true;
  std::string name_;
};

/// Validates, canonicalizes (undirected mode) and stable-sorts `edges` by
/// timestamp. `features`, when non-empty, is permuted alongside the edges.
/// A feature_dim with no values declares the dimension without storing it.
inline EdgeStream build_stream(std::vector<Edge> edges, bool directed,
                               FeatureMatrix features = {},
                               std::string name = {}) {
  if (edges.empty()) throw Error("build_stream: empty edge list");
  const std::size_t n = edges.size();
  if (!features.values.empty() && features.values.size() != n * features.dim) {
    throw Error("build_stream: feature block has " +
                std::to_string(features.values.size()) + " values, expected " +
                std::to_string(n * features.dim));
  }

  std::uint32_t max_id = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Edge& e = edges[i];
    if (!(e.timestamp >= 0.0) || !std::isfinite(e.timestamp)) {
      throw Error("build_stream: edge " + std::to_string(i) +
                  " has negative or non-finite timestamp");
    }
    if (e.timestamp == 0.0) e.timestamp = 0.0;  // fold -0.0
    e.pair = e.pair.canonical(directed);
    max_id = std::max({max_id, e.pair.source.value, e.pair.destination.value});
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return edges[a].timestamp < edges[b].timestamp;
  });

  EdgeStream s;
  s.edges_.reserve(n);
  for (std::size_t i : order) s.edges_.push_back(edges[i]);
  s.features_.dim = features.dim;
  if (!features.values.empty()) {
    s.features_.values.resize(features.values.size());
    for (std::size_t k = 0; k < n; ++k) {
      std::copy_n(features.values.begin() + static_cast<std::ptrdiff_t>(order[k] * features.dim),
                  features.dim,
                  s.features_.values.begin() + static_cast<std::ptrdiff_t>(k * features.dim));
    }
  }
  s.node_count_ = std::size_t{max_id} + 1;
  s.directed_ = directed;
  s.name_ = std::move(name);
  return s;
}

inline EdgeStream build_stream(std::span<const EdgeRecord> records, bool directed,
                               std::string name = {}) {
  if (records.empty()) throw Error("build_stream: empty edge list");
  const std::size_t dim = records.front().features.size();
  std::vector<Edge> edges;
  edges.reserve(records.size());
  FeatureMatrix features{dim, {}};
  features.values.reserve(records.size() * dim);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.features.size() != dim) {
      throw Error("build_stream: edge " + std::to_string(i) + " has " +
                  std::to_string(r.features.size()) + " features, expected " +
                  std::to_string(dim));
    }
    edges.push_back(Edge{NodePair{r.source, r.destination}, r.timestamp, r.weight});
    features.values.insert(features.values.end(), r.features.begin(), r.features.end());
  }
  return build_stream(std::move(edges), directed, std::move(features), std::move(name));
}

inline EdgeStream build_stream(std::initializer_list<EdgeRecord> records,
                               bool directed = true) {
  return build_stream(std::span<const EdgeRecord>(records.begin(), records.size()),
                      directed);
}

// ---------------------------------------------------------------------------
// Chronological split

struct SplitRatios {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
};

/// Index boundaries of a train/val/test partition. Edges [0, train_end) are
/// train, [train_end, val_end) validation, [val_end, total) test.
struct ChronoSplit {
  std::size_t train_end = 0;
  std::size_t val_end = 0;
  std::size_t total = 0;
  Timestamp t_split = 0.0;
  SplitRatios ratios;

  [[nodiscard]] std::size_t train_size() const { return train_end; }
  [[nodiscard]] std::size_t val_size() const { return val_end - train_end; }
  [[nodiscard]] std::size_t test_size() const { return total - val_end; }
};

namespace detail {
inline std::size_t round_half_up(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5));
}
}  // namespace detail

/// Splits by edge index with round-half-up boundaries. `t_split` is the
/// timestamp of the first test edge (the last edge's timestamp when the test
/// partition is empty).
inline ChronoSplit chronological_split(const EdgeStream& stream, SplitRatios ratios) {
  for (double r : {ratios.train, ratios.val, ratios.test}) {
    if (!std::isfinite(r) || r < 0.0) throw Error("split ratios must be non-negative");
  }
  if (std::fabs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
    throw Error("split ratios must sum to 1");
  }
  const std::size_t n = stream.size();
  if (n < 3) throw Error("chronological_split: need at least 3 edges");

  ChronoSplit split;
  split.total = n;
  split.ratios = ratios;
  split.train_end = std::min(n, detail::round_half_up(ratios.train * static_cast<double>(n)));
  split.val_end = std::min(
      n, detail::round_half_up((ratios.train + ratios.val) * static_cast<double>(n)));
  split.val_end = std::max(split.val_end, split.train_end);
  split.t_split = split.val_end < n ? stream[split.val_end].timestamp : stream.last_timestamp();
  return split;
}

// ---------------------------------------------------------------------------
// Edge sets

/// Which partitions count as "the past" at test time.
enum class HistoryMode { train, train_and_val };

/// Distinct node pairs per partition.
struct EdgeSets {
  PairSet train_pairs;
  PairSet val_pairs;
  PairSet test_pairs;
  PairSet all_pairs;

  /// E_train as seen by test-time consumers under `mode`.
  [[nodiscard]] PairSet history_pairs(HistoryMode mode) const {
    if (mode == HistoryMode::train) return train_pairs;
    PairSet h = train_pairs;
    h.insert(val_pairs.begin(), val_pairs.end());
    return h;
  }
};

inline EdgeSets edge_sets(const EdgeStream& stream, const ChronoSplit& split) {
  if (split.total != stream.size() || split.val_end > split.total ||
      split.train_end > split.val_end) {
    throw Error("edge_sets: split does not match stream");
  }
  EdgeSets sets;
  const auto edges = stream.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const NodePair p = edges[i].pair;
    if (i < split.train_end) {
      sets.train_pairs.insert(p);
    } else if (i < split.val_end) {
      sets.val_pairs.insert(p);
    } else {
      sets.test_pairs.insert(p);
    }
    sets.all_pairs.insert(p);
  }
  return sets;
}

inline std::size_t intersection_size(const PairSet& a, const PairSet& b) {
  const PairSet& small = a.size() <= b.size() ? a : b;
  const PairSet& large = a.size() <= b.size() ? b : a;
  std::size_t n = 0;
  for (const auto& p : small) n += large.contains(p) ? 1 : 0;
  return n;
}

/// |a \ b|
inline std::size_t difference_size(const PairSet& a, const PairSet& b) {
  return a.size() - intersection_size(a, b);
}

// ---------------------------------------------------------------------------
// Difficulty indices

struct DifficultyIndices {
  double novelty = 0.0;
  double reoccurrence = 0.0;
  double surprise = 0.0;
};

/// Mean over distinct timestamps of the fraction of that timestamp's distinct
/// pairs that never occurred at an earlier timestamp.
inline double novelty_index(const EdgeStream& stream) {
  if (stream.empty()) throw Error("novelty_index: empty stream");
  const auto edges = stream.edges();
  PairSet seen;
  PairSet current;
  std::vector<NodePair> fresh;
  CompensatedSum sum;
  std::size_t timestamps = 0;

  std::size_t i = 0;
  while (i < edges.size()) {
    const Timestamp t = edges[i].timestamp;
    current.clear();
    fresh.clear();
    for (; i < edges.size() && edges[i].timestamp == t; ++i) {
      const NodePair p = edges[i].pair;
      if (current.insert(p).second && !seen.contains(p)) fresh.push_back(p);
    }
    sum += static_cast<double>(fresh.size()) / static_cast<double>(current.size());
    ++timestamps;
    seen.insert(fresh.begin(), fresh.end());
  }
  return sum.value() / static_cast<double>(timestamps);
}

/// |E_train ∩ E_test| / |E_train|
inline double reoccurrence_index(const PairSet& train, const PairSet& test) {
  if (train.empty()) throw Error("reoccurrence_index: no train pairs");
  return static_cast<double>(intersection_size(train, test)) /
         static_cast<double>(train.size());
}

/// |E_test \ E_train| / |E_test|
inline double surprise_index(const PairSet& train, const PairSet& test) {
  if (test.empty()) throw Error("surprise_index: no test pairs");
  return static_cast<double>(difference_size(test, train)) /
         static_cast<double>(test.size());
}

inline double reoccurrence_index(const EdgeSets& sets,
                                 HistoryMode mode = HistoryMode::train) {
  if (mode == HistoryMode::train) return reoccurrence_index(sets.train_pairs, sets.test_pairs);
  return reoccurrence_index(sets.history_pairs(mode), sets.test_pairs);
}

inline double surprise_index(const EdgeSets& sets, HistoryMode mode = HistoryMode::train) {
  if (mode == HistoryMode::train) return surprise_index(sets.train_pairs, sets.test_pairs);
  return surprise_index(sets.history_pairs(mode), sets.test_pairs);
}

inline DifficultyIndices difficulty_indices(const EdgeStream& stream, const EdgeSets& sets,
                                            HistoryMode mode = HistoryMode::train) {
  return {novelty_index(stream), reoccurrence_index(sets, mode), surprise_index(sets, mode)};
}

}  // namespace tlp
