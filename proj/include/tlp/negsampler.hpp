#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tlp/stream.hpp"

namespace tlp {

enum class NegativeStrategy { random, historical, inductive };

/// Scope of the accept-reject collision check for random negatives.
enum class CollisionScope { batch, global };

inline const char* to_string(NegativeStrategy s) {
  switch (s) {
    case NegativeStrategy::random: return "rnd";
    case NegativeStrategy::historical: return "hist";
    case NegativeStrategy::inductive: return "induc";
  }
  return "?";
}

inline NegativeStrategy parse_strategy(std::string_view s) {
  if (s == "rnd" || s == "random") return NegativeStrategy::random;
  if (s == "hist" || s == "historical") return NegativeStrategy::historical;
  if (s == "induc" || s == "inductive") return NegativeStrategy::inductive;
  throw Error("unknown negative sampling strategy '" + std::string(s) + "'");
}

struct SamplerConfig {
  NegativeStrategy strategy = NegativeStrategy::random;
  std::uint64_t seed = 0;
  std::size_t batch_size = 200;
  CollisionScope collision = CollisionScope::batch;
};

// ---------------------------------------------------------------------------
// Randomness

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Sub-seed for one batch, so any batch can be regenerated in isolation.
inline std::uint64_t batch_seed(std::uint64_t seed, std::uint64_t batch_index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(batch_index + 0x632be59bd9b4e019ULL));
}

/// mt19937_64 output is fixed by the standard; the bounded draw below is ours
/// so streams are identical across standard library implementations.
class SamplerRng {
 public:
  explicit SamplerRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [0, bound), bound > 0 (Lemire's multiply-shift with
  /// rejection).
  std::uint64_t below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(engine_()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Pools

/// Distinct pairs in a fixed order with O(1) membership.
class PairPool {
 public:
  PairPool() = default;

  /// Sorted so that sampling does not depend on hash-table iteration order.
  static PairPool from_set(const PairSet& set) {
    PairPool pool;
    pool.items_.assign(set.begin(), set.end());
    std::sort(pool.items_.begin(), pool.items_.end());
    pool.index_.reserve(pool.items_.size());
    for (std::size_t i = 0; i < pool.items_.size(); ++i) pool.index_.emplace(pool.items_[i], i);
    return pool;
  }

  bool insert(const NodePair& p) {
    auto [it, inserted] = index_.try_emplace(p, items_.size());
    if (inserted) items_.push_back(p);
    return inserted;
  }

  [[nodiscard]] bool contains(const NodePair& p) const { return index_.contains(p); }
  [[nodiscard]] std::size_t size() const { return items_.size(); }
  [[nodiscard]] bool empty() const { return items_.empty(); }
  [[nodiscard]] const NodePair& operator[](std::size_t i) const { return items_[i]; }
  [[nodiscard]] std::span<const NodePair> items() const { return items_; }

 private:
  std::vector<NodePair> items_;
  std::unordered_map<NodePair, std::size_t, NodePairHash> index_;
};

/// Draws up to `want` distinct entries of `pool` uniformly without
/// replacement, skipping entries for which `excluded` holds. Returns fewer
/// only when the eligible set is smaller than `want`.
template <typename Excluded>
std::vector<NodePair> draw_without_replacement(const PairPool& pool, std::size_t want,
                                               Excluded&& excluded, SamplerRng& rng) {
  std::vector<NodePair> out;
  if (want == 0 || pool.empty()) return out;
  out.reserve(want);
  std::unordered_set<std::size_t> taken;

  // Rejection phase: cheap when the excluded fraction is small.
  std::size_t budget = 4 * want + 32;
  while (out.size() < want && budget-- > 0) {
    const auto i = static_cast<std::size_t>(rng.below(pool.size()));
    if (taken.contains(i) || excluded(pool[i])) continue;
    taken.insert(i);
    out.push_back(pool[i]);
  }
  if (out.size() == want) return out;

  // Exact phase over the remaining eligible entries.
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!taken.contains(i) && !excluded(pool[i])) eligible.push_back(i);
  }
  const std::size_t extra = std::min(want - out.size(), eligible.size());
  for (std::size_t k = 0; k < extra; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng.below(eligible.size() - k));
    std::swap(eligible[k], eligible[j]);
    out.push_back(pool[eligible[k]]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Samplers

struct Negative {
  NodePair pair;
  Timestamp timestamp = 0.0;
  bool is_fallback = false;  // drawn by random destination replacement
};

/// Negatives aligned 1:1 with a batch of positives.
struct NegativeBatch {
  std::vector<Negative> negatives;
  std::size_t fallback_count = 0;
};

/// Where random negatives may land.
struct SamplingSpace {
  std::size_t node_count = 0;
  bool directed = true;
};

inline PairSet pair_set_of(std::span<const Edge> edges) {
  PairSet s;
  s.reserve(edges.size());
  for (const Edge& e : edges) s.insert(e.pair);
  return s;
}

namespace detail {

inline constexpr std::size_t kDrawsPerPositive = 1000;

// Appends random negatives for positives[from..) into `out`.
template <typename Excluded>
void fill_random(std::span<const Edge> positives, std::size_t from, const SamplingSpace& space,
                 Excluded&& excluded, SamplerRng& rng, NegativeBatch& out) {
  if (from >= positives.size()) return;
  if (space.node_count < 2) throw Error("random negative sampling needs at least 2 nodes");
  std::size_t budget = kDrawsPerPositive * positives.size();
  for (std::size_t i = from; i < positives.size(); ++i) {
    const Edge& pos = positives[i];
    const NodeId source = pos.pair.source;
    while (true) {
      if (budget == 0) {
        throw Error("random negative sampling exhausted " +
                    std::to_string(kDrawsPerPositive * positives.size()) +
                    " draws; candidate space too small for this batch");
      }
      --budget;
      const NodeId candidate{static_cast<std::uint32_t>(rng.below(space.node_count))};
      if (candidate == source) continue;
      const NodePair pair = NodePair{source, candidate}.canonical(space.directed);
      if (excluded(pair)) continue;
      out.negatives.push_back({pair, pos.timestamp, true});
      ++out.fallback_count;
      break;
    }
  }
}

template <typename Excluded>
NegativeBatch from_pool(std::span<const Edge> positives, const PairPool& pool,
                        Excluded&& pool_excluded, const SamplingSpace& space,
                        const PairSet& collision, SamplerRng& rng) {
  NegativeBatch batch;
  batch.negatives.reserve(positives.size());
  const auto drawn = draw_without_replacement(pool, positives.size(), pool_excluded, rng);
  for (std::size_t i = 0; i < drawn.size(); ++i) {
    batch.negatives.push_back({drawn[i], positives[i].timestamp, false});
  }
  fill_random(
      positives, drawn.size(), space, [&](const NodePair& p) { return collision.contains(p); },
      rng, batch);
  return batch;
}

}  // namespace detail

/// Random NS: keeps each positive's source and timestamp and replaces the
/// destination with a uniform node, rejecting self-loops and any pair in
/// `exclusion` (which must contain the batch's own positive pairs).
inline NegativeBatch sample_random(std::span<const Edge> positives, const SamplingSpace& space,
                                   const PairSet& exclusion, SamplerRng& rng) {
  NegativeBatch batch;
  batch.negatives.reserve(positives.size());
  detail::fill_random(
      positives, 0, space, [&](const NodePair& p) { return exclusion.contains(p); }, rng, batch);
  return batch;
}

/// Historical NS: whole pairs drawn from `history` minus the batch's
/// positives; shortfall topped up by random NS.
inline NegativeBatch sample_historical(std::span<const Edge> positives, const PairPool& history,
                                       const SamplingSpace& space, const PairSet& exclusion,
                                       SamplerRng& rng) {
  const PairSet current = pair_set_of(positives);
  return detail::from_pool(
      positives, history, [&](const NodePair& p) { return current.contains(p); }, space,
      exclusion, rng);
}

/// Inductive NS: whole pairs drawn from test pairs streamed before this batch
/// that never occurred in `history`, minus the batch's positives; shortfall
/// topped up by random NS.
inline NegativeBatch sample_inductive(std::span<const Edge> positives, const PairPool& history,
                                      const PairPool& test_seen, const SamplingSpace& space,
                                      const PairSet& exclusion, SamplerRng& rng) {
  const PairSet current = pair_set_of(positives);
  return detail::from_pool(
      positives, test_seen,
      [&](const NodePair& p) { return current.contains(p) || history.contains(p); }, space,
      exclusion, rng);
}

}  // namespace tlp
