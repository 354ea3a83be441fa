#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tlp/edgebank.hpp"
#include "tlp/metrics.hpp"
#include "tlp/negsampler.hpp"
#include "tlp/stream.hpp"
#include "tlp/text.hpp"

namespace tlp {

// Test-phase evaluation: the test partition is cut into fixed-size batches in
// chronological order; each batch of positives gets an aligned batch of
// negatives under the configured strategy.

struct EvalConfig {
  SamplerConfig sampler;
  HistoryMode history = HistoryMode::train;
};

struct StreamStats {
  std::size_t nodes = 0;
  std::size_t total_edges = 0;
  std::size_t unique_edges = 0;
  std::size_t unique_timestamps = 0;
  double duration = 0.0;
};

inline StreamStats stream_stats(const EdgeStream& stream) {
  StreamStats s;
  s.nodes = stream.node_count();
  s.total_edges = stream.size();
  PairSet pairs;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    pairs.insert(stream[i].pair);
    if (i == 0 || stream[i].timestamp != stream[i - 1].timestamp) ++s.unique_timestamps;
  }
  s.unique_edges = pairs.size();
  s.duration = stream.empty() ? 0.0 : stream.last_timestamp() - stream.first_timestamp();
  return s;
}

/// Edges that form the pre-test history under `mode`.
inline std::span<const Edge> history_edges(const EdgeStream& stream, const ChronoSplit& split,
                                           HistoryMode mode) {
  const std::size_t end = mode == HistoryMode::train ? split.train_end : split.val_end;
  return stream.edges().first(end);
}

inline std::span<const Edge> test_edges(const EdgeStream& stream, const ChronoSplit& split) {
  return stream.edges().subspan(split.val_end);
}

/// Span of time covered by the test partition.
inline double test_duration(const EdgeStream& stream, const ChronoSplit& split) {
  if (split.test_size() == 0) throw Error("empty test partition");
  return stream.last_timestamp() - stream[split.val_end].timestamp;
}

struct NegativeTally {
  std::size_t from_strategy = 0;  // drawn from the historical/inductive pool
  std::size_t random = 0;         // random NS, including fallback top-ups

  [[nodiscard]] std::size_t total() const { return from_strategy + random; }
};

struct TestBatch {
  std::size_t index = 0;
  std::span<const Edge> positives;
  NegativeBatch negatives;
};

/// Streams the test batches in order, invoking `fn(const TestBatch&)` once per
/// batch after its negatives are drawn. Inductive pools only see pairs from
/// earlier batches.
template <typename Fn>
NegativeTally for_each_test_batch(const EdgeStream& stream, const ChronoSplit& split,
                                  const EdgeSets& sets, const EvalConfig& config, Fn&& fn) {
  const auto& sc = config.sampler;
  if (sc.batch_size == 0) throw Error("batch size must be at least 1");
  const auto test = test_edges(stream, split);
  const SamplingSpace space{stream.node_count(), stream.directed()};

  const PairPool history = sc.strategy == NegativeStrategy::random
                               ? PairPool{}
                               : PairPool::from_set(sets.history_pairs(config.history));
  PairPool test_seen;
  NegativeTally tally;

  for (std::size_t begin = 0, index = 0; begin < test.size(); begin += sc.batch_size, ++index) {
    const auto positives = test.subspan(begin, std::min(sc.batch_size, test.size() - begin));
    SamplerRng rng(batch_seed(sc.seed, index));
    PairSet batch_pairs = pair_set_of(positives);
    const PairSet& exclusion = sc.collision == CollisionScope::global ? sets.all_pairs : batch_pairs;

    TestBatch batch{index, positives, {}};
    switch (sc.strategy) {
      case NegativeStrategy::random:
        batch.negatives = sample_random(positives, space, exclusion, rng);
        break;
      case NegativeStrategy::historical:
        batch.negatives = sample_historical(positives, history, space, exclusion, rng);
        break;
      case NegativeStrategy::inductive:
        batch.negatives = sample_inductive(positives, history, test_seen, space, exclusion, rng);
        break;
    }
    tally.random += batch.negatives.fallback_count;
    tally.from_strategy += batch.negatives.negatives.size() - batch.negatives.fallback_count;
    fn(static_cast<const TestBatch&>(batch));

    if (sc.strategy == NegativeStrategy::inductive) {
      for (const Edge& e : positives) {
        if (!history.contains(e.pair)) test_seen.insert(e.pair);
      }
    }
  }
  return tally;
}

// ---------------------------------------------------------------------------
// Evaluation sets

struct EvalRow {
  std::size_t row_id = 0;
  bool positive = false;
  NodePair pair;
  Timestamp timestamp = 0.0;
  NegativeStrategy strategy = NegativeStrategy::random;
  bool is_fallback = false;
};

struct EvalSet {
  std::vector<EvalRow> rows;  // positive/negative rows alternate
  NegativeTally tally;
};

inline EvalSet generate_eval_set(const EdgeStream& stream, const ChronoSplit& split,
                                 const EdgeSets& sets, const EvalConfig& config) {
  EvalSet set;
  const auto strategy = config.sampler.strategy;
  set.rows.reserve(2 * split.test_size());
  set.tally = for_each_test_batch(stream, split, sets, config, [&](const TestBatch& b) {
    for (std::size_t i = 0; i < b.positives.size(); ++i) {
      const Edge& pos = b.positives[i];
      const Negative& neg = b.negatives.negatives[i];
      set.rows.push_back({set.rows.size(), true, pos.pair, pos.timestamp, strategy, false});
      set.rows.push_back({set.rows.size(), false, neg.pair, neg.timestamp, strategy, neg.is_fallback});
    }
  });
  return set;
}

inline constexpr const char* kEvalSetHeader =
    "row_id,kind,source,destination,timestamp,strategy,is_fallback";

inline void write_eval_set_csv(const EvalSet& set, std::ostream& out) {
  out << kEvalSetHeader << '\n';
  for (const auto& r : set.rows) {
    out << r.row_id << ',' << (r.positive ? "pos" : "neg") << ',' << r.pair.source.value << ','
        << r.pair.destination.value << ',' << text::format_double(r.timestamp) << ','
        << to_string(r.strategy) << ',' << (r.is_fallback ? 1 : 0) << '\n';
  }
}

inline EvalSet read_eval_set_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != kEvalSetHeader) {
    throw Error(path.string() + ": missing eval-set header");
  }
  auto fail = [&](std::size_t n, const std::string& what) -> void {
    throw Error(path.string() + ":" + std::to_string(n) + ": " + what);
  };
  EvalSet set;
  std::vector<std::string_view> f;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_blank(line)) continue;
    text::split(line, ',', f);
    if (f.size() != 7) fail(line_no, "expected 7 columns");
    EvalRow r;
    const auto id = text::parse_index(f[0]);
    const auto s = text::parse_index(f[2]);
    const auto d = text::parse_index(f[3]);
    const auto t = text::parse_double(f[4]);
    if (!id || !s || !d || !t) fail(line_no, "malformed row");
    if (f[1] != "pos" && f[1] != "neg") fail(line_no, "kind must be pos or neg");
    if (f[6] != "0" && f[6] != "1") fail(line_no, "is_fallback must be 0 or 1");
    r.row_id = *id;
    r.positive = f[1] == "pos";
    r.pair = NodePair{*s, *d};
    r.timestamp = *t;
    r.strategy = parse_strategy(f[5]);
    r.is_fallback = f[6] == "1";
    if (!set.rows.empty() && r.row_id <= set.rows.back().row_id) {
      fail(line_no, "row_id not strictly increasing");
    }
    if (r.positive != (set.rows.size() % 2 == 0)) fail(line_no, "pos/neg rows must alternate");
    if (!r.positive) (r.is_fallback ? set.tally.random : set.tally.from_strategy) += 1;
    set.rows.push_back(r);
  }
  if (set.rows.size() % 2 != 0) throw Error(path.string() + ": unpaired final positive row");
  return set;
}

// ---------------------------------------------------------------------------
// External scores

/// Reads `row_id,score`; rejects duplicates and non-numeric values.
inline std::unordered_map<std::size_t, double> read_scores_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::unordered_map<std::size_t, double> scores;
  std::string line;
  std::vector<std::string_view> f;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_blank(line)) continue;
    text::split(line, ',', f);
    if (line_no == 1 && f.size() == 2 && f[0] == "row_id") continue;
    const auto id = f.size() == 2 ? text::parse_index(f[0]) : std::nullopt;
    const auto score = f.size() == 2 ? text::parse_double(f[1]) : std::nullopt;
    if (!id || !score) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": malformed score row");
    }
    if (!scores.emplace(*id, *score).second) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": duplicate row_id " +
                  std::to_string(*id));
    }
  }
  return scores;
}

/// Joins scores to eval rows by row_id.
inline std::vector<EvalRecord> join_scores(const EvalSet& set,
                                           const std::unordered_map<std::size_t, double>& scores) {
  if (scores.size() != set.rows.size()) {
    throw Error("score count " + std::to_string(scores.size()) + " does not match eval-set rows " +
                std::to_string(set.rows.size()));
  }
  std::vector<EvalRecord> records;
  records.reserve(set.rows.size());
  for (const auto& r : set.rows) {
    auto it = scores.find(r.row_id);
    if (it == scores.end()) {
      // counts match, so some score refers to a row the set does not have
      std::unordered_set<std::size_t> ids;
      for (const auto& row : set.rows) ids.insert(row.row_id);
      std::size_t unknown = 0;
      for (const auto& [id, s] : scores) {
        if (!ids.contains(id)) unknown = std::max(unknown, id);
      }
      throw Error("unknown row_id " + std::to_string(unknown) + " in scores");
    }
    if (!std::isfinite(it->second) || it->second < 0.0 || it->second > 1.0) {
      throw Error("score for row_id " + std::to_string(r.row_id) + " outside [0,1]");
    }
    records.push_back({r.positive, it->second, r.is_fallback});
  }
  return records;
}

// ---------------------------------------------------------------------------
// EdgeBank evaluation

struct EdgeBankRun {
  EdgeBankVariant variant = EdgeBankVariant::infinity;
  std::optional<double> window;
  std::vector<EvalRecord> records;
  NegativeTally tally;
  MetricReport metrics;
};

/// Seeds memory with the history partition, then per test batch scores
/// positives and negatives before adding the batch's positives to memory.
/// The time-window variant uses the test duration as its window.
inline EdgeBankRun run_edgebank(const EdgeStream& stream, const ChronoSplit& split,
                                const EdgeSets& sets, const EvalConfig& config,
                                EdgeBankVariant variant) {
  EdgeBankRun run;
  run.variant = variant;
  if (variant == EdgeBankVariant::time_window) run.window = test_duration(stream, split);
  EdgeBank bank(variant, run.window);
  bank.update(history_edges(stream, split, config.history));

  run.records.reserve(2 * split.test_size());
  run.tally = for_each_test_batch(stream, split, sets, config, [&](const TestBatch& b) {
    for (std::size_t i = 0; i < b.positives.size(); ++i) {
      const Edge& pos = b.positives[i];
      const Negative& neg = b.negatives.negatives[i];
      run.records.push_back({true, bank.predict(pos.pair, pos.timestamp), false});
      run.records.push_back({false, bank.predict(neg.pair, neg.timestamp), neg.is_fallback});
    }
    bank.update(b.positives);
  });
  run.metrics = metric_report(run.records);
  return run;
}

}  // namespace tlp
