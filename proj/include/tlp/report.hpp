#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "tlp/protocol.hpp"

namespace tlp {

inline constexpr const char* kToolName = "tlpeval";
inline constexpr const char* kVersion = "0.1.0";

using Json = nlohmann::ordered_json;

inline const char* to_string(HistoryMode m) {
  return m == HistoryMode::train ? "train" : "train+val";
}

inline const char* to_string(CollisionScope c) {
  return c == CollisionScope::batch ? "batch" : "global";
}

inline Json to_json(const StreamStats& s) {
  return Json{{"nodes", s.nodes},
              {"total_edges", s.total_edges},
              {"unique_edges", s.unique_edges},
              {"unique_timestamps", s.unique_timestamps},
              {"duration", s.duration}};
}

inline Json to_json(const ChronoSplit& s) {
  return Json{{"ratios", Json::array({s.ratios.train, s.ratios.val, s.ratios.test})},
              {"train", s.train_size()},
              {"val", s.val_size()},
              {"test", s.test_size()},
              {"t_split", s.t_split}};
}

inline Json to_json(const DifficultyIndices& d) {
  return Json{{"novelty", d.novelty}, {"reoccurrence", d.reoccurrence}, {"surprise", d.surprise}};
}

inline Json to_json(const MetricReport& m) {
  return Json{{"au_roc", m.au_roc},
              {"ap", m.ap},
              {"au_pr", m.au_pr},
              {"threshold", m.threshold},
              {"accuracy", m.at_threshold.accuracy},
              {"precision", m.at_threshold.precision},
              {"recall", m.at_threshold.recall},
              {"f1", m.at_threshold.f1},
              {"positives", m.positives},
              {"negatives", m.negatives}};
}

inline Json to_json(const NegativeTally& t) {
  return Json{{"total", t.total()}, {"strategy", t.from_strategy}, {"random", t.random}};
}

/// Difficulty indices with null for any index whose denominator set is
/// empty (e.g. a degenerate split).
inline Json indices_json(const EdgeStream& stream, const EdgeSets* sets, HistoryMode mode) {
  Json j{{"novelty", novelty_index(stream)}, {"reoccurrence", nullptr}, {"surprise", nullptr}};
  if (sets == nullptr) return j;
  const PairSet history = sets->history_pairs(mode);
  if (!history.empty()) j["reoccurrence"] = reoccurrence_index(history, sets->test_pairs);
  if (!sets->test_pairs.empty()) j["surprise"] = surprise_index(history, sets->test_pairs);
  return j;
}

/// Everything one command run reports. Absent sections are omitted from the
/// JSON; present keys always appear in the order below.
struct RunReport {
  std::string command;
  std::string dataset;
  bool directed = true;
  std::optional<StreamStats> stats;
  std::optional<ChronoSplit> split;
  HistoryMode history = HistoryMode::train;
  Json indices;  // null when not computed; entries may be null when undefined
  std::optional<SamplerConfig> sampler;
  std::optional<EdgeBankVariant> variant;
  std::optional<double> window;
  std::optional<MetricReport> metrics;
  std::optional<NegativeTally> tally;
};

inline Json to_json(const RunReport& r) {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kVersion;
  j["command"] = r.command;
  j["dataset"] = r.dataset;
  j["directed"] = r.directed;
  if (r.stats) j["stats"] = to_json(*r.stats);
  if (r.split) j["split"] = to_json(*r.split);
  j["history"] = to_string(r.history);
  if (!r.indices.is_null()) j["indices"] = r.indices;
  if (r.sampler) {
    j["sampling"] = Json{{"strategy", to_string(r.sampler->strategy)},
                         {"seed", r.sampler->seed},
                         {"batch_size", r.sampler->batch_size},
                         {"collision", to_string(r.sampler->collision)}};
  }
  if (r.variant) {
    Json eb{{"variant", to_string(*r.variant)}};
    if (r.window) eb["window"] = *r.window;
    j["edgebank"] = eb;
  }
  if (r.metrics) j["metrics"] = to_json(*r.metrics);
  if (r.tally) j["negatives"] = to_json(*r.tally);
  return j;
}

}  // namespace tlp
