#pragma once

// Subcommand bodies for the tlpeval CLI, kept out of main() so tests can
// drive them in-process.

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>

#include "tlp/ingest.hpp"
#include "tlp/plots.hpp"
#include "tlp/protocol.hpp"
#include "tlp/report.hpp"

namespace tlp::cli {

struct CommonOptions {
  std::filesystem::path input;
  InputFormat format = InputFormat::edgelist;
  bool directed = true;
  SplitRatios ratios;
  HistoryMode history = HistoryMode::train;
};

struct Loaded {
  EdgeStream stream;
  std::optional<ChronoSplit> split;  // absent for streams shorter than 3 edges
  std::optional<EdgeSets> sets;
};

inline Loaded load(const CommonOptions& opt, bool require_split = true) {
  ParseOptions po;
  po.directed = opt.directed;
  po.keep_features = false;
  Loaded l{parse_stream(opt.input, opt.format, po).stream, std::nullopt, std::nullopt};
  if (require_split || l.stream.size() >= 3) {
    l.split = chronological_split(l.stream, opt.ratios);
    l.sets = edge_sets(l.stream, *l.split);
  }
  return l;
}

inline RunReport base_report(const std::string& command, const CommonOptions& opt,
                             const Loaded& l) {
  RunReport r;
  r.command = command;
  r.dataset = l.stream.name();
  r.directed = l.stream.directed();
  r.split = l.split;
  r.history = opt.history;
  r.indices = indices_json(l.stream, l.sets ? &*l.sets : nullptr, opt.history);
  return r;
}

/// Writes a file through `body`; throws unless every byte reached disk.
inline void write_file(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  body(out);
  out.flush();
  if (!out) throw Error("failed writing " + path.string());
}

inline RunReport cmd_stats(const CommonOptions& opt) {
  const Loaded l = load(opt, false);
  RunReport r = base_report("stats", opt, l);
  r.stats = stream_stats(l.stream);
  return r;
}

inline EvalConfig eval_config(const CommonOptions& opt, const SamplerConfig& sampler) {
  return EvalConfig{sampler, opt.history};
}

inline RunReport cmd_negatives(const CommonOptions& opt, const SamplerConfig& sampler,
                               const std::filesystem::path& out) {
  const Loaded l = load(opt);
  const EvalSet set = generate_eval_set(l.stream, *l.split, *l.sets, eval_config(opt, sampler));
  write_file(out, [&](std::ostream& os) { write_eval_set_csv(set, os); });
  RunReport r = base_report("negatives", opt, l);
  r.sampler = sampler;
  r.tally = set.tally;
  return r;
}

inline RunReport cmd_edgebank(const CommonOptions& opt, const SamplerConfig& sampler,
                              EdgeBankVariant variant,
                              const std::optional<std::filesystem::path>& scores_out = {}) {
  const Loaded l = load(opt);
  const EvalConfig config = eval_config(opt, sampler);
  const EdgeBankRun run = run_edgebank(l.stream, *l.split, *l.sets, config, variant);
  if (scores_out) {
    // Row ids match the eval set `negatives` writes for the same options.
    write_file(*scores_out, [&](std::ostream& os) {
      os << "row_id,score\n";
      for (std::size_t i = 0; i < run.records.size(); ++i) {
        os << i << ',' << text::format_double(run.records[i].score) << '\n';
      }
    });
  }
  RunReport r = base_report("edgebank", opt, l);
  r.sampler = sampler;
  r.variant = variant;
  r.window = run.window;
  r.metrics = run.metrics;
  r.tally = run.tally;
  return r;
}

inline RunReport cmd_score(const CommonOptions& opt, const std::filesystem::path& eval_set,
                           const std::filesystem::path& scores) {
  const Loaded l = load(opt);
  const EvalSet set = read_eval_set_csv(eval_set);
  const auto records = join_scores(set, read_scores_csv(scores));
  RunReport r = base_report("score", opt, l);
  r.metrics = metric_report(records);
  r.tally = set.tally;
  return r;
}

enum class PlotKind { tea, tet };

/// Writes `<out>.svg` and `<out>.csv`.
inline Json cmd_plot(const CommonOptions& opt, PlotKind kind, const std::filesystem::path& out,
                     std::size_t bins) {
  const auto svg_path = std::filesystem::path(out.string() + ".svg");
  const auto csv_path = std::filesystem::path(out.string() + ".csv");
  Json summary{{"tool", kToolName}, {"version", kVersion}, {"command", "plot"}};
  if (kind == PlotKind::tea) {
    const Loaded l = load(opt, false);
    const TeaSeries series = tea_series(l.stream);
    const std::string doc = render_tea_svg(series, bins, "Temporal edge appearance: " + l.stream.name());
    write_file(csv_path, [&](std::ostream& os) { write_tea_csv(series, os); });
    write_file(svg_path, [&](std::ostream& os) { os << doc; });
    summary["kind"] = "tea";
    summary["dataset"] = l.stream.name();
    summary["timestamps"] = series.size();
    summary["bars"] = bin_tea(series, bins).size();
    summary["novelty"] = tea_novelty(series);
  } else {
    const Loaded l = load(opt);
    const auto rows = tet_rows(l.stream, *l.split, opt.history);
    const std::string doc =
        render_tet_svg(rows, l.split->t_split, "Temporal edge traffic: " + l.stream.name());
    write_file(csv_path, [&](std::ostream& os) { write_tet_csv(rows, os); });
    write_file(svg_path, [&](std::ostream& os) { os << doc; });
    Json counts{{"train_only", 0}, {"transductive", 0}, {"inductive", 0}, {"val_only", 0}};
    for (const auto& r : rows) counts[to_string(r.category)] = counts[to_string(r.category)].get<std::size_t>() + 1;
    summary["kind"] = "tet";
    summary["dataset"] = l.stream.name();
    summary["rows"] = rows.size();
    summary["categories"] = counts;
    summary["t_split"] = l.split->t_split;
  }
  summary["svg"] = svg_path.string();
  summary["csv"] = csv_path.string();
  return summary;
}

}  // namespace tlp::cli
