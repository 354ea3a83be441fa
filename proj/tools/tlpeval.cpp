#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using tlp::Json;

tlp::SplitRatios parse_ratios(const std::string& s) {
  std::vector<std::string_view> parts;
  tlp::text::split(s, ',', parts);
  if (parts.size() != 3) throw tlp::Error("--ratios expects three comma-separated values");
  double v[3];
  for (int i = 0; i < 3; ++i) {
    const auto d = tlp::text::parse_double(parts[static_cast<std::size_t>(i)]);
    if (!d) throw tlp::Error("--ratios: bad value '" + std::string(parts[static_cast<std::size_t>(i)]) + "'");
    v[i] = *d;
  }
  return {v[0], v[1], v[2]};
}

struct RawCommon {
  std::string input;
  std::string format = "edgelist";
  bool undirected = false;
  std::string ratios = "0.7,0.15,0.15";
  std::string history = "train";
  std::string json_out;
};

void add_common(CLI::App* app, RawCommon& c) {
  app->add_option("input", c.input, "edge stream file")->required()->check(CLI::ExistingFile);
  app->add_option("--format", c.format, "input layout")
      ->check(CLI::IsMember({"interaction", "edgelist"}))
      ->capture_default_str();
  auto* dir = app->add_flag("--directed", "treat (a,b) and (b,a) as different pairs (default)");
  app->add_flag("--undirected", c.undirected, "canonicalize pairs so (a,b) == (b,a)")->excludes(dir);
  app->add_option("--ratios", c.ratios, "train,val,test fractions")->capture_default_str();
  app->add_option("--history", c.history, "partitions that count as the past at test time")
      ->check(CLI::IsMember({"train", "train+val"}))
      ->capture_default_str();
  app->add_option("--json", c.json_out, "also write the JSON report to this file (stdout always gets it)")
      ->expected(0, 1);
}

tlp::cli::CommonOptions resolve(const RawCommon& c) {
  tlp::cli::CommonOptions o;
  o.input = c.input;
  o.format = c.format == "interaction" ? tlp::InputFormat::interaction : tlp::InputFormat::edgelist;
  o.directed = !c.undirected;
  o.ratios = parse_ratios(c.ratios);
  o.history = c.history == "train" ? tlp::HistoryMode::train : tlp::HistoryMode::train_and_val;
  return o;
}

struct RawSampler {
  std::string strategy = "rnd";
  std::uint64_t seed = 0;
  std::size_t batch = 200;
  std::string collision = "batch";
};

void add_sampler(CLI::App* app, RawSampler& s) {
  app->add_option("--strategy", s.strategy, "negative sampling strategy")
      ->check(CLI::IsMember({"rnd", "hist", "induc"}))
      ->capture_default_str();
  app->add_option("--seed", s.seed, "sampler seed")->capture_default_str();
  app->add_option("--batch", s.batch, "test batch size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--collision", s.collision, "random-negative collision check scope")
      ->check(CLI::IsMember({"batch", "global"}))
      ->capture_default_str();
}

tlp::SamplerConfig resolve(const RawSampler& s) {
  tlp::SamplerConfig c;
  c.strategy = tlp::parse_strategy(s.strategy);
  c.seed = s.seed;
  c.batch_size = s.batch;
  c.collision = s.collision == "batch" ? tlp::CollisionScope::batch : tlp::CollisionScope::global;
  return c;
}

void emit(const Json& j, const std::string& json_out) {
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!json_out.empty()) {
    tlp::cli::write_file(json_out, [&](std::ostream& os) { os << text; });
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluation toolkit for link prediction on timestamped edge streams"};
  app.set_version_flag("--version", std::string(tlp::kVersion));
  app.require_subcommand(1);

  RawCommon stats_c;
  auto* stats = app.add_subcommand("stats", "dataset statistics and difficulty indices");
  add_common(stats, stats_c);

  RawCommon neg_c;
  RawSampler neg_s;
  std::string neg_out;
  auto* negatives = app.add_subcommand("negatives", "write the test evaluation set");
  add_common(negatives, neg_c);
  add_sampler(negatives, neg_s);
  negatives->add_option("--out", neg_out, "eval-set CSV path")->required();

  RawCommon eb_c;
  RawSampler eb_s;
  std::string eb_variant = "inf";
  std::string eb_scores;
  auto* edgebank = app.add_subcommand("edgebank", "evaluate the EdgeBank baseline");
  add_common(edgebank, eb_c);
  add_sampler(edgebank, eb_s);
  edgebank->add_option("--variant", eb_variant, "memory variant")
      ->check(CLI::IsMember({"inf", "tw"}))
      ->capture_default_str();
  edgebank->add_option("--out", eb_scores, "write per-row scores (row_id,score) here");

  RawCommon sc_c;
  std::string sc_eval, sc_scores;
  auto* score = app.add_subcommand("score", "score an eval set with externally produced scores");
  add_common(score, sc_c);
  score->add_option("--eval-set", sc_eval, "eval-set CSV from `negatives`")
      ->required()
      ->check(CLI::ExistingFile);
  score->add_option("--scores", sc_scores, "row_id,score CSV")->required()->check(CLI::ExistingFile);

  RawCommon pl_c;
  std::string pl_kind, pl_out;
  std::size_t pl_bins = 50;
  auto* plot = app.add_subcommand("plot", "TEA/TET plot data and SVG");
  plot->add_option("kind", pl_kind, "tea or tet")->required()->check(CLI::IsMember({"tea", "tet"}));
  add_common(plot, pl_c);
  plot->add_option("--out", pl_out, "output prefix; writes <out>.svg and <out>.csv")->required();
  plot->add_option("--bins", pl_bins, "maximum TEA bars")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (stats->parsed()) {
      emit(tlp::to_json(tlp::cli::cmd_stats(resolve(stats_c))), stats_c.json_out);
    } else if (negatives->parsed()) {
      emit(tlp::to_json(tlp::cli::cmd_negatives(resolve(neg_c), resolve(neg_s), neg_out)),
           neg_c.json_out);
    } else if (edgebank->parsed()) {
      const auto variant =
          eb_variant == "inf" ? tlp::EdgeBankVariant::infinity : tlp::EdgeBankVariant::time_window;
      std::optional<std::filesystem::path> scores_out;
      if (!eb_scores.empty()) scores_out = eb_scores;
      emit(tlp::to_json(tlp::cli::cmd_edgebank(resolve(eb_c), resolve(eb_s), variant, scores_out)),
           eb_c.json_out);
    } else if (score->parsed()) {
      emit(tlp::to_json(tlp::cli::cmd_score(resolve(sc_c), sc_eval, sc_scores)), sc_c.json_out);
    } else if (plot->parsed()) {
      const auto kind = pl_kind == "tea" ? tlp::cli::PlotKind::tea : tlp::cli::PlotKind::tet;
      emit(tlp::cli::cmd_plot(resolve(pl_c), kind, pl_out, pl_bins), pl_c.json_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "tlpeval: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
