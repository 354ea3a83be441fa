#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>

#include "commands.hpp"
#include "support.hpp"

namespace tlp {
namespace {

using testing::read_text;
using testing::temp_dir;
using testing::write_text;

struct Fixture {
  EdgeStream stream;
  ChronoSplit split;
  EdgeSets sets;
};

Fixture fixture_from(EdgeStream s, SplitRatios ratios = {}) {
  const auto split = chronological_split(s, ratios);
  auto sets = edge_sets(s, split);
  return {std::move(s), split, std::move(sets)};
}

EvalConfig config_for(NegativeStrategy strategy, std::size_t batch = 16, std::uint64_t seed = 7) {
  EvalConfig c;
  c.sampler.strategy = strategy;
  c.sampler.batch_size = batch;
  c.sampler.seed = seed;
  return c;
}

struct RunResult {
  int status = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(TLP_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::filesystem::path write_stream(const std::filesystem::path& p, const EdgeStream& s) {
  std::ostringstream os;
  write_edgelist_csv(s, os);
  return write_text(p, os.str());
}

TEST(TestBatches, CoverTestPartitionInOrder) {
  std::mt19937_64 rng(71);
  const auto f = fixture_from(testing::random_stream(rng));
  std::size_t seen = 0, last_index = 0;
  for_each_test_batch(f.stream, f.split, f.sets, config_for(NegativeStrategy::random, 5),
                      [&](const TestBatch& b) {
                        EXPECT_EQ(b.index, last_index++);
                        EXPECT_LE(b.positives.size(), 5u);
                        EXPECT_EQ(b.positives.data(), &f.stream[f.split.val_end + seen]);
                        seen += b.positives.size();
                      });
  EXPECT_EQ(seen, f.split.test_size());
  EXPECT_THROW(for_each_test_batch(f.stream, f.split, f.sets, config_for(NegativeStrategy::random, 0),
                                   [](const TestBatch&) {}),
               Error);
}

TEST(EvalSet, RowsAlternateAndTalliesReconcile) {
  std::mt19937_64 rng(73);
  for (auto strategy : {NegativeStrategy::random, NegativeStrategy::historical, NegativeStrategy::inductive}) {
    const auto f = fixture_from(testing::random_stream(rng));
    const auto set = generate_eval_set(f.stream, f.split, f.sets, config_for(strategy));
    ASSERT_EQ(set.rows.size(), 2 * f.split.test_size());
    std::size_t fallback = 0;
    for (std::size_t i = 0; i < set.rows.size(); ++i) {
      EXPECT_EQ(set.rows[i].row_id, i);
      EXPECT_EQ(set.rows[i].positive, i % 2 == 0);
      if (i % 2 == 1) {
        EXPECT_EQ(set.rows[i].timestamp, set.rows[i - 1].timestamp);
      }
      fallback += set.rows[i].is_fallback ? 1 : 0;
    }
    EXPECT_EQ(set.tally.total(), f.split.test_size());
    EXPECT_EQ(set.tally.random, fallback);
  }
}

TEST(EvalSet, SameSeedSameSetDifferentSeedDifferentSet) {
  std::mt19937_64 rng(79);
  const auto f = fixture_from(testing::random_stream(rng, {.max_edges = 400, .min_nodes = 40}));
  auto rows_of = [&](std::uint64_t seed) {
    std::ostringstream os;
    write_eval_set_csv(generate_eval_set(f.stream, f.split, f.sets,
                                         config_for(NegativeStrategy::random, 16, seed)),
                       os);
    return os.str();
  };
  EXPECT_EQ(rows_of(1), rows_of(1));
  EXPECT_NE(rows_of(1), rows_of(2));
}

TEST(EvalSet, CsvRoundTrip) {
  std::mt19937_64 rng(83);
  const auto f = fixture_from(testing::random_stream(rng));
  const auto set = generate_eval_set(f.stream, f.split, f.sets, config_for(NegativeStrategy::historical));
  std::ostringstream os;
  write_eval_set_csv(set, os);
  const auto dir = temp_dir("evalset_roundtrip");
  const auto back = read_eval_set_csv(write_text(dir / "set.csv", os.str()));
  ASSERT_EQ(back.rows.size(), set.rows.size());
  for (std::size_t i = 0; i < set.rows.size(); ++i) {
    EXPECT_EQ(back.rows[i].pair, set.rows[i].pair);
    EXPECT_EQ(back.rows[i].timestamp, set.rows[i].timestamp);
    EXPECT_EQ(back.rows[i].is_fallback, set.rows[i].is_fallback);
  }
  EXPECT_EQ(back.tally.random, set.tally.random);
  EXPECT_EQ(back.tally.from_strategy, set.tally.from_strategy);
}

TEST(EvalSet, MalformedFilesAreRejected) {
  const auto dir = temp_dir("evalset_bad");
  const std::string h = std::string(kEvalSetHeader) + "\n";
  EXPECT_THROW(read_eval_set_csv(write_text(dir / "a.csv", "row,kind\n")), Error);
  EXPECT_THROW(read_eval_set_csv(write_text(dir / "b.csv", h + "0,neg,0,1,1,rnd,0\n1,pos,0,1,1,rnd,0\n")), Error);
  EXPECT_THROW(read_eval_set_csv(write_text(dir / "c.csv", h + "0,pos,0,1,1,rnd,0\n")), Error);
  EXPECT_THROW(read_eval_set_csv(write_text(dir / "d.csv", h + "0,pos,0,1,1,rnd,0\n0,neg,0,2,1,rnd,0\n")), Error);
  EXPECT_THROW(read_eval_set_csv(write_text(dir / "e.csv", h + "0,pos,0,1,1,rnd,0\n1,neg,0,2,1,rnd,2\n")), Error);
}

TEST(JoinScores, ErrorsAndOrderIndependence) {
  EvalSet set;
  set.rows = {{0, true, NodePair{0u, 1u}, 1.0, NegativeStrategy::random, false},
              {1, false, NodePair{0u, 2u}, 1.0, NegativeStrategy::random, false}};
  EXPECT_THROW(join_scores(set, {{0, 0.9}}), Error);
  EXPECT_THROW(join_scores(set, {{0, 0.9}, {5, 0.1}}), Error);
  EXPECT_THROW(join_scores(set, {{0, 1.5}, {1, 0.1}}), Error);

  const auto dir = temp_dir("join_scores");
  const auto a = read_scores_csv(write_text(dir / "a.csv", "row_id,score\n0,0.9\n1,0.1\n"));
  const auto b = read_scores_csv(write_text(dir / "b.csv", "1,0.1\n0,0.9\n"));
  EXPECT_EQ(metric_report(join_scores(set, a)).au_roc, metric_report(join_scores(set, b)).au_roc);
  EXPECT_THROW(read_scores_csv(write_text(dir / "c.csv", "0,0.9\n0,0.1\n")), Error);
}

TEST(RunEdgeBank, PositivesAlreadyInHistoryScoreOne) {
  // train: ab, cd | val: ef | test: ab, gh
  const auto f = fixture_from(
      build_stream({{0, 1, 1}, {2, 3, 2}, {4, 5, 3}, {0, 1, 4}, {6, 7, 5}}), {0.4, 0.2, 0.4});
  const auto run = run_edgebank(f.stream, f.split, f.sets, config_for(NegativeStrategy::random, 1),
                                EdgeBankVariant::infinity);
  ASSERT_EQ(run.records.size(), 4u);
  EXPECT_EQ(run.records[0].score, 1.0);
  EXPECT_EQ(run.records[2].score, 0.0);
}

TEST(RunEdgeBank, ScoresAreBinaryAndReproducible) {
  std::mt19937_64 rng(89);
  for (int k = 0; k < 20; ++k) {
    const auto f = fixture_from(testing::random_stream(rng));
    for (auto v : {EdgeBankVariant::infinity, EdgeBankVariant::time_window}) {
      if (v == EdgeBankVariant::time_window && test_duration(f.stream, f.split) <= 0.0) continue;
      const auto cfg = config_for(NegativeStrategy::historical);
      const auto a = run_edgebank(f.stream, f.split, f.sets, cfg, v);
      const auto b = run_edgebank(f.stream, f.split, f.sets, cfg, v);
      ASSERT_EQ(a.records.size(), b.records.size());
      for (std::size_t i = 0; i < a.records.size(); ++i) {
        ASSERT_TRUE(a.records[i].score == 0.0 || a.records[i].score == 1.0);
        ASSERT_EQ(a.records[i].score, b.records[i].score);
      }
      ASSERT_EQ(a.metrics.au_roc, b.metrics.au_roc);
    }
  }
}

TEST(Commands, StatsOnTwoEdgeStream) {
  const auto dir = temp_dir("cmd_stats");
  cli::CommonOptions opt;
  opt.input = write_text(dir / "two.csv", "a,b,1\nb,c,2\n");
  const Json j = to_json(cli::cmd_stats(opt));
  EXPECT_EQ(j["stats"]["unique_timestamps"], 2);
  EXPECT_EQ(j["stats"]["total_edges"], 2);
  EXPECT_FALSE(j.contains("split"));
  EXPECT_TRUE(j["indices"]["reoccurrence"].is_null());
}

TEST(Commands, EdgeBankScoresFileReproducesReport) {
  std::mt19937_64 rng(97);
  const auto dir = temp_dir("cmd_edgebank");
  cli::CommonOptions opt;
  opt.input = write_stream(dir / "s.csv", testing::random_stream(rng, {.max_edges = 300}));
  SamplerConfig sc;
  sc.strategy = NegativeStrategy::historical;
  const auto eb = cli::cmd_edgebank(opt, sc, EdgeBankVariant::infinity, dir / "scores.csv");
  cli::cmd_negatives(opt, sc, dir / "set.csv");
  const auto scored = cli::cmd_score(opt, dir / "set.csv", dir / "scores.csv");
  EXPECT_EQ(scored.metrics->au_roc, eb.metrics->au_roc);
  EXPECT_EQ(scored.metrics->ap, eb.metrics->ap);
  EXPECT_EQ(scored.tally->random, eb.tally->random);
}

TEST(Commands, ShuffledScoreFileGivesSameReport) {
  std::mt19937_64 rng(101);
  const auto dir = temp_dir("cmd_shuffle");
  cli::CommonOptions opt;
  opt.input = write_stream(dir / "s.csv", testing::random_stream(rng, {.max_edges = 300}));
  SamplerConfig sc;
  cli::cmd_negatives(opt, sc, dir / "set.csv");
  const auto set = read_eval_set_csv(dir / "set.csv");
  std::vector<std::string> lines;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& r : set.rows) lines.push_back(std::to_string(r.row_id) + "," + std::to_string(u(rng)));
  std::string ordered = "row_id,score\n", shuffled = "row_id,score\n";
  for (const auto& l : lines) ordered += l + "\n";
  std::shuffle(lines.begin(), lines.end(), rng);
  for (const auto& l : lines) shuffled += l + "\n";
  const auto a = cli::cmd_score(opt, dir / "set.csv", write_text(dir / "a.csv", ordered));
  const auto b = cli::cmd_score(opt, dir / "set.csv", write_text(dir / "b.csv", shuffled));
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}

TEST(Commands, TetOnDisjointSplitHasNoTransductiveRows) {
  const auto dir = temp_dir("cmd_tet");
  cli::CommonOptions opt;
  opt.input = write_text(dir / "d.csv", "a,b,1\nc,d,2\ne,f,3\ng,h,4\ni,j,5\nk,l,6\n");
  const Json j = cli::cmd_plot(opt, cli::PlotKind::tet, dir / "tet", 50);
  EXPECT_EQ(j["categories"]["transductive"], 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "tet.svg"));
  EXPECT_TRUE(std::filesystem::exists(dir / "tet.csv"));
}

TEST(Commands, TeaRespectsBins) {
  std::mt19937_64 rng(103);
  const auto dir = temp_dir("cmd_tea");
  cli::CommonOptions opt;
  opt.input = write_stream(dir / "s.csv", testing::random_stream(rng, {.max_time = 5000}));
  const Json j = cli::cmd_plot(opt, cli::PlotKind::tea, dir / "tea", 10);
  EXPECT_LE(j["bars"].get<std::size_t>(), 10u);
}

TEST(Binary, RunsAreByteIdentical) {
  std::mt19937_64 rng(107);
  const auto dir = temp_dir("cli_repeat");
  const auto input = write_stream(dir / "s.csv", testing::random_stream(rng, {.max_edges = 400}));
  for (const std::string sub : {"stats", "edgebank --strategy hist", "edgebank --strategy induc --variant tw"}) {
    const auto a = run_cli(sub + " " + input.string());
    const auto b = run_cli(sub + " " + input.string());
    ASSERT_EQ(a.status, 0) << sub;
    EXPECT_EQ(a.out, b.out) << sub;
    EXPECT_TRUE(Json::parse(a.out).is_object());
  }
  ASSERT_EQ(run_cli("negatives " + input.string() + " --seed 3 --out " + (dir / "x.csv").string()).status, 0);
  ASSERT_EQ(run_cli("negatives " + input.string() + " --seed 3 --out " + (dir / "y.csv").string()).status, 0);
  EXPECT_EQ(read_text(dir / "x.csv"), read_text(dir / "y.csv"));
}

TEST(Binary, FailuresExitNonZero) {
  const auto dir = temp_dir("cli_fail");
  EXPECT_NE(run_cli("stats " + (dir / "missing.csv").string()).status, 0);
  const auto bad = write_text(dir / "bad.csv", "a,b,1\na,b\n");
  EXPECT_NE(run_cli("stats " + bad.string()).status, 0);
  const auto ok = write_text(dir / "ok.csv", "a,b,1\nb,c,2\nc,d,3\n");
  EXPECT_NE(run_cli("edgebank " + ok.string() + " --strategy bogus").status, 0);
  EXPECT_NE(run_cli("edgebank " + ok.string() + " --ratios 0.5,0.5,0.5").status, 0);
  EXPECT_EQ(run_cli("stats " + ok.string()).status, 0);
}

TEST(Binary, JsonFileOption) {
  const auto dir = temp_dir("cli_json");
  const auto ok = write_text(dir / "ok.csv", "a,b,1\nb,c,2\nc,d,3\n");
  const auto r = run_cli("stats " + ok.string() + " --json " + (dir / "r.json").string());
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(Json::parse(read_text(dir / "r.json"))["command"], "stats");
}

}  // namespace
}  // namespace tlp
