#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "test_util.hpp"
#include "tradebench/harness.hpp"
#include "tradebench/svg.hpp"

using namespace tradebench;
using nlohmann::json;

namespace {

ExperimentConfig small_config() {
  return parse_config(json::parse(R"({
    "task": "toy",
    "corpus": {"synthetic": {"num_classes": 3, "vocab_per_class": 40, "shared_vocab": 100,
                             "signal_prob": 0.7, "doc_len_min": 10, "doc_len_max": 30}},
    "algorithms": ["NB", {"algorithm": "LR", "epochs": 3}],
    "sizes_mb": [0.02, 0.04, 0.08],
    "eval": {"holdout": {"test_fraction": 0.2}},
    "features": {"max_features": 5000, "min_df": 1},
    "seed": 7
  })"));
}

std::size_t count(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(Config, ParsesAndDefaults) {
  const auto cfg = small_config();
  EXPECT_EQ(cfg.task, "toy");
  ASSERT_EQ(cfg.algorithms.size(), 2u);
  EXPECT_EQ(cfg.algorithms[1].algorithm, Algorithm::LR);
  EXPECT_EQ(cfg.algorithms[1].epochs, 3);
  EXPECT_EQ(cfg.algorithms[0].k_neighbors, 5);
  ASSERT_TRUE(cfg.synthetic);
  EXPECT_EQ(cfg.synthetic->seed, 7u);
  EXPECT_EQ(cfg.time_basis, TimeBasis::Train);
  EXPECT_EQ(cfg.eval_methods().size(), 1u);
  // Echo survives a round trip.
  const auto echoed = parse_config(to_json(cfg));
  EXPECT_EQ(to_json(echoed), to_json(cfg));
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_config(json::parse(R"({"corpus": {"path": "x"}, "colour": 1})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"corpus": {"path": "x"}, "algorithms": ["XGB"]})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"corpus": {"path": "x"}, "time_basis": "cpu"})")), ConfigError);

  auto cfg = small_config();
  cfg.sizes_mb = {};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.sizes_mb = {0.04, 0.02};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.algorithms.push_back(cfg.algorithms[0]);
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(RunExperiment, MatrixCardinalityAndDeterminism) {
  const auto cfg = small_config();
  const auto a = run_experiment(cfg);
  ASSERT_EQ(a.runs.size(), 6u);
  EXPECT_TRUE(a.errors.empty());
  EXPECT_EQ(a.frontiers.size(), 3u);
  EXPECT_EQ(a.curves.size(), 2u);

  const auto b = run_experiment(cfg);
  ASSERT_EQ(b.runs.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(a.runs[i].algorithm, b.runs[i].algorithm);
    EXPECT_EQ(a.runs[i].size_mb, b.runs[i].size_mb);
    EXPECT_EQ(a.runs[i].quality, b.runs[i].quality);
    EXPECT_EQ(a.runs[i].test_documents, b.runs[i].test_documents);
  }
}

TEST(RunExperiment, SequentialRunsDoNotOverlap) {
  const auto res = run_experiment(small_config());
  for (std::size_t i = 0; i < res.runs.size(); ++i) {
    EXPECT_LE(res.runs[i].started_s, res.runs[i].finished_s);
    if (i > 0) EXPECT_LE(res.runs[i - 1].finished_s, res.runs[i].started_s);
  }
}

TEST(RunExperiment, FailingCellIsIsolated) {
  const auto cfg = small_config();
  const Corpus corpus = materialize_corpus(cfg);
  const CellRunner runner = [](const Corpus& subset, const Hyperparams& h, const EvalMethod& m,
                               const FeatureConfig& f, std::uint64_t seed) -> RunRecord {
    if (h.algorithm == Algorithm::LR && subset.size_mb() > 0.06) throw std::bad_alloc();
    return evaluate(subset, h, m, f, seed);
  };
  const auto res = run_experiment(cfg, corpus, runner);
  EXPECT_EQ(res.runs.size(), 5u);
  ASSERT_EQ(res.errors.size(), 1u);
  EXPECT_EQ(res.errors[0].algorithm, Algorithm::LR);
  EXPECT_EQ(res.errors[0].size_mb, 0.08);
  EXPECT_EQ(res.errors[0].message, "out of memory");
  // The frontier at the largest size only holds the surviving algorithm.
  EXPECT_EQ(res.frontiers.back().frontier.points.size(), 1u);
}

TEST(RunExperiment, KFoldPreconditionFailsBeforeAnyRun) {
  auto cfg = small_config();
  cfg.holdout_fraction.reset();
  cfg.kfold_k = 5;
  const Corpus tiny({{"a", "one doc"}, {"b", "two doc"}});
  bool called = false;
  const CellRunner runner = [&](const Corpus& c, const Hyperparams& h, const EvalMethod& m, const FeatureConfig& f,
                                std::uint64_t s) {
    called = true;
    return evaluate(c, h, m, f, s);
  };
  try {
    run_experiment(cfg, tiny, runner);
    FAIL();
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("has fewer than k members"), std::string::npos) << e.what();
  }
  EXPECT_FALSE(called);
}

TEST(RunExperiment, ParallelModeStampsCsv) {
  auto cfg = small_config();
  cfg.parallel = true;
  const auto res = run_experiment(cfg);
  EXPECT_EQ(res.runs.size(), 6u);
  std::ostringstream csv;
  write_runs_csv(csv, res);
  EXPECT_NE(csv.str().find(",timing_fidelity\n"), std::string::npos);
  std::istringstream in(csv.str());
  EXPECT_EQ(read_runs_csv(in).size(), 6u);
}

TEST(Reports, FormattingRule) {
  EXPECT_EQ(format_g6(2.0 / 3.0 * 10 / 5), "1.33333");
  EXPECT_EQ(format_g6(10), "10");
  EXPECT_EQ(format_g6(0.000123456789), "0.000123457");
  EXPECT_EQ(format_g6(1234567.0), "1.23457e+06");
}

TEST(Reports, RunsCsvContent) {
  ExperimentResult res;
  res.config = small_config();
  RunRecord r;
  r.algorithm = Algorithm::NB;
  r.task = "toy";
  r.size_mb = 10;
  r.train_s = 5;
  r.quality.macro_f1 = 2.0 / 3.0;
  r.performance = performance(r.quality.macro_f1, r.size_mb, r.train_s);
  for (int i = 0; i < 6; ++i) res.runs.push_back(r);

  std::ostringstream out;
  write_runs_csv(out, res);
  const std::string csv = out.str();
  EXPECT_EQ(count(csv, "\n"), 7u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kRunsCsvHeader);
  const std::string row = csv.substr(csv.find('\n') + 1, csv.find('\n', csv.find('\n') + 1) - csv.find('\n') - 1);
  EXPECT_EQ(row, "NB,toy,10,holdout,0,0,5,0,0,0,0.666667,0,0,1.33333");
}

TEST(Reports, FrontierPlotMarksParetoPoints) {
  const auto f = frontier({PerformancePoint::make("NB", 0.5, 10, 1), PerformancePoint::make("LR", 0.6, 10, 2),
                           PerformancePoint::make("SVM", 0.55, 10, 3)});
  const auto svg = svg::frontier_chart("t", f);
  EXPECT_EQ(count(svg, "class=\"pareto\""), 2u);
  EXPECT_EQ(count(svg, "class=\"dominated\""), 1u);
  EXPECT_EQ(count(svg, "class=\"hull\""), 1u);
}

TEST(Reports, EmitWritesEverythingAndRoundTrips) {
  testutil::TempDir dir("reports");
  const auto res = run_experiment(small_config());
  const auto files = emit_reports(res, dir.path());

  for (const char* name : {"runs.csv", "result.json", "quality_vs_size.svg", "time_vs_size.svg",
                           "performance_vs_size.svg", "frontier_0.02.svg", "frontier_0.04.svg", "frontier_0.08.svg"})
    EXPECT_TRUE(std::filesystem::exists(dir / name)) << name;
  for (const auto& entry : std::filesystem::directory_iterator(dir.path()))
    EXPECT_EQ(entry.path().filename().string().find(".tmp"), std::string::npos);

  std::ifstream csv_in(files.runs_csv);
  const auto rows = read_runs_csv(csv_in);
  ASSERT_EQ(rows.size(), res.runs.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = res.runs[i];
    EXPECT_EQ(rows[i].algorithm, to_string(r.algorithm));
    EXPECT_EQ(rows[i].task, r.task);
    EXPECT_EQ(rows[i].eval_method, r.eval_method.tag());
    EXPECT_EQ(rows[i].seed, r.seed);
    EXPECT_EQ(format_g6(rows[i].size_mb), format_g6(r.size_mb));
    EXPECT_EQ(format_g6(rows[i].f1_macro), format_g6(r.quality.macro_f1));
    EXPECT_EQ(format_g6(rows[i].accuracy), format_g6(r.quality.accuracy));
  }

  // Frontier membership in result.json against a recomputation from runs.csv.
  const auto doc = json::parse(testutil::read_file(files.result_json));
  for (const auto& fr : doc.at("frontiers")) {
    std::vector<oracle::Point> pts;
    std::vector<std::string> names;
    for (const auto& row : rows)
      if (format_g6(row.size_mb) == format_g6(fr.at("size_mb").get<double>()) && row.eval_method == "holdout") {
        pts.push_back({row.train_s, row.f1_macro});
        names.push_back(row.algorithm);
      }
    std::vector<std::string> expect;
    for (auto i : oracle::pareto(pts)) expect.push_back(names[i]);
    std::vector<std::string> got = fr.at("pareto").get<std::vector<std::string>>();
    std::sort(expect.begin(), expect.end());
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, expect);
  }
  EXPECT_FALSE(doc.at("machine").get<std::string>().empty());
}

TEST(Reports, UnwritableDirectory) {
  testutil::TempDir dir("unwritable");
  const auto blocker = dir / "file";
  testutil::write_file(blocker, "keep");
  ExperimentResult res;
  res.config = small_config();
  EXPECT_THROW(emit_reports(res, blocker / "out"), std::exception);
  EXPECT_EQ(testutil::read_file(blocker), "keep");
}
