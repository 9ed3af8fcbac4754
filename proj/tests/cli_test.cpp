#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "test_util.hpp"

namespace {

struct Outcome {
  int status = -1;
  std::string output;
};

Outcome cli(const std::string& args, bool merge_stderr = true) {
  const std::string cmd = std::string(TRADEBENCH_CLI) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return o;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe) != nullptr) o.output += buf.data();
  const int raw = pclose(pipe);
  o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return o;
}

}  // namespace

TEST(Cli, BreakEvenJson) {
  const auto o = cli("breakeven --alpha 0.1 --epsilon 0.05 --cost-a linear:12 --cost-b linearithmic:2", false);
  ASSERT_EQ(o.status, 0) << o.output;
  const auto doc = nlohmann::json::parse(o.output);
  EXPECT_TRUE(doc.at("exists").get<bool>());
  EXPECT_NEAR(doc.at("n_B").get<double>(), 512.0, 512e-9);
  EXPECT_NEAR(doc.at("n_A").get<double>(), 768.0, 768e-9);
  EXPECT_NEAR(doc.at("T").get<double>(), 9216.0, 9216e-9);
}

TEST(Cli, BreakEvenBadCostModel) {
  const auto o = cli("breakeven --cost-a cubic:3");
  EXPECT_NE(o.status, 0);
  EXPECT_NE(o.output.find("error:"), std::string::npos);
}

TEST(Cli, SynthIsByteIdentical) {
  testutil::TempDir dir("synth");
  const auto a = dir / "a.tsv", b = dir / "b.tsv";
  ASSERT_EQ(cli("synth --seed 1 --size-mb 0.05 --out " + a.string()).status, 0);
  ASSERT_EQ(cli("synth --seed 1 --size-mb 0.05 --out " + b.string()).status, 0);
  const auto ca = testutil::read_file(a);
  EXPECT_GE(ca.size(), 50'000u);
  EXPECT_EQ(ca, testutil::read_file(b));
}

TEST(Cli, RunRejectsTooFewMembersForKFold) {
  testutil::TempDir dir("kfold");
  testutil::write_file(dir / "tiny.tsv", "pos\tgood movie\nneg\tbad movie\n");
  testutil::write_file(dir / "cfg.json", R"({"corpus": {"path": ")" + (dir / "tiny.tsv").string() +
                                             R"("}, "algorithms": ["NB"], "sizes_mb": [1], "eval": {"kfold": {"k": 5}}})");
  const auto o = cli("run --config " + (dir / "cfg.json").string() + " --out " + (dir / "out").string());
  EXPECT_NE(o.status, 0);
  EXPECT_NE(o.output.find("has fewer than k members"), std::string::npos) << o.output;
  EXPECT_EQ(std::count(o.output.begin(), o.output.end(), '\n'), 1);
  EXPECT_FALSE(std::filesystem::exists(dir / "out" / "runs.csv"));
}

TEST(Cli, RunWithOverrides) {
  testutil::TempDir dir("run");
  testutil::write_file(dir / "cfg.json", R"({
    "task": "cli",
    "corpus": {"synthetic": {"num_classes": 2, "vocab_per_class": 30, "shared_vocab": 50, "doc_len_min": 5, "doc_len_max": 15}},
    "algorithms": ["NB", "LR", "SVM"],
    "sizes_mb": [0.01, 0.02],
    "seed": 3
  })");
  const auto out = dir / "out";
  const auto o = cli("run --config " + (dir / "cfg.json").string() + " --algos NB,KNN --sizes 0.01,0.015,0.02 --seed 9" +
                     " --time-basis train_plus_predict --out " + out.string());
  ASSERT_EQ(o.status, 0) << o.output;
  const auto csv = testutil::read_file(out / "runs.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);  // header + 2 algorithms x 3 sizes
  EXPECT_NE(csv.find("\nKNN,cli,0.015,holdout,9,"), std::string::npos) << csv;
  const auto doc = nlohmann::json::parse(testutil::read_file(out / "result.json"));
  EXPECT_EQ(doc.at("config").at("time_basis"), "train_plus_predict");
  EXPECT_EQ(doc.at("config").at("seed"), 9);
  EXPECT_EQ(doc.at("config").at("corpus").at("synthetic").at("seed"), 9);
}

TEST(Cli, UsageErrors) {
  EXPECT_NE(cli("").status, 0);
  EXPECT_NE(cli("run").status, 0);
  EXPECT_NE(cli("run --config /nonexistent.json").status, 0);
}
