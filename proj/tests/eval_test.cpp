#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "tradebench/eval.hpp"

using namespace tradebench;

namespace {

const std::vector<std::string> kAB{"a", "b"};

ConfusionMatrix matrix(std::vector<std::vector<std::size_t>> counts) {
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < counts.size(); ++i) cm.classes.push_back(std::string(1, static_cast<char>('a' + i)));
  cm.counts = std::move(counts);
  return cm;
}

SyntheticSpec separable_spec(std::size_t bytes) {
  SyntheticSpec s;
  s.num_classes = 4;
  s.signal_prob = 0.7;
  s.target_bytes = bytes;
  s.seed = 2024;
  return s;
}

}  // namespace

TEST(Confusion, HandCounts) {
  const std::vector<std::string> gold{"a", "a", "b"}, pred{"a", "b", "b"};
  const auto cm = confusion(gold, pred, kAB);
  EXPECT_EQ(cm.counts, (std::vector<std::vector<std::size_t>>{{1, 1}, {0, 1}}));
  EXPECT_EQ(cm.total(), 3u);

  const auto diag = confusion(gold, gold, kAB);
  EXPECT_EQ(diag.counts, (std::vector<std::vector<std::size_t>>{{2, 0}, {0, 1}}));

  const auto empty = confusion(std::vector<std::string>{}, std::vector<std::string>{}, kAB);
  EXPECT_EQ(empty.total(), 0u);
}

TEST(Confusion, Errors) {
  EXPECT_THROW(confusion(std::vector<std::string>{"a"}, std::vector<std::string>{}, kAB), EvalError);
  EXPECT_THROW(confusion(std::vector<std::string>{"a"}, std::vector<std::string>{"z"}, kAB), EvalError);
}

TEST(Quality, PerfectAndAllWrong) {
  const auto perfect = quality(matrix({{3, 0}, {0, 5}}));
  EXPECT_EQ(perfect.macro_f1, 1.0);
  EXPECT_EQ(perfect.micro_f1, 1.0);
  EXPECT_EQ(perfect.accuracy, 1.0);
  EXPECT_EQ(perfect.macro_precision, 1.0);

  const auto wrong = quality(matrix({{0, 4}, {2, 0}}));
  EXPECT_EQ(wrong.macro_f1, 0.0);
  EXPECT_EQ(wrong.macro_precision, 0.0);
  EXPECT_EQ(wrong.macro_recall, 0.0);
  EXPECT_EQ(wrong.micro_f1, 0.0);
  EXPECT_EQ(wrong.accuracy, 0.0);
}

TEST(Quality, TwoThirds) {
  const auto q = quality(matrix({{2, 1}, {1, 2}}));
  for (const auto& c : q.per_class) {
    EXPECT_NEAR(c.precision, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(c.recall, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(c.f1, 2.0 / 3.0, 1e-15);
  }
  EXPECT_NEAR(q.macro_f1, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(q.accuracy, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(q.micro_f1, q.macro_f1, 1e-15);
}

TEST(Quality, EmptyMatrix) {
  const auto q = quality(matrix({{0, 0}, {0, 0}}));
  EXPECT_EQ(q.accuracy, 0.0);
  EXPECT_EQ(q.macro_f1, 0.0);
}

TEST(Quality, MatchesOracleAndIsOrderInvariant) {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 2 + gen() % 4;
    std::vector<std::string> classes;
    for (std::size_t c = 0; c < k; ++c) classes.push_back("l" + std::to_string(c));
    const std::size_t n = gen() % 201;
    std::vector<std::string> gold, pred;
    for (std::size_t t = 0; t < n; ++t) {
      gold.push_back(classes[gen() % k]);
      pred.push_back(gen() % 3 == 0 ? gold.back() : classes[gen() % k]);
    }
    const auto q = quality(confusion(gold, pred, classes));
    const auto o = oracle::metrics(gold, pred, classes);
    for (std::size_t c = 0; c < k; ++c) {
      ASSERT_NEAR(q.per_class[c].precision, o.precision[c], 1e-12);
      ASSERT_NEAR(q.per_class[c].recall, o.recall[c], 1e-12);
      ASSERT_NEAR(q.per_class[c].f1, o.f1[c], 1e-12);
    }
    ASSERT_NEAR(q.macro_f1, o.macro_f1, 1e-12);
    ASSERT_NEAR(q.micro_f1, q.accuracy, 1e-12);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<std::string> g2, p2;
    for (auto i : perm) g2.push_back(gold[i]), p2.push_back(pred[i]);
    ASSERT_EQ(quality(confusion(g2, p2, classes)), q);
  }
}

TEST(EvalMethodTag, RoundTrip) {
  EXPECT_EQ(EvalMethod::holdout().tag(), "holdout");
  EXPECT_EQ(EvalMethod::kfold(10).tag(), "kfold10");
  EXPECT_EQ(EvalMethod::parse("kfold6").k, 6);
  EXPECT_THROW(EvalMethod::parse("loo"), EvalError);
}

TEST(EvaluateHoldout, SeparableNaiveBayes) {
  const Corpus c = generate_synthetic(separable_spec(200'000));
  Hyperparams h;
  h.algorithm = Algorithm::NB;
  const auto r = evaluate_holdout(c, h, 0.2, {}, 5);
  EXPECT_GE(r.quality.macro_f1, 0.95);
  EXPECT_GE(r.featurize_s, 0.0);
  EXPECT_GE(r.train_s, 0.0);
  EXPECT_GE(r.predict_s, 0.0);

  const auto again = evaluate_holdout(c, h, 0.2, {}, 5);
  EXPECT_EQ(again.quality, r.quality);
}

TEST(EvaluateHoldout, TestSideSize) {
  std::vector<LabeledDocument> docs;
  for (int i = 0; i < 100; ++i) docs.push_back({i % 2 ? "x" : "y", i % 2 ? "alpha beta common" : "gamma delta common"});
  Hyperparams h;
  const auto r = evaluate_holdout(Corpus(docs), h, 0.2, {50'000, 1}, 3);
  EXPECT_EQ(r.test_documents, 20u);
  EXPECT_EQ(r.train_documents, 80u);
}

TEST(EvaluateKFold, SymmetricFoldsAndMeanBounds) {
  // Two identical halves: every fold sees the same data up to order.
  std::vector<LabeledDocument> docs;
  for (int i = 0; i < 4; ++i) {
    docs.push_back({"x", "alpha beta"});
    docs.push_back({"y", "gamma delta"});
  }
  Hyperparams h;
  const auto r = evaluate_kfold(Corpus(docs), h, 2, {100, 1}, 1);
  EXPECT_EQ(r.quality.macro_f1, 1.0);
  EXPECT_EQ(r.eval_method.tag(), "kfold2");

  const Corpus c = generate_synthetic(separable_spec(60'000));
  h.algorithm = Algorithm::LR;
  const auto folds = k_folds(c, 3, 8);
  double lo = 1, hi = 0;
  for (const auto& f : folds) {
    const auto space = fit_feature_space(f.train, {});
    const auto m = train(space.vectorize(f.train), f.train.labels(), [&] { auto p = h; p.seed = 8; return p; }());
    const auto q = quality(confusion(f.test.labels(), m.predict(space.vectorize(f.test)), c.classes()));
    lo = std::min(lo, q.macro_f1);
    hi = std::max(hi, q.macro_f1);
  }
  auto hs = h;
  hs.seed = 8;
  const auto k = evaluate_kfold(c, hs, 3, {}, 8);
  EXPECT_GE(k.quality.macro_f1, lo - 1e-12);
  EXPECT_LE(k.quality.macro_f1, hi + 1e-12);
  EXPECT_EQ(k.test_documents, c.size());
}

TEST(EvaluateKFold, AgreesWithHoldoutOnSeparableCorpus) {
  const Corpus c = generate_synthetic(separable_spec(300'000));
  Hyperparams h;
  const auto hold = evaluate_holdout(c, h, 0.2, {}, 4);
  const auto kf = evaluate_kfold(c, h, 5, {}, 4);
  EXPECT_LE(std::abs(hold.quality.macro_f1 - kf.quality.macro_f1), 0.05);
}
