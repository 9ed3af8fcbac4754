#include "tradebench/eval.hpp"

#include <algorithm>
#include <chrono>
#include <map>

namespace tradebench {

std::size_t ConfusionMatrix::total() const noexcept {
  std::size_t sum = 0;
  for (const auto& row : counts)
    for (std::size_t c : row) sum += c;
  return sum;
}

ConfusionMatrix confusion(std::span<const std::string> gold, std::span<const std::string> pred,
                          std::span<const std::string> classes) {
  if (gold.size() != pred.size()) throw EvalError("confusion: gold and prediction lengths differ");
  std::map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < classes.size(); ++i) index.emplace(classes[i], i);

  ConfusionMatrix cm;
  cm.classes.assign(classes.begin(), classes.end());
  cm.counts.assign(classes.size(), std::vector<std::size_t>(classes.size(), 0));
  const auto lookup = [&](const std::string& label) {
    const auto it = index.find(label);
    if (it == index.end()) throw EvalError("confusion: unknown label '" + label + "'");
    return it->second;
  };
  for (std::size_t t = 0; t < gold.size(); ++t) ++cm.counts[lookup(gold[t])][lookup(pred[t])];
  return cm;
}

namespace {

double ratio(double num, double den) noexcept { return den > 0.0 ? num / den : 0.0; }

double f_measure(double p, double r) noexcept { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

QualityReport quality(const ConfusionMatrix& cm) {
  const std::size_t n = cm.classes.size();
  QualityReport q;
  double tp_all = 0.0, fp_all = 0.0, fn_all = 0.0, total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double tp = static_cast<double>(cm.counts[i][i]);
    double fp = 0.0, fn = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      total += static_cast<double>(cm.counts[i][j]);
      if (j == i) continue;
      fn += static_cast<double>(cm.counts[i][j]);
      fp += static_cast<double>(cm.counts[j][i]);
    }
    ClassQuality c{cm.classes[i], ratio(tp, tp + fp), ratio(tp, tp + fn), 0.0};
    c.f1 = f_measure(c.precision, c.recall);
    q.per_class.push_back(c);
    q.macro_precision += c.precision;
    q.macro_recall += c.recall;
    q.macro_f1 += c.f1;
    tp_all += tp;
    fp_all += fp;
    fn_all += fn;
  }
  if (n > 0) {
    q.macro_precision /= static_cast<double>(n);
    q.macro_recall /= static_cast<double>(n);
    q.macro_f1 /= static_cast<double>(n);
  }
  q.micro_f1 = f_measure(ratio(tp_all, tp_all + fp_all), ratio(tp_all, tp_all + fn_all));
  q.accuracy = ratio(tp_all, total);
  return q;
}

QualityReport mean_quality(std::span<const QualityReport> reports) {
  if (reports.empty()) throw EvalError("mean_quality: no reports");
  QualityReport m = reports.front();
  for (auto& c : m.per_class) c.precision = c.recall = c.f1 = 0.0;
  m.macro_precision = m.macro_recall = m.macro_f1 = m.micro_f1 = m.accuracy = 0.0;
  const double n = static_cast<double>(reports.size());
  for (const auto& r : reports) {
    if (r.per_class.size() != m.per_class.size()) throw EvalError("mean_quality: class lists differ");
    for (std::size_t i = 0; i < r.per_class.size(); ++i) {
      if (r.per_class[i].label != m.per_class[i].label) throw EvalError("mean_quality: class lists differ");
      m.per_class[i].precision += r.per_class[i].precision / n;
      m.per_class[i].recall += r.per_class[i].recall / n;
      m.per_class[i].f1 += r.per_class[i].f1 / n;
    }
    m.macro_precision += r.macro_precision / n;
    m.macro_recall += r.macro_recall / n;
    m.macro_f1 += r.macro_f1 / n;
    m.micro_f1 += r.micro_f1 / n;
    m.accuracy += r.accuracy / n;
  }
  return m;
}

std::string EvalMethod::tag() const {
  return kind == Kind::Holdout ? std::string("holdout") : "kfold" + std::to_string(k);
}

EvalMethod EvalMethod::parse(std::string_view tag) {
  if (tag == "holdout") return holdout();
  if (tag.starts_with("kfold") && tag.size() > 5) {
    int k = 0;
    for (char c : tag.substr(5)) {
      if (c < '0' || c > '9') throw EvalError("bad eval method '" + std::string(tag) + "'");
      k = k * 10 + (c - '0');
    }
    return kfold(k);
  }
  throw EvalError("bad eval method '" + std::string(tag) + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct FoldOutcome {
  double featurize_s = 0.0;
  double train_s = 0.0;
  double predict_s = 0.0;
  QualityReport quality;
};

// Classes come from the full corpus so every fold reports the same class list.
FoldOutcome run_fold(const Split& split, const Hyperparams& h, const FeatureConfig& features,
                     std::span<const std::string> classes) {
  FoldOutcome out;
  auto start = Clock::now();
  const FeatureSpace space = fit_feature_space(split.train, features);
  const auto train_x = space.vectorize(split.train);
  const auto test_x = space.vectorize(split.test);
  out.featurize_s = seconds_since(start);

  const auto train_y = split.train.labels();
  start = Clock::now();
  const TrainedModel model = train(train_x, train_y, h);
  out.train_s = seconds_since(start);

  start = Clock::now();
  const auto predicted = model.predict(test_x);
  out.predict_s = seconds_since(start);

  const auto gold = split.test.labels();
  out.quality = quality(confusion(gold, predicted, classes));
  return out;
}

RunRecord base_record(const Corpus& corpus, const Hyperparams& h, std::uint64_t seed) {
  RunRecord r;
  r.algorithm = h.algorithm;
  r.size_mb = corpus.size_mb();
  r.seed = seed;
  return r;
}

}  // namespace

RunRecord evaluate_holdout(const Corpus& corpus, const Hyperparams& h, double test_fraction,
                           const FeatureConfig& features, std::uint64_t seed) {
  const Split split = holdout_split(corpus, test_fraction, seed);
  const auto fold = run_fold(split, h, features, corpus.classes());
  RunRecord r = base_record(corpus, h, seed);
  r.eval_method = EvalMethod::holdout(test_fraction);
  r.featurize_s = fold.featurize_s;
  r.train_s = fold.train_s;
  r.predict_s = fold.predict_s;
  r.quality = fold.quality;
  r.train_documents = split.train.size();
  r.test_documents = split.test.size();
  return r;
}

RunRecord evaluate_kfold(const Corpus& corpus, const Hyperparams& h, int k, const FeatureConfig& features,
                         std::uint64_t seed) {
  const auto folds = k_folds(corpus, k, seed);
  RunRecord r = base_record(corpus, h, seed);
  r.eval_method = EvalMethod::kfold(k);
  std::vector<QualityReport> reports;
  for (const auto& split : folds) {
    const auto fold = run_fold(split, h, features, corpus.classes());
    r.featurize_s += fold.featurize_s;
    r.train_s += fold.train_s;
    r.predict_s += fold.predict_s;
    r.train_documents += split.train.size();
    r.test_documents += split.test.size();
    reports.push_back(fold.quality);
  }
  r.quality = mean_quality(reports);
  return r;
}

RunRecord evaluate(const Corpus& corpus, const Hyperparams& h, const EvalMethod& method,
                   const FeatureConfig& features, std::uint64_t seed) {
  return method.kind == EvalMethod::Kind::Holdout ? evaluate_holdout(corpus, h, method.test_fraction, features, seed)
                                                  : evaluate_kfold(corpus, h, method.k, features, seed);
}

}  // namespace tradebench
