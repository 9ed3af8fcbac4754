#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tradebench/corpus.hpp"
#include "tradebench/features.hpp"
#include "tradebench/learners.hpp"

namespace tradebench {

class EvalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Rows are gold labels, columns predictions; both follow `classes` order.
struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<std::size_t>> counts;

  std::size_t total() const noexcept;
};

ConfusionMatrix confusion(std::span<const std::string> gold, std::span<const std::string> pred,
                          std::span<const std::string> classes);

struct ClassQuality {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  friend bool operator==(const ClassQuality&, const ClassQuality&) = default;
};

struct QualityReport {
  std::vector<ClassQuality> per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  double accuracy = 0.0;

  friend bool operator==(const QualityReport&, const QualityReport&) = default;
};

/// Precision and recall are 0 when their denominator is 0; F1 is 0 when P + R = 0.
QualityReport quality(const ConfusionMatrix& cm);

/// Field-wise unweighted mean; all reports must share the same class list.
QualityReport mean_quality(std::span<const QualityReport> reports);

struct EvalMethod {
  enum class Kind { Holdout, KFold };
  Kind kind = Kind::Holdout;
  double test_fraction = 0.2;  // holdout
  int k = 5;                   // k-fold

  static EvalMethod holdout(double fraction = 0.2) { return {Kind::Holdout, fraction, 5}; }
  static EvalMethod kfold(int k) { return {Kind::KFold, 0.2, k}; }

  /// "holdout" or "kfold<k>", as written to reports.
  std::string tag() const;
  static EvalMethod parse(std::string_view tag);
};

struct RunRecord {
  Algorithm algorithm = Algorithm::NB;
  std::string task;
  double size_mb = 0.0;
  EvalMethod eval_method;
  std::uint64_t seed = 0;
  double featurize_s = 0.0;
  double train_s = 0.0;
  double predict_s = 0.0;
  QualityReport quality;
  double performance = 0.0;  // set by the harness through the tradeoff module
  std::size_t train_documents = 0;
  std::size_t test_documents = 0;
  // Monotonic timestamps relative to the start of the experiment.
  double started_s = 0.0;
  double finished_s = 0.0;
};

/// Train on the holdout split's training side, score on the test side.
RunRecord evaluate_holdout(const Corpus& corpus, const Hyperparams& h, double test_fraction,
                           const FeatureConfig& features, std::uint64_t seed);

/// One refit per fold; quality is the mean over folds, times are summed.
RunRecord evaluate_kfold(const Corpus& corpus, const Hyperparams& h, int k, const FeatureConfig& features,
                         std::uint64_t seed);

RunRecord evaluate(const Corpus& corpus, const Hyperparams& h, const EvalMethod& method,
                   const FeatureConfig& features, std::uint64_t seed);

}  // namespace tradebench
