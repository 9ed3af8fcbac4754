#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tradebench/corpus.hpp"
#include "tradebench/eval.hpp"
#include "tradebench/features.hpp"
#include "tradebench/learners.hpp"
#include "tradebench/tradeoff.hpp"

namespace tradebench {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::optional<std::filesystem::path> corpus_path;
  std::optional<SyntheticSpec> synthetic;  // used when corpus_path is empty
  std::string task = "task";
  std::vector<Hyperparams> algorithms;
  std::vector<double> sizes_mb;
  std::optional<double> holdout_fraction;
  std::optional<int> kfold_k;
  FeatureConfig features;
  TimeBasis time_basis = TimeBasis::Train;
  std::uint64_t seed = 42;
  std::filesystem::path output_dir = "results";
  bool parallel = false;

  /// Holdout first, then k-fold, as configured.
  std::vector<EvalMethod> eval_methods() const;
  void validate() const;
};

/// Reads the JSON config document. Unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// A matrix cell that failed; it has no RunRecord.
struct CellError {
  Algorithm algorithm = Algorithm::NB;
  double size_mb = 0.0;
  EvalMethod eval_method;
  std::string message;
};

struct SizeFrontier {
  double size_mb = 0.0;
  std::string eval_method;
  Frontier frontier;
};

struct AlgorithmCurve {
  Algorithm algorithm = Algorithm::NB;
  std::string eval_method;
  std::vector<std::pair<double, double>> points;  // (size_mb, performance)
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RunRecord> runs;
  std::vector<CellError> errors;
  std::vector<SizeFrontier> frontiers;
  std::vector<AlgorithmCurve> curves;
  std::string machine;
};

/// Runs one cell of the matrix. Replaceable so tests can inject failures.
using CellRunner = std::function<RunRecord(const Corpus& subset, const Hyperparams&, const EvalMethod&,
                                           const FeatureConfig&, std::uint64_t seed)>;

ExperimentResult run_experiment(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg, const Corpus& corpus, const CellRunner& runner = {});

/// Loads or generates the configured corpus.
Corpus materialize_corpus(const ExperimentConfig& cfg);

/// Fills frontiers and curves from runs (primary eval method only).
void analyze(ExperimentResult& result);

struct ReportFiles {
  std::filesystem::path runs_csv;
  std::filesystem::path result_json;
  std::vector<std::filesystem::path> plots;
};

ReportFiles emit_reports(const ExperimentResult& result, const std::filesystem::path& dir);

// Report building blocks.

/// printf "%.6g" in the C locale.
std::string format_g6(double value);

inline constexpr const char* kRunsCsvHeader =
    "algorithm,task,size_mb,eval_method,seed,featurize_s,train_s,predict_s,precision_macro,recall_macro,"
    "f1_macro,f1_micro,accuracy,performance";

void write_runs_csv(std::ostream& out, const ExperimentResult& result);

/// One parsed runs.csv row, numeric fields at their printed precision.
struct CsvRun {
  std::string algorithm;
  std::string task;
  double size_mb = 0.0;
  std::string eval_method;
  std::uint64_t seed = 0;
  double featurize_s = 0.0;
  double train_s = 0.0;
  double predict_s = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  double f1_macro = 0.0;
  double f1_micro = 0.0;
  double accuracy = 0.0;
  double performance = 0.0;
};

std::vector<CsvRun> read_runs_csv(std::istream& in);

nlohmann::json to_json(const RunRecord& run);
nlohmann::json to_json(const ExperimentResult& result);

/// Free-text description of the host (CPU model, core count).
std::string describe_machine();

}  // namespace tradebench
