#include "tradebench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <new>
#include <set>
#include <thread>

namespace tradebench {

using nlohmann::json;

std::vector<EvalMethod> ExperimentConfig::eval_methods() const {
  std::vector<EvalMethod> out;
  if (holdout_fraction) out.push_back(EvalMethod::holdout(*holdout_fraction));
  if (kfold_k) out.push_back(EvalMethod::kfold(*kfold_k));
  return out;
}

void ExperimentConfig::validate() const {
  if (!corpus_path && !synthetic) throw ConfigError("config: corpus needs a path or a synthetic spec");
  if (synthetic) {
    SyntheticSpec spec = *synthetic;
    if (spec.target_bytes == 0) spec.target_bytes = 1;
    spec.validate();
  }
  if (algorithms.empty()) throw ConfigError("config: no algorithms");
  std::set<Algorithm> seen;
  for (const auto& h : algorithms) {
    h.validate();
    if (!seen.insert(h.algorithm).second)
      throw ConfigError("config: algorithm " + std::string(to_string(h.algorithm)) + " listed twice");
  }
  if (sizes_mb.empty()) throw ConfigError("config: no sizes");
  for (std::size_t i = 0; i < sizes_mb.size(); ++i) {
    if (!(sizes_mb[i] > 0.0)) throw ConfigError("config: sizes must be positive");
    if (i > 0 && !(sizes_mb[i] > sizes_mb[i - 1])) throw ConfigError("config: sizes must be strictly increasing");
  }
  if (!holdout_fraction && !kfold_k) throw ConfigError("config: no evaluation method");
  if (holdout_fraction && !(*holdout_fraction > 0.0 && *holdout_fraction < 1.0))
    throw ConfigError("config: holdout test_fraction must lie in (0, 1)");
  if (kfold_k && *kfold_k < 2) throw ConfigError("config: kfold k must be >= 2");
  if (features.max_features < 1 || features.min_df < 1) throw ConfigError("config: bad feature settings");
}

namespace {

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, std::string_view where) {
  if (!obj.is_object()) throw ConfigError("config: " + std::string(where) + " must be an object");
  for (const auto& [key, value] : obj.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("config: unknown key '" + key + "' in " + std::string(where));
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

Hyperparams parse_algorithm_entry(const json& entry) {
  Hyperparams h;
  if (entry.is_string()) {
    h.algorithm = parse_algorithm(entry.get<std::string>());
    return h;
  }
  reject_unknown(entry,
                 {"algorithm", "l2_lambda", "epochs", "learning_rate0", "k_neighbors", "max_depth", "dt_max_features",
                  "num_trees", "smoothing", "rf_bootstrap", "rf_split_features"},
                 "algorithms entry");
  if (!entry.contains("algorithm")) throw ConfigError("config: algorithms entry without 'algorithm'");
  h.algorithm = parse_algorithm(entry.at("algorithm").get<std::string>());
  read(entry, "l2_lambda", h.l2_lambda);
  read(entry, "epochs", h.epochs);
  read(entry, "learning_rate0", h.learning_rate0);
  read(entry, "k_neighbors", h.k_neighbors);
  read(entry, "max_depth", h.max_depth);
  read(entry, "dt_max_features", h.dt_max_features);
  read(entry, "num_trees", h.num_trees);
  read(entry, "smoothing", h.smoothing);
  read(entry, "rf_bootstrap", h.rf_bootstrap);
  read(entry, "rf_split_features", h.rf_split_features);
  return h;
}

json hyperparams_json(const Hyperparams& h) {
  return {{"algorithm", std::string(to_string(h.algorithm))},
          {"l2_lambda", h.l2_lambda},
          {"epochs", h.epochs},
          {"learning_rate0", h.learning_rate0},
          {"k_neighbors", h.k_neighbors},
          {"max_depth", h.max_depth},
          {"dt_max_features", h.dt_max_features},
          {"num_trees", h.num_trees},
          {"smoothing", h.smoothing},
          {"rf_bootstrap", h.rf_bootstrap},
          {"rf_split_features", h.rf_split_features}};
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig cfg;
  try {
    reject_unknown(doc,
                   {"task", "corpus", "algorithms", "sizes_mb", "eval", "features", "time_basis", "seed", "output_dir",
                    "parallel"},
                   "config");
    read(doc, "task", cfg.task);
    read(doc, "seed", cfg.seed);
    read(doc, "parallel", cfg.parallel);
    if (doc.contains("output_dir")) cfg.output_dir = doc.at("output_dir").get<std::string>();
    if (doc.contains("time_basis")) cfg.time_basis = parse_time_basis(doc.at("time_basis").get<std::string>());

    if (!doc.contains("corpus")) throw ConfigError("config: missing 'corpus'");
    const auto& corpus = doc.at("corpus");
    reject_unknown(corpus, {"path", "synthetic"}, "corpus");
    if (corpus.contains("path")) cfg.corpus_path = corpus.at("path").get<std::string>();
    if (corpus.contains("synthetic")) {
      const auto& s = corpus.at("synthetic");
      reject_unknown(s,
                     {"num_classes", "vocab_per_class", "shared_vocab", "signal_prob", "doc_len_min", "doc_len_max",
                      "target_bytes", "seed"},
                     "corpus.synthetic");
      SyntheticSpec spec;
      read(s, "num_classes", spec.num_classes);
      read(s, "vocab_per_class", spec.vocab_per_class);
      read(s, "shared_vocab", spec.shared_vocab);
      read(s, "signal_prob", spec.signal_prob);
      read(s, "doc_len_min", spec.doc_len_min);
      read(s, "doc_len_max", spec.doc_len_max);
      // 0 means: derive from the largest schedule size and the global seed.
      spec.target_bytes = 0;
      spec.seed = 0;
      read(s, "target_bytes", spec.target_bytes);
      bool explicit_seed = s.contains("seed");
      read(s, "seed", spec.seed);
      cfg.synthetic = spec;
      if (!explicit_seed) cfg.synthetic->seed = cfg.seed;
    }
    if (cfg.corpus_path && cfg.synthetic) throw ConfigError("config: corpus has both 'path' and 'synthetic'");

    if (doc.contains("algorithms")) {
      if (!doc.at("algorithms").is_array()) throw ConfigError("config: 'algorithms' must be an array");
      for (const auto& entry : doc.at("algorithms")) cfg.algorithms.push_back(parse_algorithm_entry(entry));
    }
    read(doc, "sizes_mb", cfg.sizes_mb);

    if (doc.contains("eval")) {
      const auto& e = doc.at("eval");
      reject_unknown(e, {"holdout", "kfold"}, "eval");
      if (e.contains("holdout")) {
        reject_unknown(e.at("holdout"), {"test_fraction"}, "eval.holdout");
        cfg.holdout_fraction = e.at("holdout").value("test_fraction", 0.2);
      }
      if (e.contains("kfold")) {
        reject_unknown(e.at("kfold"), {"k"}, "eval.kfold");
        cfg.kfold_k = e.at("kfold").value("k", 5);
      }
    } else {
      cfg.holdout_fraction = 0.2;
    }
    if (doc.contains("features")) {
      const auto& f = doc.at("features");
      reject_unknown(f, {"max_features", "min_df"}, "features");
      read(f, "max_features", cfg.features.max_features);
      read(f, "min_df", cfg.features.min_df);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const LearnerError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const TradeoffError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& cfg) {
  json corpus = json::object();
  if (cfg.corpus_path) corpus["path"] = cfg.corpus_path->string();
  if (cfg.synthetic) {
    const auto& s = *cfg.synthetic;
    corpus["synthetic"] = {{"num_classes", s.num_classes},   {"vocab_per_class", s.vocab_per_class},
                           {"shared_vocab", s.shared_vocab}, {"signal_prob", s.signal_prob},
                           {"doc_len_min", s.doc_len_min},   {"doc_len_max", s.doc_len_max},
                           {"target_bytes", s.target_bytes}, {"seed", s.seed}};
  }
  json algorithms = json::array();
  for (const auto& h : cfg.algorithms) algorithms.push_back(hyperparams_json(h));
  json eval = json::object();
  if (cfg.holdout_fraction) eval["holdout"] = {{"test_fraction", *cfg.holdout_fraction}};
  if (cfg.kfold_k) eval["kfold"] = {{"k", *cfg.kfold_k}};
  return {{"task", cfg.task},
          {"corpus", corpus},
          {"algorithms", algorithms},
          {"sizes_mb", cfg.sizes_mb},
          {"eval", eval},
          {"features", {{"max_features", cfg.features.max_features}, {"min_df", cfg.features.min_df}}},
          {"time_basis", std::string(to_string(cfg.time_basis))},
          {"seed", cfg.seed},
          {"output_dir", cfg.output_dir.string()},
          {"parallel", cfg.parallel}};
}

Corpus materialize_corpus(const ExperimentConfig& cfg) {
  if (cfg.corpus_path) return load_corpus(*cfg.corpus_path);
  if (!cfg.synthetic) throw ConfigError("config: corpus needs a path or a synthetic spec");
  SyntheticSpec spec = *cfg.synthetic;
  if (spec.target_bytes == 0) {
    const double largest = cfg.sizes_mb.empty() ? 1.0 : cfg.sizes_mb.back();
    spec.target_bytes = static_cast<std::size_t>(std::ceil(largest * kBytesPerMegabyte));
  }
  return generate_synthetic(spec);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Corpus corpus = materialize_corpus(cfg);
  return run_experiment(cfg, corpus);
}

namespace {

struct Cell {
  std::size_t subset = 0;
  double size_mb = 0.0;
  std::size_t algorithm = 0;
  EvalMethod method;
};

// Charged time is floored at the clock resolution so the performance ratio stays finite.
constexpr double kClockResolution = 1e-9;

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Corpus& corpus, const CellRunner& runner) {
  cfg.validate();
  const auto methods = cfg.eval_methods();

  // Preconditions checked before any cell runs.
  if (corpus.classes().size() < 2) throw ConfigError("corpus has fewer than 2 distinct classes");
  if (cfg.kfold_k) check_kfold_feasible(corpus, *cfg.kfold_k);
  const auto sizes = normalize_schedule(cfg.sizes_mb, corpus);
  if (sizes.empty())
    throw ConfigError("no schedule size fits the corpus (" + format_g6(corpus.size_mb()) + " MB available)");

  std::vector<Corpus> subsets;
  for (double s : sizes) {
    subsets.push_back(take_prefix(corpus, static_cast<std::size_t>(std::llround(s * kBytesPerMegabyte))));
    if (cfg.kfold_k) check_kfold_feasible(subsets.back(), *cfg.kfold_k);
  }

  std::vector<Cell> cells;
  for (std::size_t i = 0; i < sizes.size(); ++i)
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a)
      for (const auto& m : methods) cells.push_back({i, sizes[i], a, m});

  const CellRunner run_cell = runner ? runner : CellRunner(evaluate);
  const auto origin = std::chrono::steady_clock::now();
  const auto now_s = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - origin).count(); };

  std::vector<std::optional<RunRecord>> records(cells.size());
  std::vector<std::string> failures(cells.size());
  const auto execute = [&](std::size_t c) {
    const Cell& cell = cells[c];
    Hyperparams h = cfg.algorithms[cell.algorithm];
    h.seed = cfg.seed;
    const double started = now_s();
    try {
      RunRecord r = run_cell(subsets[cell.subset], h, cell.method, cfg.features, cfg.seed);
      r.started_s = started;
      r.finished_s = now_s();
      r.task = cfg.task;
      r.size_mb = cell.size_mb;
      r.seed = cfg.seed;
      r.performance = performance(r.quality.macro_f1, r.size_mb,
                                  std::max(charged_time(r, cfg.time_basis), kClockResolution));
      records[c] = std::move(r);
    } catch (const std::bad_alloc&) {
      failures[c] = "out of memory";
    } catch (const std::exception& e) {
      failures[c] = e.what();
    }
  };

  if (cfg.parallel) {
    std::atomic<std::size_t> next{0};
    const unsigned workers = std::max(1U, std::thread::hardware_concurrency());
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < cells.size(); c = next++) execute(c);
      });
  } else {
    for (std::size_t c = 0; c < cells.size(); ++c) execute(c);
  }

  ExperimentResult result;
  result.config = cfg;
  result.config.sizes_mb = sizes;
  result.machine = describe_machine();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (records[c]) {
      result.runs.push_back(std::move(*records[c]));
    } else {
      result.errors.push_back(
          {cfg.algorithms[cells[c].algorithm].algorithm, cells[c].size_mb, cells[c].method, failures[c]});
    }
  }
  analyze(result);
  return result;
}

void analyze(ExperimentResult& result) {
  result.frontiers.clear();
  result.curves.clear();
  const auto methods = result.config.eval_methods();
  if (methods.empty()) return;
  const std::string primary = methods.front().tag();
  const TimeBasis basis = result.config.time_basis;

  std::vector<double> sizes;
  for (const auto& r : result.runs)
    if (std::find(sizes.begin(), sizes.end(), r.size_mb) == sizes.end()) sizes.push_back(r.size_mb);
  std::sort(sizes.begin(), sizes.end());

  for (double s : sizes) {
    std::vector<PerformancePoint> points;
    for (const auto& r : result.runs)
      if (r.size_mb == s && r.eval_method.tag() == primary)
        points.push_back(PerformancePoint::make(std::string(to_string(r.algorithm)), r.quality.macro_f1, r.size_mb,
                                                std::max(charged_time(r, basis), kClockResolution)));
    if (!points.empty()) result.frontiers.push_back({s, primary, frontier(std::move(points))});
  }

  for (const auto& h : result.config.algorithms) {
    std::vector<RunRecord> runs;
    for (const auto& r : result.runs)
      if (r.algorithm == h.algorithm && r.eval_method.tag() == primary) runs.push_back(r);
    if (runs.empty()) continue;
    AlgorithmCurve curve{h.algorithm, primary, {}};
    for (const auto& r : runs) curve.points.emplace_back(r.size_mb, r.performance);
    std::sort(curve.points.begin(), curve.points.end());
    result.curves.push_back(std::move(curve));
  }
}

std::string describe_machine() {
  std::string model;
  std::ifstream cpuinfo("/proc/cpuinfo");
  for (std::string line; std::getline(cpuinfo, line);) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) model = line.substr(colon + 2);
      break;
    }
  }
  if (model.empty()) model = "unknown CPU";
  return model + ", " + std::to_string(std::thread::hardware_concurrency()) + " hardware threads";
}

}  // namespace tradebench
