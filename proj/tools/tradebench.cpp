// Command-line entry: run experiments, generate synthetic corpora, solve break-even points.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tradebench/corpus.hpp"
#include "tradebench/harness.hpp"
#include "tradebench/tradeoff.hpp"

namespace {

using namespace tradebench;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

struct RunOptions {
  std::string config;
  std::string sizes;
  std::string algos;
  std::optional<std::uint64_t> seed;
  std::string time_basis;
  std::string out;
  bool parallel = false;
};

int do_run(const RunOptions& o) {
  ExperimentConfig cfg = load_config(o.config);
  if (!o.sizes.empty()) {
    cfg.sizes_mb.clear();
    for (const auto& s : split_list(o.sizes)) cfg.sizes_mb.push_back(std::stod(s));
  }
  if (!o.algos.empty()) {
    std::vector<Hyperparams> chosen;
    for (const auto& tag : split_list(o.algos)) {
      Hyperparams h;
      h.algorithm = parse_algorithm(tag);
      for (const auto& existing : cfg.algorithms)
        if (existing.algorithm == h.algorithm) h = existing;
      chosen.push_back(h);
    }
    cfg.algorithms = std::move(chosen);
  }
  if (o.seed) {
    // A synthetic corpus without an explicit seed follows the global one.
    if (cfg.synthetic && cfg.synthetic->seed == cfg.seed) cfg.synthetic->seed = *o.seed;
    cfg.seed = *o.seed;
  }
  if (!o.time_basis.empty()) cfg.time_basis = parse_time_basis(o.time_basis);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.parallel) cfg.parallel = true;

  const ExperimentResult result = run_experiment(cfg);
  const auto files = emit_reports(result, cfg.output_dir);
  for (const auto& r : result.runs)
    std::cout << to_string(r.algorithm) << "\t" << format_g6(r.size_mb) << " MB\t" << r.eval_method.tag()
              << "\tmacroF=" << format_g6(r.quality.macro_f1) << "\ttrain=" << format_g6(r.train_s)
              << "s\tperf=" << format_g6(r.performance) << "\n";
  for (const auto& e : result.errors)
    std::cout << to_string(e.algorithm) << "\t" << format_g6(e.size_mb) << " MB\t" << e.eval_method.tag()
              << "\tERROR: " << e.message << "\n";
  std::cout << "wrote " << files.runs_csv.string() << ", " << files.result_json.string() << " and "
            << files.plots.size() << " plots\n";
  return 0;
}

struct SynthOptions {
  SyntheticSpec spec;
  double size_mb = 1.0;
  std::string out;
};

int do_synth(const SynthOptions& o) {
  SyntheticSpec spec = o.spec;
  spec.target_bytes = static_cast<std::size_t>(std::ceil(o.size_mb * kBytesPerMegabyte));
  const Corpus corpus = generate_synthetic(spec);
  if (o.out.empty() || o.out == "-")
    corpus.write_tsv(std::cout);
  else
    corpus.save(o.out);
  return 0;
}

struct BreakEvenOptions {
  double alpha = 0.1;
  double epsilon = 0.05;
  std::string cost_a = "linear:12";
  std::string cost_b = "linearithmic:2";
};

int do_breakeven(const BreakEvenOptions& o) {
  const CostModel a = CostModel::parse(o.cost_a, o.alpha, 0.0);
  const CostModel b = CostModel::parse(o.cost_b, o.alpha, o.epsilon);
  const CrossoverResult r = break_even(a, b);
  nlohmann::json out = {{"exists", r.exists}};
  if (r.exists) {
    out["T"] = r.time_budget;
    out["n_A"] = r.n_a;
    out["n_B"] = r.n_b;
    out["correct_A"] = a.rate() * r.n_a;
    out["correct_B"] = b.rate() * r.n_b;
    if (r.closed_form_n_b) out["closed_form_n_B"] = *r.closed_form_n_b;
  } else {
    out["reason"] = r.reason;
  }
  out["model_A"] = {{"form", std::string(to_string(a.form))}, {"c", a.c}, {"rate", a.rate()}};
  out["model_B"] = {{"form", std::string(to_string(b.form))}, {"c", b.c}, {"rate", b.rate()}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Text classifier quality/time trade-off benchmark"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run the experiment matrix and write reports");
  run_cmd->add_option("--config", run.config, "JSON experiment config")->required();
  run_cmd->add_option("--sizes", run.sizes, "Comma-separated sizes in MB");
  run_cmd->add_option("--algos", run.algos, "Comma-separated algorithm tags (NB,LR,SVM,KNN,DT,RF)");
  run_cmd->add_option("--seed", run.seed, "Seed for every random choice");
  run_cmd->add_option("--time-basis", run.time_basis, "train or train_plus_predict");
  run_cmd->add_option("--out", run.out, "Output directory");
  run_cmd->add_flag("--parallel", run.parallel, "Run cells concurrently (timings become contended)");

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic TSV corpus");
  synth_cmd->add_option("--out", synth.out, "Output file ('-' for stdout)");
  synth_cmd->add_option("--classes", synth.spec.num_classes, "Number of classes")->capture_default_str();
  synth_cmd->add_option("--vocab-per-class", synth.spec.vocab_per_class, "Class-specific vocabulary size")
      ->capture_default_str();
  synth_cmd->add_option("--shared-vocab", synth.spec.shared_vocab, "Shared vocabulary size")->capture_default_str();
  synth_cmd->add_option("--signal-prob", synth.spec.signal_prob, "Probability of a class-specific token")
      ->capture_default_str();
  synth_cmd->add_option("--min-len", synth.spec.doc_len_min, "Minimum tokens per document")->capture_default_str();
  synth_cmd->add_option("--max-len", synth.spec.doc_len_max, "Maximum tokens per document")->capture_default_str();
  synth_cmd->add_option("--size-mb", synth.size_mb, "Target corpus size in MB")->capture_default_str();
  synth_cmd->add_option("--seed", synth.spec.seed, "Generator seed")->capture_default_str();

  BreakEvenOptions be;
  auto* be_cmd = app.add_subcommand("breakeven", "Solve the break-even point of two cost models");
  be_cmd->add_option("--alpha", be.alpha, "Quality rate of model A")->capture_default_str();
  be_cmd->add_option("--epsilon", be.epsilon, "Extra quality rate of model B")->capture_default_str();
  be_cmd->add_option("--cost-a", be.cost_a, "Cost of A as form:constant")->capture_default_str();
  be_cmd->add_option("--cost-b", be.cost_b, "Cost of B as form:constant")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run_cmd) return do_run(run);
    if (*synth_cmd) return do_synth(synth);
    if (*be_cmd) return do_breakeven(be);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
