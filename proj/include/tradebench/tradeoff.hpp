#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tradebench/eval.hpp"

namespace tradebench {

class TradeoffError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Quality times size over time. Throws when time_s <= 0.
double performance(double quality, double size_mb, double time_s);

enum class TimeBasis { Train, TrainPlusPredict };

std::string_view to_string(TimeBasis basis) noexcept;
TimeBasis parse_time_basis(std::string_view text);

/// Elapsed time charged to a run under `basis`.
double charged_time(const RunRecord& run, TimeBasis basis) noexcept;

struct PerformancePoint {
  std::string algorithm;
  double quality = 0.0;
  double size_mb = 0.0;
  double time_s = 0.0;
  double performance = 0.0;

  static PerformancePoint make(std::string algorithm, double quality, double size_mb, double time_s);
  static PerformancePoint from_run(const RunRecord& run, TimeBasis basis);
};

/// Points at one size plus the indices (into `points`) of the non-dominated
/// set and of the upper-left convex hull of (time, quality).
struct Frontier {
  std::vector<PerformancePoint> points;
  std::vector<std::size_t> pareto;  // ascending index order
  std::vector<std::size_t> hull;    // ascending time, strictly ascending quality

  bool on_pareto(std::size_t i) const;
  bool on_hull(std::size_t i) const;
};

/// True when `a` is at least as good as `b` in both coordinates and strictly better in one.
bool dominates(const PerformancePoint& a, const PerformancePoint& b) noexcept;

Frontier frontier(std::vector<PerformancePoint> points);

/// (size_mb, performance) sorted by size, for the runs of a single algorithm.
std::vector<std::pair<double, double>> performance_curve(std::span<const RunRecord> runs, TimeBasis basis);

enum class CostForm { Linear, Linearithmic, Quadratic };

std::string_view to_string(CostForm form) noexcept;

/// Cost c*f(n) of processing n units, and quality rate alpha + epsilon
/// (correct outputs per unit).
struct CostModel {
  CostForm form = CostForm::Linear;
  double c = 1.0;
  double alpha = 0.1;
  double epsilon = 0.0;

  double rate() const noexcept { return alpha + epsilon; }
  double cost(double n) const noexcept;
  /// Smallest n in the model's domain with cost(n) = time.
  double units_within(double time) const;
  void validate() const;

  /// Parses "linear:12", "linearithmic:2" or "quadratic:0.5".
  static CostModel parse(std::string_view text, double alpha, double epsilon);
};

struct CrossoverResult {
  bool exists = false;
  std::string reason;
  double time_budget = 0.0;
  double n_a = 0.0;
  double n_b = 0.0;
  /// For linear A against linearithmic B, n_B from the closed form.
  std::optional<double> closed_form_n_b;
};

/// Finds the time budget where the two models produce equal numbers of
/// correct outputs; beyond it the cheaper model produces more.
CrossoverResult break_even(const CostModel& a, const CostModel& b);

}  // namespace tradebench
