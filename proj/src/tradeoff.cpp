#include "tradebench/tradeoff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tradebench {

double performance(double quality, double size_mb, double time_s) {
  if (!(time_s > 0.0)) throw TradeoffError("performance: time must be positive");
  return quality * size_mb / time_s;
}

std::string_view to_string(TimeBasis basis) noexcept {
  return basis == TimeBasis::Train ? "train" : "train_plus_predict";
}

TimeBasis parse_time_basis(std::string_view text) {
  if (text == "train") return TimeBasis::Train;
  if (text == "train_plus_predict" || text == "train+predict") return TimeBasis::TrainPlusPredict;
  throw TradeoffError("unknown time basis '" + std::string(text) + "' (expected train or train_plus_predict)");
}

double charged_time(const RunRecord& run, TimeBasis basis) noexcept {
  return basis == TimeBasis::Train ? run.train_s : run.train_s + run.predict_s;
}

PerformancePoint PerformancePoint::make(std::string algorithm, double quality, double size_mb, double time_s) {
  return {std::move(algorithm), quality, size_mb, time_s, tradebench::performance(quality, size_mb, time_s)};
}

PerformancePoint PerformancePoint::from_run(const RunRecord& run, TimeBasis basis) {
  return make(std::string(to_string(run.algorithm)), run.quality.macro_f1, run.size_mb, charged_time(run, basis));
}

bool Frontier::on_pareto(std::size_t i) const { return std::find(pareto.begin(), pareto.end(), i) != pareto.end(); }

bool Frontier::on_hull(std::size_t i) const { return std::find(hull.begin(), hull.end(), i) != hull.end(); }

bool dominates(const PerformancePoint& a, const PerformancePoint& b) noexcept {
  return a.quality >= b.quality && a.time_s <= b.time_s && (a.quality > b.quality || a.time_s < b.time_s);
}

Frontier frontier(std::vector<PerformancePoint> points) {
  if (points.empty()) throw TradeoffError("frontier: no points");
  for (const auto& p : points)
    if (p.size_mb != points.front().size_mb) throw TradeoffError("frontier: points have mixed sizes");

  Frontier f;
  f.points = std::move(points);
  const auto& pts = f.points;

  // Sweep by ascending time (then descending quality); a point survives when
  // its quality beats everything strictly faster, or it ties the incumbent exactly.
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pts[a].time_s != pts[b].time_s) return pts[a].time_s < pts[b].time_s;
    return pts[a].quality > pts[b].quality;
  });
  bool have_best = false;
  double best_q = 0.0, best_t = 0.0;
  for (std::size_t i : order) {
    const auto& p = pts[i];
    if (!have_best || p.quality > best_q) {
      f.pareto.push_back(i);
      best_q = p.quality;
      best_t = p.time_s;
      have_best = true;
    } else if (p.quality == best_q && p.time_s == best_t) {
      f.pareto.push_back(i);
    }
  }
  std::sort(f.pareto.begin(), f.pareto.end());

  // Upper hull of the Pareto staircase, duplicates collapsed to the first index.
  std::vector<std::size_t> chain;
  for (std::size_t i : order) {
    if (!f.on_pareto(i)) continue;
    if (!chain.empty() && pts[chain.back()].time_s == pts[i].time_s && pts[chain.back()].quality == pts[i].quality)
      continue;
    while (chain.size() >= 2) {
      const auto& o = pts[chain[chain.size() - 2]];
      const auto& a = pts[chain.back()];
      const auto& b = pts[i];
      const double lhs = (a.time_s - o.time_s) * (b.quality - o.quality);
      const double rhs = (a.quality - o.quality) * (b.time_s - o.time_s);
      // Collinear within rounding counts as not strictly convex.
      if (lhs - rhs >= -1e-12 * (std::abs(lhs) + std::abs(rhs)))
        chain.pop_back();
      else
        break;
    }
    chain.push_back(i);
  }
  f.hull = std::move(chain);
  return f;
}

std::vector<std::pair<double, double>> performance_curve(std::span<const RunRecord> runs, TimeBasis basis) {
  if (runs.empty()) throw TradeoffError("performance_curve: no runs");
  std::vector<std::pair<double, double>> curve;
  for (const auto& r : runs) {
    if (r.algorithm != runs.front().algorithm) throw TradeoffError("performance_curve: runs mix algorithms");
    curve.emplace_back(r.size_mb, performance(r.quality.macro_f1, r.size_mb, charged_time(r, basis)));
  }
  std::sort(curve.begin(), curve.end());
  for (std::size_t i = 1; i < curve.size(); ++i)
    if (curve[i].first == curve[i - 1].first) throw TradeoffError("performance_curve: duplicate size");
  return curve;
}

std::string_view to_string(CostForm form) noexcept {
  switch (form) {
    case CostForm::Linear: return "linear";
    case CostForm::Linearithmic: return "linearithmic";
    case CostForm::Quadratic: return "quadratic";
  }
  return "?";
}

double CostModel::cost(double n) const noexcept {
  switch (form) {
    case CostForm::Linear: return c * n;
    case CostForm::Linearithmic: return c * n * std::log2(n);
    case CostForm::Quadratic: return c * n * n;
  }
  return 0.0;
}

double CostModel::units_within(double time) const {
  if (time < 0.0) throw TradeoffError("negative time budget");
  switch (form) {
    case CostForm::Linear: return time / c;
    case CostForm::Quadratic: return std::sqrt(time / c);
    case CostForm::Linearithmic: break;
  }
  // n*log2(n) is increasing on n >= 1; n >= 2 gives cost >= c*n.
  double lo = 1.0;
  double hi = std::max(2.0, time / c);
  while (true) {
    const double mid = lo + (hi - lo) / 2.0;
    if (mid <= lo || mid >= hi) break;
    (cost(mid) < time ? lo : hi) = mid;
  }
  return std::abs(cost(lo) - time) <= std::abs(cost(hi) - time) ? lo : hi;
}

void CostModel::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw TradeoffError("cost model: constant must be positive");
  if (!(alpha > 0.0)) throw TradeoffError("cost model: alpha must be positive");
  if (!(epsilon >= 0.0)) throw TradeoffError("cost model: epsilon must be non-negative");
  if (alpha + epsilon > 1.0) throw TradeoffError("cost model: alpha + epsilon must not exceed 1");
}

CostModel CostModel::parse(std::string_view text, double alpha, double epsilon) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw TradeoffError("cost model '" + std::string(text) + "' needs form:constant");
  const auto form = text.substr(0, colon);
  CostModel m;
  if (form == "linear")
    m.form = CostForm::Linear;
  else if (form == "linearithmic" || form == "nlogn")
    m.form = CostForm::Linearithmic;
  else if (form == "quadratic")
    m.form = CostForm::Quadratic;
  else
    throw TradeoffError("unknown cost form '" + std::string(form) + "'");
  try {
    std::size_t used = 0;
    const std::string number(text.substr(colon + 1));
    m.c = std::stod(number, &used);
    if (used != number.size()) throw TradeoffError("trailing characters");
  } catch (const std::exception&) {
    throw TradeoffError("bad cost constant in '" + std::string(text) + "'");
  }
  m.alpha = alpha;
  m.epsilon = epsilon;
  m.validate();
  return m;
}

CrossoverResult break_even(const CostModel& a, const CostModel& b) {
  a.validate();
  b.validate();
  CrossoverResult result;
  if (a.form == b.form && a.c == b.c && a.rate() == b.rate()) {
    result.reason = "equal everywhere";
    return result;
  }

  const auto gap = [&](double t) { return a.rate() * a.units_within(t) - b.rate() * b.units_within(t); };

  // First sign change over a geometric scan of budgets, then bisection.
  double lo = 0.0, hi = 0.0;
  bool bracketed = false;
  double prev_t = std::ldexp(1.0, -40);
  double prev_gap = gap(prev_t);
  for (int e = -39; e <= 1000 && !bracketed; ++e) {
    const double t = std::ldexp(1.0, e);
    const double g = gap(t);
    if (g == 0.0 || (g > 0.0) != (prev_gap > 0.0)) {
      lo = prev_t;
      hi = t;
      bracketed = true;
    }
    prev_t = t;
    prev_gap = g;
  }
  if (!bracketed) {
    result.reason = prev_gap > 0.0 ? "model A produces more correct outputs at every budget"
                                   : "model B produces more correct outputs at every budget";
    return result;
  }

  const bool lo_positive = gap(lo) > 0.0;
  while (true) {
    const double mid = lo + (hi - lo) / 2.0;
    if (mid <= lo || mid >= hi) break;
    const double g = gap(mid);
    if (g == 0.0) {
      lo = hi = mid;
      break;
    }
    ((g > 0.0) == lo_positive ? lo : hi) = mid;
  }
  const double t = std::abs(gap(lo)) <= std::abs(gap(hi)) ? lo : hi;

  result.exists = true;
  result.time_budget = t;
  result.n_a = a.units_within(t);
  result.n_b = b.units_within(t);
  if (a.form == CostForm::Linear && b.form == CostForm::Linearithmic)
    result.closed_form_n_b = std::exp2((a.c / b.c) * (b.rate() / a.rate()));
  return result;
}

}  // namespace tradebench
