#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the code path it is used to check.

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace oracle {

struct Metrics {
  std::vector<double> precision, recall, f1;
  double macro_p = 0, macro_r = 0, macro_f1 = 0, micro_f1 = 0, accuracy = 0;
};

// Per-definition metrics by counting directly over the label sequences.
inline Metrics metrics(const std::vector<std::string>& gold, const std::vector<std::string>& pred,
                       const std::vector<std::string>& classes) {
  Metrics m;
  double tp_sum = 0, fp_sum = 0, fn_sum = 0, correct = 0;
  for (const auto& c : classes) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t t = 0; t < gold.size(); ++t) {
      if (gold[t] == c && pred[t] == c) tp += 1;
      if (gold[t] != c && pred[t] == c) fp += 1;
      if (gold[t] == c && pred[t] != c) fn += 1;
    }
    const double p = tp + fp == 0 ? 0.0 : tp / (tp + fp);
    const double r = tp + fn == 0 ? 0.0 : tp / (tp + fn);
    const double f = p + r == 0 ? 0.0 : 2 * p * r / (p + r);
    m.precision.push_back(p);
    m.recall.push_back(r);
    m.f1.push_back(f);
    tp_sum += tp;
    fp_sum += fp;
    fn_sum += fn;
  }
  for (std::size_t t = 0; t < gold.size(); ++t) correct += gold[t] == pred[t] ? 1 : 0;
  const double k = static_cast<double>(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i) {
    m.macro_p += m.precision[i] / k;
    m.macro_r += m.recall[i] / k;
    m.macro_f1 += m.f1[i] / k;
  }
  const double mp = tp_sum + fp_sum == 0 ? 0.0 : tp_sum / (tp_sum + fp_sum);
  const double mr = tp_sum + fn_sum == 0 ? 0.0 : tp_sum / (tp_sum + fn_sum);
  m.micro_f1 = mp + mr == 0 ? 0.0 : 2 * mp * mr / (mp + mr);
  m.accuracy = gold.empty() ? 0.0 : correct / static_cast<double>(gold.size());
  return m;
}

struct Point {
  double time, quality;
};

// O(n^2) non-dominated filter.
inline std::vector<std::size_t> pareto(const std::vector<Point>& pts) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      const bool no_worse = pts[j].quality >= pts[i].quality && pts[j].time <= pts[i].time;
      const bool better = pts[j].quality > pts[i].quality || pts[j].time < pts[i].time;
      dominated = no_worse && better;
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

// Index maximizing quality - lambda*time; ties broken toward lower time then lower index.
inline double best_score(const std::vector<Point>& pts, double lambda) {
  double best = -INFINITY;
  for (const auto& p : pts) best = std::max(best, p.quality - lambda * p.time);
  return best;
}

// Break-even for A linear (c_a * n) against B linearithmic (c_b * n log2 n),
// solved over n_B: rate_a * (c_b n_B log2 n_B / c_a) = rate_b * n_B.
struct Crossover {
  double n_a, n_b, time;
};

inline Crossover linear_vs_nlogn(double c_a, double rate_a, double c_b, double rate_b) {
  const auto g = [&](double nb) { return rate_a * (c_b * nb * std::log2(nb) / c_a) - rate_b * nb; };
  double lo = 1.0 + 1e-12, hi = 2.0;
  while (g(hi) < 0) hi *= 2;
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0 ? lo : hi) = mid;
  }
  const double nb = 0.5 * (lo + hi);
  const double t = c_b * nb * std::log2(nb);
  return {t / c_a, nb, t};
}

// Gini impurity of a count map.
inline double gini(const std::map<int, double>& counts) {
  double n = 0, sq = 0;
  for (const auto& [k, c] : counts) n += c;
  if (n == 0) return 0;
  for (const auto& [k, c] : counts) sq += (c / n) * (c / n);
  return 1 - sq;
}

}  // namespace oracle
