#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "learners_internal.hpp"
#include "tradebench/rng.hpp"

namespace tradebench::detail {

namespace {

// Up to `cap` features with the highest document frequency, ties to the lower index.
std::vector<std::uint32_t> top_features_by_df(std::span<const SparseVector> X, std::size_t cap) {
  const std::size_t dim = X.empty() ? 0 : X.front().dimension;
  std::vector<std::size_t> df(dim, 0);
  for (const auto& x : X)
    for (const auto& e : x.entries) ++df[e.index];
  std::vector<std::uint32_t> features;
  for (std::uint32_t f = 0; f < dim; ++f)
    if (df[f] > 0) features.push_back(f);
  std::stable_sort(features.begin(), features.end(), [&](std::uint32_t a, std::uint32_t b) { return df[a] > df[b]; });
  if (features.size() > cap) features.resize(cap);
  std::sort(features.begin(), features.end());
  return features;
}

double gini(std::span<const double> counts, double n) noexcept {
  if (n <= 0.0) return 0.0;
  double sum_sq = 0.0;
  for (double c : counts) sum_sq += c * c;
  return 1.0 - sum_sq / (n * n);
}

double value_at(const SparseVector& x, std::uint32_t f) noexcept {
  const auto it = std::lower_bound(x.entries.begin(), x.entries.end(), f,
                                   [](const SparseEntry& e, std::uint32_t idx) { return e.index < idx; });
  return (it != x.entries.end() && it->index == f) ? it->value : 0.0;
}

class TreeBuilder {
public:
  TreeBuilder(std::span<const SparseVector> X, std::span<const std::uint32_t> y, std::size_t num_classes,
              const Hyperparams& h, std::vector<std::uint32_t> candidates, std::size_t per_split, SplitMix64* rng)
      : X_(X),
        y_(y),
        num_classes_(num_classes),
        max_depth_(h.max_depth),
        candidates_(std::move(candidates)),
        per_split_(per_split),
        rng_(rng),
        slot_of_(X.empty() ? 0 : X.front().dimension, -1) {}

  Tree build(std::vector<std::uint32_t> samples) {
    tree_.nodes.clear();
    grow(std::move(samples), 0);
    return std::move(tree_);
  }

private:
  struct Split {
    std::uint32_t feature = 0;
    double threshold = 0.0;
    double impurity = 0.0;
  };
  struct Item {
    double value;
    std::uint32_t label;
  };

  std::int32_t grow(std::vector<std::uint32_t> samples, int depth) {
    std::vector<double> counts(num_classes_, 0.0);
    for (std::uint32_t s : samples) counts[y_[s]] += 1.0;
    const auto node_id = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.push_back({});
    tree_.nodes.back().label = argmax_lowest(counts);

    const auto nonzero = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; });
    if (depth >= max_depth_ || nonzero <= 1 || samples.size() < 2) return node_id;

    const auto split = best_split(samples, counts);
    if (!split) return node_id;

    std::vector<std::uint32_t> left, right;
    for (std::uint32_t s : samples) (value_at(X_[s], split->feature) > split->threshold ? right : left).push_back(s);
    samples.clear();
    samples.shrink_to_fit();

    const auto l = grow(std::move(left), depth + 1);
    const auto r = grow(std::move(right), depth + 1);
    auto& node = tree_.nodes[static_cast<std::size_t>(node_id)];
    node.feature = static_cast<std::int32_t>(split->feature);
    node.threshold = split->threshold;
    node.left = l;
    node.right = r;
    return node_id;
  }

  std::vector<std::uint32_t> features_for_split() {
    if (rng_ == nullptr || per_split_ >= candidates_.size()) return candidates_;
    std::vector<std::uint32_t> pool = candidates_;
    for (std::size_t i = 0; i < per_split_; ++i) {
      const auto j = i + static_cast<std::size_t>(rng_->below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(per_split_);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

  std::optional<Split> best_split(const std::vector<std::uint32_t>& samples, const std::vector<double>& counts) {
    const auto features = features_for_split();
    std::vector<std::vector<Item>> buckets(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) slot_of_[features[i]] = static_cast<std::int32_t>(i);
    for (std::uint32_t s : samples)
      for (const auto& e : X_[s].entries)
        if (const auto slot = slot_of_[e.index]; slot >= 0)
          buckets[static_cast<std::size_t>(slot)].push_back({e.value, y_[s]});
    for (std::uint32_t f : features) slot_of_[f] = -1;

    const double n = static_cast<double>(samples.size());
    std::optional<Split> best;
    std::vector<double> left(num_classes_), right(num_classes_), zeros(num_classes_);
    for (std::size_t i = 0; i < features.size(); ++i) {
      auto& items = buckets[i];
      std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.value < b.value; });

      zeros = counts;
      for (const auto& it : items) zeros[it.label] -= 1.0;
      const double zero_n = n - static_cast<double>(items.size());

      // Walk distinct values in ascending order, the implicit zero group merged in.
      std::fill(left.begin(), left.end(), 0.0);
      double left_n = 0.0;
      bool zeros_done = zero_n <= 0.0;
      bool have_prev = false;
      double prev = 0.0;
      std::size_t k = 0;
      const auto consider = [&](double next) {
        if (!have_prev) return;
        double threshold = prev + (next - prev) / 2.0;
        if (!(threshold < next)) threshold = prev;
        const double right_n = n - left_n;
        for (std::size_t c = 0; c < num_classes_; ++c) right[c] = counts[c] - left[c];
        const double impurity = (left_n * gini(left, left_n) + right_n * gini(right, right_n)) / n;
        if (!best || impurity < best->impurity) best = Split{features[i], threshold, impurity};
      };
      while (k < items.size() || !zeros_done) {
        double value;
        if (!zeros_done && (k >= items.size() || items[k].value >= 0.0)) {
          value = 0.0;
          consider(value);
          for (std::size_t c = 0; c < num_classes_; ++c) left[c] += zeros[c];
          left_n += zero_n;
          zeros_done = true;
          // Explicit zeros are not stored in sparse vectors, but a caller may pass them.
          while (k < items.size() && items[k].value == 0.0) {
            left[items[k].label] += 1.0;
            left_n += 1.0;
            ++k;
          }
        } else {
          value = items[k].value;
          consider(value);
          while (k < items.size() && items[k].value == value) {
            left[items[k].label] += 1.0;
            left_n += 1.0;
            ++k;
          }
        }
        prev = value;
        have_prev = true;
      }
    }
    return best;
  }

  std::span<const SparseVector> X_;
  std::span<const std::uint32_t> y_;
  std::size_t num_classes_;
  int max_depth_;
  std::vector<std::uint32_t> candidates_;
  std::size_t per_split_;
  SplitMix64* rng_;
  std::vector<std::int32_t> slot_of_;
  Tree tree_;
};

}  // namespace

Tree build_tree(std::span<const SparseVector> X, std::span<const std::uint32_t> y, std::size_t num_classes,
                const Hyperparams& h) {
  auto candidates = top_features_by_df(X, static_cast<std::size_t>(h.dt_max_features));
  TreeBuilder builder(X, y, num_classes, h, std::move(candidates), 0, nullptr);
  std::vector<std::uint32_t> samples(X.size());
  std::iota(samples.begin(), samples.end(), 0U);
  return builder.build(std::move(samples));
}

ForestParams build_forest(std::span<const SparseVector> X, std::span<const std::uint32_t> y, std::size_t num_classes,
                          const Hyperparams& h) {
  auto candidates = top_features_by_df(X, static_cast<std::size_t>(h.dt_max_features));
  const std::size_t per_split =
      h.rf_split_features > 0
          ? static_cast<std::size_t>(h.rf_split_features)
          : std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(h.dt_max_features)))));

  SplitMix64 rng(h.seed);
  TreeBuilder builder(X, y, num_classes, h, std::move(candidates), per_split, &rng);
  ForestParams forest;
  for (int t = 0; t < h.num_trees; ++t) {
    std::vector<std::uint32_t> samples(X.size());
    if (h.rf_bootstrap) {
      for (auto& s : samples) s = static_cast<std::uint32_t>(rng.below(X.size()));
    } else {
      std::iota(samples.begin(), samples.end(), 0U);
    }
    forest.trees.push_back(builder.build(std::move(samples)));
  }
  return forest;
}

}  // namespace tradebench::detail
