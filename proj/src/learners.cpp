#include "tradebench/learners.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>

#include "learners_internal.hpp"
#include "tradebench/rng.hpp"

namespace tradebench {

std::string_view to_string(Algorithm algorithm) noexcept {
  switch (algorithm) {
    case Algorithm::NB: return "NB";
    case Algorithm::LR: return "LR";
    case Algorithm::SVM: return "SVM";
    case Algorithm::KNN: return "KNN";
    case Algorithm::DT: return "DT";
    case Algorithm::RF: return "RF";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view tag) {
  std::string upper(tag);
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (Algorithm a : kAllAlgorithms)
    if (to_string(a) == upper) return a;
  throw LearnerError("unknown algorithm '" + std::string(tag) + "' (expected NB, LR, SVM, KNN, DT or RF)");
}

void Hyperparams::validate() const {
  if (!(l2_lambda > 0.0)) throw LearnerError("l2_lambda must be positive");
  if (epochs < 0) throw LearnerError("epochs must be non-negative");
  if (!(learning_rate0 > 0.0)) throw LearnerError("learning_rate0 must be positive");
  if (k_neighbors < 1) throw LearnerError("k_neighbors must be positive");
  if (max_depth < 1) throw LearnerError("max_depth must be positive");
  if (dt_max_features < 1) throw LearnerError("dt_max_features must be positive");
  if (num_trees < 1) throw LearnerError("num_trees must be positive");
  if (!(smoothing > 0.0)) throw LearnerError("smoothing must be positive");
  if (rf_split_features < 0) throw LearnerError("rf_split_features must be non-negative");
}

std::uint32_t argmax_lowest(std::span<const double> scores) noexcept {
  std::uint32_t best = 0;
  for (std::uint32_t c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[best]) best = c;
  return best;
}

namespace {

using detail::KnnParams;
using detail::LinearParams;
using detail::NaiveBayesParams;

detail::NaiveBayesParams fit_naive_bayes(std::span<const SparseVector> X, std::span<const std::uint32_t> y,
                                         std::size_t num_classes, std::size_t dim, double smoothing) {
  std::vector<double> mass(num_classes * dim, 0.0);
  std::vector<double> class_docs(num_classes, 0.0);
  for (std::size_t i = 0; i < X.size(); ++i) {
    class_docs[y[i]] += 1.0;
    double* row = mass.data() + y[i] * dim;
    for (const auto& e : X[i].entries) row[e.index] += e.value;
  }

  NaiveBayesParams p;
  p.log_prior.resize(num_classes);
  p.log_likelihood.resize(num_classes * dim);
  const double n = static_cast<double>(X.size());
  for (std::size_t c = 0; c < num_classes; ++c) {
    p.log_prior[c] = std::log(class_docs[c] / n);
    const double* row = mass.data() + c * dim;
    const double total = std::accumulate(row, row + dim, 0.0);
    const double log_denominator = std::log(total + smoothing * static_cast<double>(dim));
    for (std::size_t t = 0; t < dim; ++t)
      p.log_likelihood[c * dim + t] = std::log(row[t] + smoothing) - log_denominator;
  }
  return p;
}

// Weight vector stored as scale * v so the L2 shrink step is O(1).
class ScaledVector {
public:
  explicit ScaledVector(std::size_t dim) : v_(dim, 0.0) {}

  double dot(const SparseVector& x) const noexcept {
    double s = 0.0;
    for (const auto& e : x.entries) s += v_[e.index] * e.value;
    return s * scale_;
  }
  double bias() const noexcept { return bias_v_ * scale_; }

  void shrink(double factor) {
    if (factor <= 0.0) {
      std::fill(v_.begin(), v_.end(), 0.0);
      bias_v_ = 0.0;
      scale_ = 1.0;
      return;
    }
    scale_ *= factor;
    if (scale_ < 1e-9) renormalize();
  }
  void add(const SparseVector& x, double step, double bias_step) {
    const double k = step / scale_;
    for (const auto& e : x.entries) v_[e.index] += k * e.value;
    bias_v_ += bias_step / scale_;
  }
  void write(double* out, double& bias) const {
    for (std::size_t t = 0; t < v_.size(); ++t) out[t] = v_[t] * scale_;
    bias = bias_v_ * scale_;
  }

private:
  void renormalize() {
    for (double& w : v_) w *= scale_;
    bias_v_ *= scale_;
    scale_ = 1.0;
  }

  std::vector<double> v_;
  double bias_v_ = 0.0;
  double scale_ = 1.0;
};

double sigmoid(double z) noexcept {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

LinearParams fit_linear(std::span<const SparseVector> X, std::span<const std::uint32_t> y, std::size_t num_classes,
                        std::size_t dim, const Hyperparams& h) {
  const bool svm = h.algorithm == Algorithm::SVM;
  std::vector<ScaledVector> w(num_classes, ScaledVector(dim));
  // Unregularized intercepts for LR; SVM folds its intercept into the
  // regularized weight vector as a constant feature.
  std::vector<double> lr_bias(num_classes, 0.0);

  std::vector<std::size_t> order(X.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(h.seed);
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < h.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (std::size_t i : order) {
      const auto& x = X[i];
      if (svm) {
        ++t;
        const double eta = 1.0 / (h.l2_lambda * static_cast<double>(t));
        for (std::size_t c = 0; c < num_classes; ++c) {
          const double target = y[i] == c ? 1.0 : -1.0;
          const double margin = target * (w[c].dot(x) + w[c].bias());
          w[c].shrink(1.0 - eta * h.l2_lambda);
          if (margin < 1.0) w[c].add(x, eta * target, eta * target);
        }
      } else {
        const double eta = h.learning_rate0 / (1.0 + h.learning_rate0 * h.l2_lambda * static_cast<double>(t));
        for (std::size_t c = 0; c < num_classes; ++c) {
          const double target = y[i] == c ? 1.0 : 0.0;
          const double g = target - sigmoid(w[c].dot(x) + lr_bias[c]);
          w[c].shrink(1.0 - eta * h.l2_lambda);
          w[c].add(x, eta * g, 0.0);
          lr_bias[c] += eta * g;
        }
        ++t;
      }
    }
  }

  LinearParams p;
  p.weights.resize(num_classes * dim);
  p.bias.resize(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    double folded = 0.0;
    w[c].write(p.weights.data() + c * dim, folded);
    p.bias[c] = svm ? folded : lr_bias[c];
  }
  return p;
}

KnnParams fit_knn(std::span<const SparseVector> X, std::span<const std::uint32_t> y, std::size_t dim, int k) {
  KnnParams p;
  p.k = k;
  p.postings.resize(dim);
  p.inv_norm.resize(X.size());
  p.labels.assign(y.begin(), y.end());
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double n = X[i].norm();
    p.inv_norm[i] = n > 0.0 ? 1.0 / n : 0.0;
    for (const auto& e : X[i].entries) p.postings[e.index].push_back({static_cast<std::uint32_t>(i), e.value});
  }
  return p;
}

std::vector<std::uint32_t> predict_knn(const KnnParams& p, std::span<const SparseVector> X, std::size_t num_classes) {
  const std::size_t n = p.labels.size();
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(p.k), n);
  std::vector<double> dots(n, 0.0);
  std::vector<std::uint32_t> order(n);
  std::vector<double> sims(n);
  std::vector<double> votes(num_classes);
  std::vector<std::uint32_t> out;
  out.reserve(X.size());

  // Higher similarity first, then lower training index.
  const auto nearer = [&](std::uint32_t a, std::uint32_t b) {
    return sims[a] != sims[b] ? sims[a] > sims[b] : a < b;
  };

  for (const auto& x : X) {
    std::fill(dots.begin(), dots.end(), 0.0);
    for (const auto& e : x.entries)
      for (const auto& post : p.postings[e.index]) dots[post.doc] += e.value * post.value;
    const double qn = x.norm();
    const double q_inv = qn > 0.0 ? 1.0 / qn : 0.0;
    for (std::size_t i = 0; i < n; ++i) sims[i] = dots[i] * q_inv * p.inv_norm[i];

    std::iota(order.begin(), order.end(), 0U);
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1), order.end(), nearer);

    std::fill(votes.begin(), votes.end(), 0.0);
    for (std::size_t j = 0; j < k; ++j) votes[p.labels[order[j]]] += 1.0;
    out.push_back(argmax_lowest(votes));
  }
  return out;
}

}  // namespace

std::uint32_t detail::Tree::predict(const SparseVector& x) const {
  std::int32_t at = 0;
  while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
    const auto& node = nodes[static_cast<std::size_t>(at)];
    const auto f = static_cast<std::uint32_t>(node.feature);
    const auto it = std::lower_bound(x.entries.begin(), x.entries.end(), f,
                                     [](const SparseEntry& e, std::uint32_t idx) { return e.index < idx; });
    const double value = (it != x.entries.end() && it->index == f) ? it->value : 0.0;
    at = value > node.threshold ? node.right : node.left;
  }
  return nodes[static_cast<std::size_t>(at)].label;
}

TrainedModel train(std::span<const SparseVector> X, std::span<const std::string> y, const Hyperparams& h) {
  h.validate();
  if (X.empty()) throw LearnerError("train: no training examples");
  if (X.size() != y.size()) throw LearnerError("train: vectors and labels differ in length");

  TrainedModel model;
  model.algorithm_ = h.algorithm;
  model.dimension_ = X.front().dimension;
  for (const auto& x : X)
    if (x.dimension != model.dimension_) throw LearnerError("train: vectors differ in dimension");

  std::map<std::string, std::uint32_t> index;
  for (const auto& label : y) index.emplace(label, 0);
  if (index.size() < 2) throw LearnerError("train: at least 2 classes are required");
  for (auto& [label, i] : index) {
    i = static_cast<std::uint32_t>(model.classes_.size());
    model.classes_.push_back(label);
  }
  std::vector<std::uint32_t> yi;
  yi.reserve(y.size());
  for (const auto& label : y) yi.push_back(index.at(label));

  const std::size_t num_classes = model.classes_.size();
  const std::size_t dim = model.dimension_;
  switch (h.algorithm) {
    case Algorithm::NB: model.params_ = fit_naive_bayes(X, yi, num_classes, dim, h.smoothing); break;
    case Algorithm::LR:
    case Algorithm::SVM: model.params_ = fit_linear(X, yi, num_classes, dim, h); break;
    case Algorithm::KNN: model.params_ = fit_knn(X, yi, dim, h.k_neighbors); break;
    case Algorithm::DT: model.params_ = detail::build_tree(X, yi, num_classes, h); break;
    case Algorithm::RF: model.params_ = detail::build_forest(X, yi, num_classes, h); break;
  }
  return model;
}

void TrainedModel::check_dimension(const SparseVector& x) const {
  if (x.dimension != dimension_)
    throw LearnerError("predict: vector dimension " + std::to_string(x.dimension) + " does not match model dimension " +
                       std::to_string(dimension_));
}

std::vector<double> TrainedModel::scores(const SparseVector& x) const {
  check_dimension(x);
  const std::size_t num_classes = classes_.size();
  std::vector<double> out(num_classes);
  if (const auto* nb = naive_bayes()) {
    for (std::size_t c = 0; c < num_classes; ++c) {
      double s = nb->log_prior[c];
      const double* row = nb->log_likelihood.data() + c * dimension_;
      for (const auto& e : x.entries) s += e.value * row[e.index];
      out[c] = s;
    }
  } else if (const auto* lin = linear()) {
    for (std::size_t c = 0; c < num_classes; ++c) {
      double s = lin->bias[c];
      const double* row = lin->weights.data() + c * dimension_;
      for (const auto& e : x.entries) s += e.value * row[e.index];
      out[c] = s;
    }
  } else {
    throw LearnerError("scores: only NB, LR and SVM expose decision scores");
  }
  return out;
}

std::vector<std::uint32_t> TrainedModel::predict_indices(std::span<const SparseVector> X) const {
  for (const auto& x : X) check_dimension(x);
  std::vector<std::uint32_t> out;
  out.reserve(X.size());
  if (const auto* knn = std::get_if<detail::KnnParams>(&params_)) return predict_knn(*knn, X, classes_.size());
  if (const auto* t = tree()) {
    for (const auto& x : X) out.push_back(t->predict(x));
    return out;
  }
  if (const auto* f = forest()) {
    std::vector<double> votes(classes_.size());
    for (const auto& x : X) {
      std::fill(votes.begin(), votes.end(), 0.0);
      for (const auto& member : f->trees) votes[member.predict(x)] += 1.0;
      out.push_back(argmax_lowest(votes));
    }
    return out;
  }
  for (const auto& x : X) out.push_back(argmax_lowest(scores(x)));
  return out;
}

std::vector<std::string> TrainedModel::predict(std::span<const SparseVector> X) const {
  std::vector<std::string> out;
  out.reserve(X.size());
  for (std::uint32_t c : predict_indices(X)) out.push_back(classes_[c]);
  return out;
}

}  // namespace tradebench
