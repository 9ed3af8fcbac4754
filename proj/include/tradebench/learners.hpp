#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tradebench/features.hpp"

namespace tradebench {

class LearnerError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Algorithm { NB, LR, SVM, KNN, DT, RF };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::NB,  Algorithm::LR, Algorithm::SVM,
                                               Algorithm::KNN, Algorithm::DT, Algorithm::RF};

std::string_view to_string(Algorithm algorithm) noexcept;
/// Accepts the upper-case tags ("NB", "LR", ...), case-insensitively.
Algorithm parse_algorithm(std::string_view tag);

struct Hyperparams {
  Algorithm algorithm = Algorithm::NB;
  double l2_lambda = 1e-4;       // LR, SVM
  int epochs = 5;                // LR, SVM
  double learning_rate0 = 0.1;   // LR
  int k_neighbors = 5;           // KNN
  int max_depth = 20;            // DT, RF
  int dt_max_features = 1000;    // DT, RF: candidate features by document frequency
  int num_trees = 10;            // RF
  double smoothing = 1.0;        // NB
  std::uint64_t seed = 0;
  bool rf_bootstrap = true;      // RF
  int rf_split_features = 0;     // RF: features drawn per split; 0 means sqrt(dt_max_features)

  void validate() const;
};

namespace detail {

struct NaiveBayesParams {
  std::vector<double> log_prior;       // [class]
  std::vector<double> log_likelihood;  // [class * dimension + feature]
};

struct LinearParams {
  std::vector<double> weights;  // [class * dimension + feature]
  std::vector<double> bias;     // [class]
};

struct KnnParams {
  struct Posting {
    std::uint32_t doc;
    double value;
  };
  std::vector<std::vector<Posting>> postings;  // [feature]
  std::vector<double> inv_norm;                // [doc], 0 for empty vectors
  std::vector<std::uint32_t> labels;           // [doc]
  int k = 5;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // go right when value > threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint32_t label = 0;    // majority class at this node

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  std::uint32_t predict(const SparseVector& x) const;
  friend bool operator==(const Tree&, const Tree&) = default;
};

struct ForestParams {
  std::vector<Tree> trees;
};

}  // namespace detail

/// Immutable result of train(). Holds the sorted class list and the
/// algorithm-specific parameters.
class TrainedModel {
public:
  Algorithm algorithm() const noexcept { return algorithm_; }
  const std::vector<std::string>& classes() const noexcept { return classes_; }
  std::size_t dimension() const noexcept { return dimension_; }

  std::vector<std::string> predict(std::span<const SparseVector> X) const;
  /// Class indices into classes(), same order as predict().
  std::vector<std::uint32_t> predict_indices(std::span<const SparseVector> X) const;

  /// Per-class decision scores for NB (log posterior up to a constant) and
  /// LR/SVM (margin). Throws for the other algorithms.
  std::vector<double> scores(const SparseVector& x) const;

  const detail::NaiveBayesParams* naive_bayes() const { return std::get_if<detail::NaiveBayesParams>(&params_); }
  const detail::LinearParams* linear() const { return std::get_if<detail::LinearParams>(&params_); }
  const detail::ForestParams* forest() const { return std::get_if<detail::ForestParams>(&params_); }
  const detail::Tree* tree() const { return std::get_if<detail::Tree>(&params_); }

  friend TrainedModel train(std::span<const SparseVector> X, std::span<const std::string> y,
                            const Hyperparams& h);

private:
  using Params = std::variant<detail::NaiveBayesParams, detail::LinearParams, detail::KnnParams,
                              detail::Tree, detail::ForestParams>;

  void check_dimension(const SparseVector& x) const;

  Algorithm algorithm_ = Algorithm::NB;
  std::vector<std::string> classes_;
  std::size_t dimension_ = 0;
  Params params_;
};

TrainedModel train(std::span<const SparseVector> X, std::span<const std::string> y, const Hyperparams& h);

/// Index of the largest score; ties go to the lowest index.
std::uint32_t argmax_lowest(std::span<const double> scores) noexcept;

}  // namespace tradebench
