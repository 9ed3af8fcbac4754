#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tradebench/corpus.hpp"

namespace tradebench {

class FeatureError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SparseEntry {
  std::uint32_t index;
  double value;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Entries sorted by strictly increasing index, all values finite and non-zero.
struct SparseVector {
  std::vector<SparseEntry> entries;
  std::size_t dimension = 0;

  bool empty() const noexcept { return entries.empty(); }
  double norm() const noexcept;
  double dot(const SparseVector& other) const noexcept;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

/// Lowercase, split on runs of non-alphanumeric bytes, drop tokens shorter than 2.
std::vector<std::string> tokenize(std::string_view text);

struct FeatureConfig {
  std::size_t max_features = 50'000;
  std::size_t min_df = 2;
};

class FeatureSpace {
public:
  FeatureSpace() = default;

  std::size_t dimension() const noexcept { return terms_.size(); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<double>& idf() const noexcept { return idf_; }
  const std::vector<std::size_t>& document_frequency() const noexcept { return df_; }
  std::size_t fitted_documents() const noexcept { return fitted_documents_; }

  /// Feature index of a term, or -1 when out of vocabulary.
  std::int64_t index_of(std::string_view term) const;

  SparseVector vectorize(std::string_view text) const;
  SparseVector vectorize(const LabeledDocument& doc) const { return vectorize(doc.text); }
  std::vector<SparseVector> vectorize(const Corpus& corpus) const;

  friend FeatureSpace fit_feature_space(const Corpus& corpus, const FeatureConfig& config);

private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
  };

  std::vector<std::string> terms_;
  std::vector<double> idf_;
  std::vector<std::size_t> df_;
  std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> index_;
  std::size_t fitted_documents_ = 0;
};

/// Vocabulary of terms with df >= min_df, the max_features most frequent
/// (ties lexicographic), stored in lexicographic order with smoothed idf.
FeatureSpace fit_feature_space(const Corpus& corpus, const FeatureConfig& config);

}  // namespace tradebench
