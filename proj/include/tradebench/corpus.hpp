#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tradebench {

/// Raised for malformed corpus input and for split/generation preconditions.
class CorpusError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kBytesPerMegabyte = 1'000'000.0;

struct LabeledDocument {
  std::string label;
  std::string text;

  /// Size of the "label TAB text NEWLINE" record.
  std::size_t byte_size() const noexcept { return label.size() + text.size() + 2; }
};

/// Ordered documents plus the sorted set of labels and the byte total.
/// Immutable once built; the derived fields are always consistent.
class Corpus {
public:
  Corpus() = default;
  explicit Corpus(std::vector<LabeledDocument> documents);

  const std::vector<LabeledDocument>& documents() const noexcept { return documents_; }
  const std::vector<std::string>& classes() const noexcept { return classes_; }
  std::size_t total_bytes() const noexcept { return total_bytes_; }
  std::size_t size() const noexcept { return documents_.size(); }
  bool empty() const noexcept { return documents_.empty(); }
  double size_mb() const noexcept { return static_cast<double>(total_bytes_) / kBytesPerMegabyte; }

  /// Labels of all documents, in document order.
  std::vector<std::string> labels() const;

  /// Writes the TSV serialization. Byte count equals total_bytes().
  void write_tsv(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;

private:
  std::vector<LabeledDocument> documents_;
  std::vector<std::string> classes_;
  std::size_t total_bytes_ = 0;
};

/// Loads a "label TAB text" file, one document per line.
Corpus load_corpus(const std::filesystem::path& path);
/// Same as load_corpus, reading from an open stream.
Corpus parse_corpus(std::istream& in);

struct SyntheticSpec {
  int num_classes = 4;
  int vocab_per_class = 500;
  int shared_vocab = 2000;
  double signal_prob = 0.7;
  int doc_len_min = 30;
  int doc_len_max = 120;
  std::size_t target_bytes = 1'000'000;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Token spelled for word `j` of class `k`'s vocabulary slice.
std::string class_token(int k, int j);
/// Token spelled for word `j` of the shared slice.
std::string shared_token(int j);

Corpus generate_synthetic(const SyntheticSpec& spec);

/// Longest document prefix within budget_bytes; never empty for a non-empty corpus.
Corpus take_prefix(const Corpus& corpus, std::size_t budget_bytes);

/// Drops non-positive and above-total entries; the rest must be strictly increasing.
std::vector<double> normalize_schedule(std::vector<double> sizes_mb, const Corpus& corpus);

struct Split {
  Corpus train;
  Corpus test;
};

Split holdout_split(const Corpus& corpus, double test_fraction, std::uint64_t seed);

/// Stratified k folds; element i holds fold i as the test side.
std::vector<Split> k_folds(const Corpus& corpus, int k, std::uint64_t seed);

/// Throws CorpusError naming the first class with fewer than k members.
void check_kfold_feasible(const Corpus& corpus, int k);

}  // namespace tradebench
