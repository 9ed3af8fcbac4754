#include "tradebench/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

#include "tradebench/rng.hpp"

namespace tradebench {

namespace {

void check_document(const LabeledDocument& doc) {
  if (doc.label.empty()) throw CorpusError("document has an empty label");
  if (doc.label.find_first_of("\t\n") != std::string::npos)
    throw CorpusError("label '" + doc.label + "' contains a tab or newline");
  if (doc.text.find('\n') != std::string::npos)
    throw CorpusError("document text contains a newline");
}

Corpus select(const Corpus& corpus, const std::vector<std::size_t>& indices) {
  std::vector<LabeledDocument> docs;
  docs.reserve(indices.size());
  for (std::size_t i : indices) docs.push_back(corpus.documents()[i]);
  return Corpus(std::move(docs));
}

}  // namespace

Corpus::Corpus(std::vector<LabeledDocument> documents) : documents_(std::move(documents)) {
  std::set<std::string> classes;
  for (const auto& doc : documents_) {
    check_document(doc);
    classes.insert(doc.label);
    total_bytes_ += doc.byte_size();
  }
  classes_.assign(classes.begin(), classes.end());
}

std::vector<std::string> Corpus::labels() const {
  std::vector<std::string> out;
  out.reserve(documents_.size());
  for (const auto& doc : documents_) out.push_back(doc.label);
  return out;
}

void Corpus::write_tsv(std::ostream& out) const {
  for (const auto& doc : documents_) out << doc.label << '\t' << doc.text << '\n';
}

void Corpus::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorpusError("cannot open " + path.string() + " for writing");
  write_tsv(out);
  out.flush();
  if (!out) throw CorpusError("failed writing " + path.string());
}

Corpus parse_corpus(std::istream& in) {
  std::vector<LabeledDocument> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw CorpusError("line " + std::to_string(line_no) + ": missing tab separator");
    if (tab == 0) throw CorpusError("line " + std::to_string(line_no) + ": empty label");
    docs.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  if (docs.empty()) throw CorpusError("corpus is empty");
  Corpus corpus(std::move(docs));
  if (corpus.classes().size() < 2)
    throw CorpusError("corpus has fewer than 2 distinct classes");
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open corpus file " + path.string());
  return parse_corpus(in);
}

void SyntheticSpec::validate() const {
  if (num_classes < 2) throw CorpusError("synthetic spec: num_classes must be >= 2");
  if (vocab_per_class < 10) throw CorpusError("synthetic spec: vocab_per_class must be >= 10");
  if (shared_vocab < 0) throw CorpusError("synthetic spec: shared_vocab must be >= 0");
  if (!(signal_prob >= 0.0 && signal_prob <= 1.0))
    throw CorpusError("synthetic spec: signal_prob must lie in [0, 1]");
  if (doc_len_min < 1 || doc_len_max < doc_len_min)
    throw CorpusError("synthetic spec: doc_len_range must satisfy 1 <= min <= max");
  if (target_bytes < 1) throw CorpusError("synthetic spec: target_bytes must be >= 1");
}

std::string class_token(int k, int j) { return "c" + std::to_string(k) + "v" + std::to_string(j); }

std::string shared_token(int j) { return "s" + std::to_string(j); }

Corpus generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  SplitMix64 rng(spec.seed);
  const auto span = static_cast<std::uint64_t>(spec.doc_len_max - spec.doc_len_min + 1);

  std::vector<LabeledDocument> docs;
  std::size_t total = 0;
  for (std::size_t i = 0; total < spec.target_bytes; ++i) {
    const int k = static_cast<int>(i % static_cast<std::size_t>(spec.num_classes));
    const auto len = spec.doc_len_min + static_cast<int>(rng.below(span));
    LabeledDocument doc{"c" + std::to_string(k), {}};
    for (int t = 0; t < len; ++t) {
      if (t > 0) doc.text.push_back(' ');
      // The draw is made even with an empty shared slice so the stream
      // consumption stays the same for every configuration.
      const bool signal = rng.uniform() < spec.signal_prob || spec.shared_vocab == 0;
      if (signal)
        doc.text += class_token(k, static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.vocab_per_class))));
      else
        doc.text += shared_token(static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.shared_vocab))));
    }
    total += doc.byte_size();
    docs.push_back(std::move(doc));
  }
  return Corpus(std::move(docs));
}

Corpus take_prefix(const Corpus& corpus, std::size_t budget_bytes) {
  if (budget_bytes < 1) throw CorpusError("take_prefix: budget must be >= 1 byte");
  const auto& docs = corpus.documents();
  std::size_t used = 0;
  std::size_t count = 0;
  while (count < docs.size() && used + docs[count].byte_size() <= budget_bytes) {
    used += docs[count].byte_size();
    ++count;
  }
  count = std::max<std::size_t>(count, docs.empty() ? 0 : 1);
  return Corpus(std::vector<LabeledDocument>(docs.begin(), docs.begin() + static_cast<std::ptrdiff_t>(count)));
}

std::vector<double> normalize_schedule(std::vector<double> sizes_mb, const Corpus& corpus) {
  for (std::size_t i = 1; i < sizes_mb.size(); ++i)
    if (!(sizes_mb[i] > sizes_mb[i - 1]))
      throw CorpusError("size schedule must be strictly increasing");
  std::erase_if(sizes_mb, [&](double s) { return !(s > 0.0) || s > corpus.size_mb(); });
  return sizes_mb;
}

Split holdout_split(const Corpus& corpus, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw CorpusError("holdout: test_fraction must lie in (0, 1)");
  const std::size_t n = corpus.size();
  if (n < 2) throw CorpusError("holdout: corpus needs at least 2 documents");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(seed);
  rng.shuffle(std::span(order));

  auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
  std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  return {select(corpus, train), select(corpus, test)};
}

void check_kfold_feasible(const Corpus& corpus, int k) {
  if (k < 2) throw CorpusError("k-fold: k must be >= 2");
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : corpus.documents()) ++counts[doc.label];
  for (const auto& [label, count] : counts)
    if (count < static_cast<std::size_t>(k))
      throw CorpusError("k-fold: class '" + label + "' has fewer than k members (" +
                        std::to_string(count) + " < " + std::to_string(k) + ")");
  if (static_cast<std::size_t>(k) > corpus.size())
    throw CorpusError("k-fold: k exceeds the number of documents");
}

std::vector<Split> k_folds(const Corpus& corpus, int k, std::uint64_t seed) {
  check_kfold_feasible(corpus, k);

  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < corpus.size(); ++i) by_class[corpus.documents()[i].label].push_back(i);

  SplitMix64 rng(seed);
  std::vector<int> fold_of(corpus.size(), 0);
  std::size_t dealt = 0;
  for (auto& [label, members] : by_class) {
    rng.shuffle(std::span(members));
    for (std::size_t idx : members) fold_of[idx] = static_cast<int>(dealt++ % static_cast<std::size_t>(k));
  }

  std::vector<Split> folds;
  folds.reserve(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < corpus.size(); ++i) (fold_of[i] == f ? test : train).push_back(i);
    folds.push_back({select(corpus, train), select(corpus, test)});
  }
  return folds;
}

}  // namespace tradebench
