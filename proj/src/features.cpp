#include "tradebench/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace tradebench {

double SparseVector::norm() const noexcept {
  double sum = 0.0;
  for (const auto& e : entries) sum += e.value * e.value;
  return std::sqrt(sum);
}

double SparseVector::dot(const SparseVector& other) const noexcept {
  double sum = 0.0;
  auto a = entries.begin();
  auto b = other.entries.begin();
  while (a != entries.end() && b != other.entries.end()) {
    if (a->index < b->index) {
      ++a;
    } else if (b->index < a->index) {
      ++b;
    } else {
      sum += a->value * b->value;
      ++a;
      ++b;
    }
  }
  return sum;
}

namespace {

bool is_alnum(char c) noexcept { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

template <typename Sink>
void for_each_token(std::string_view text, std::string& scratch, Sink&& sink) {
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_alnum(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && is_alnum(text[i])) ++i;
    if (i - start < 2) continue;
    scratch.assign(text.substr(start, i - start));
    for (char& c : scratch) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    sink(std::string_view(scratch));
  }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string scratch;
  for_each_token(text, scratch, [&](std::string_view tok) { tokens.emplace_back(tok); });
  return tokens;
}

std::int64_t FeatureSpace::index_of(std::string_view term) const {
  const auto it = index_.find(term);
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

SparseVector FeatureSpace::vectorize(std::string_view text) const {
  SparseVector out;
  out.dimension = terms_.size();
  std::string scratch;
  for_each_token(text, scratch, [&](std::string_view tok) {
    const auto it = index_.find(tok);
    if (it != index_.end()) out.entries.push_back({it->second, 1.0});
  });
  if (out.entries.empty()) return out;

  std::sort(out.entries.begin(), out.entries.end(),
            [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
  // Collapse repeats into raw term frequency.
  std::size_t w = 0;
  for (std::size_t r = 1; r < out.entries.size(); ++r) {
    if (out.entries[r].index == out.entries[w].index)
      out.entries[w].value += 1.0;
    else
      out.entries[++w] = out.entries[r];
  }
  out.entries.resize(w + 1);

  for (auto& e : out.entries) e.value *= idf_[e.index];
  const double n = out.norm();
  for (auto& e : out.entries) e.value /= n;
  return out;
}

std::vector<SparseVector> FeatureSpace::vectorize(const Corpus& corpus) const {
  std::vector<SparseVector> out;
  out.reserve(corpus.size());
  for (const auto& doc : corpus.documents()) out.push_back(vectorize(doc.text));
  return out;
}

FeatureSpace fit_feature_space(const Corpus& corpus, const FeatureConfig& config) {
  if (config.max_features < 1) throw FeatureError("max_features must be >= 1");
  if (config.min_df < 1) throw FeatureError("min_df must be >= 1");

  struct Count {
    std::size_t df = 0;
    std::size_t last_doc = static_cast<std::size_t>(-1);
  };
  std::unordered_map<std::string, Count> counts;
  std::string scratch;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    for_each_token(corpus.documents()[d].text, scratch, [&](std::string_view tok) {
      auto [it, inserted] = counts.try_emplace(std::string(tok));
      if (it->second.last_doc != d) {
        it->second.last_doc = d;
        ++it->second.df;
      }
    });
  }

  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [term, count] : counts)
    if (count.df >= config.min_df) kept.emplace_back(term, count.df);
  if (kept.empty()) throw FeatureError("no term reaches min_df; feature space would be empty");

  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (kept.size() > config.max_features) kept.resize(config.max_features);
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  FeatureSpace space;
  space.fitted_documents_ = corpus.size();
  const double n = static_cast<double>(corpus.size());
  space.terms_.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    space.terms_.push_back(kept[i].first);
    space.df_.push_back(kept[i].second);
    space.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(kept[i].second))) + 1.0);
    space.index_.emplace(kept[i].first, static_cast<std::uint32_t>(i));
  }
  return space;
}

}  // namespace tradebench
