#include "hsc/air_retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hsc/error.hpp"

namespace hsc {

namespace {

// Best cosine between `token` and any sentence token; -inf for an empty
// sentence.
double best_alignment(std::string_view token, const TokenSequence& sentence, const WordVectorTable& vectors) {
  double best = -std::numeric_limits<double>::infinity();
  const auto v = vectors.vector(token);
  for (const auto& u : sentence) best = std::max(best, cosine(v, vectors.vector(u)));
  return best;
}

}  // namespace

void RetrievalConfig::validate() const {
  if (max_sentences < 1) throw InputError("max_sentences must be at least 1");
  if (!(coverage_threshold > 0.0 && coverage_threshold <= 1.0)) {
    throw InputError("coverage_threshold must lie in (0, 1]");
  }
}

std::vector<std::string> RetrievalResult::texts() const {
  std::vector<std::string> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(s.text);
  return out;
}

double alignment_score(const KeywordSet& query, const IdfTable& idf, const TokenSequence& sentence,
                       const WordVectorTable& vectors) {
  double score = 0.0;
  if (sentence.empty()) return score;
  for (const auto& t : query) score += idf.idf(t) * std::max(0.0, best_alignment(t, sentence, vectors));
  return score;
}

RetrievalResult retrieve_keywords(const KeywordSet& keywords, std::span<const TokenSequence> sentences,
                                  std::span<const std::string> texts, const RetrievalConfig& config,
                                  const IdfTable& idf, const WordVectorTable& vectors) {
  config.validate();
  if (sentences.empty()) throw EmptyManual("manual entry has no sentences");
  if (texts.size() != sentences.size()) throw DimensionMismatch("sentence texts and tokens differ in length");

  const std::vector<std::string> terms(keywords.begin(), keywords.end());
  const std::size_t n = sentences.size();
  // alignment[t * n + i]: best cosine of keyword t inside sentence i.
  std::vector<double> alignment(terms.size() * n);
  std::vector<double> weight(terms.size());
  for (std::size_t t = 0; t < terms.size(); ++t) {
    weight[t] = idf.idf(terms[t]);
    for (std::size_t i = 0; i < n; ++i) alignment[t * n + i] = best_alignment(terms[t], sentences[i], vectors);
  }

  RetrievalResult result;
  result.query_keywords = keywords;
  std::vector<bool> uncovered(terms.size(), true);
  std::size_t remaining = terms.size();
  std::vector<bool> taken(n, false);

  while (remaining > 0 && result.sentences.size() < config.max_sentences) {
    std::size_t best = n;
    double best_score = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      double score = 0.0;
      if (!sentences[i].empty()) {
        for (std::size_t t = 0; t < terms.size(); ++t) {
          if (uncovered[t]) score += weight[t] * std::max(0.0, alignment[t * n + i]);
        }
      }
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    if (best == n) break;

    std::vector<std::size_t> newly;
    for (std::size_t t = 0; t < terms.size(); ++t) {
      if (uncovered[t] && alignment[t * n + best] >= config.coverage_threshold) newly.push_back(t);
    }
    if (newly.empty()) break;
    for (auto t : newly) uncovered[t] = false;
    remaining -= newly.size();
    taken[best] = true;
    result.sentences.push_back({texts[best], best, best_score});
  }

  for (std::size_t t = 0; t < terms.size(); ++t) {
    (uncovered[t] ? result.uncovered_keywords : result.covered_keywords).insert(terms[t]);
  }
  return result;
}

RetrievalResult retrieve(std::string_view description, const ManualEntry& entry, const RetrievalConfig& config,
                         const TextResources& resources) {
  if (entry.sentences.empty()) throw EmptyManual("manual entry for " + entry.heading + " has no sentences");
  const auto keywords = content_keywords(tokenize(description), *resources.idf, *resources.stopwords,
                                         config.idf_floor);
  std::vector<TokenSequence> tokens;
  tokens.reserve(entry.sentences.size());
  for (const auto& s : entry.sentences) tokens.push_back(tokenize(s));
  return retrieve_keywords(keywords, tokens, entry.sentences, config, *resources.idf, *resources.vectors);
}

}  // namespace hsc
