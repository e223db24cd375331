#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hsc/corpus.hpp"
#include "hsc/textproc.hpp"

namespace hsc {

/// Shared lexical resources. All members must be non-null.
struct TextResources {
  std::shared_ptr<const WordVectorTable> vectors;
  std::shared_ptr<const IdfTable> idf;
  std::shared_ptr<const StopwordSet> stopwords;
};

struct RetrievalConfig {
  std::size_t max_sentences = 7;
  double coverage_threshold = 0.95;  // cosine needed for a keyword to count as covered
  double idf_floor = 0.0;            // passed to content_keywords

  void validate() const;

  friend bool operator==(const RetrievalConfig&, const RetrievalConfig&) = default;
};

struct SelectedSentence {
  std::string text;
  std::size_t index = 0;  // position in the manual entry
  double score = 0.0;     // alignment score against the keywords uncovered at selection time

  friend bool operator==(const SelectedSentence&, const SelectedSentence&) = default;
};

struct RetrievalResult {
  std::vector<SelectedSentence> sentences;
  KeywordSet query_keywords;
  KeywordSet covered_keywords;
  KeywordSet uncovered_keywords;

  std::vector<std::string> texts() const;

  friend bool operator==(const RetrievalResult&, const RetrievalResult&) = default;
};

/// Σ over query tokens t of idf(t) · max(0, max_u cos(vec t, vec u)), u
/// ranging over the sentence tokens. Tokens are visited in set order.
double alignment_score(const KeywordSet& query, const IdfTable& idf, const TokenSequence& sentence,
                       const WordVectorTable& vectors);

/// Greedy iterative alignment retrieval over one heading's manual text.
///
/// Each round scores every unselected sentence against the keywords still
/// uncovered and takes the best one (lowest index on ties). A keyword is
/// covered by a sentence when one of its tokens reaches the coverage
/// threshold. The loop stops when every keyword is covered, when the best
/// sentence would cover nothing new (it is not taken), or at max_sentences.
/// Throws EmptyManual.
RetrievalResult retrieve(std::string_view description, const ManualEntry& entry, const RetrievalConfig& config,
                         const TextResources& resources);

/// Same procedure starting from an explicit keyword set and pre-tokenized
/// sentences; `texts` supplies the sentence strings for the result.
RetrievalResult retrieve_keywords(const KeywordSet& keywords, std::span<const TokenSequence> sentences,
                                  std::span<const std::string> texts, const RetrievalConfig& config,
                                  const IdfTable& idf, const WordVectorTable& vectors);

}  // namespace hsc
