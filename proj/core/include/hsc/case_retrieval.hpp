#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hsc/air_retrieval.hpp"
#include "hsc/corpus.hpp"
#include "hsc/encoder.hpp"

namespace hsc {

struct IndexedCase {
  std::string id;
  Embedding embedding;
  std::string snippet;

  friend bool operator==(const IndexedCase&, const IndexedCase&) = default;
};

struct SimilarCase {
  std::string id;
  double similarity = 0.0;

  friend bool operator==(const SimilarCase&, const SimilarCase&) = default;
};

/// Prior cases bucketed by gold subheading; exact cosine search within a
/// bucket.
class CaseIndex {
 public:
  CaseIndex() = default;
  explicit CaseIndex(std::size_t dimension) : dimension_(dimension) {}

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return ids_.size(); }

  /// Throws DuplicateId, DimensionMismatch.
  void add(const std::string& subheading, IndexedCase entry);

  const std::map<std::string, std::vector<IndexedCase>>& buckets() const noexcept { return buckets_; }
  const IndexedCase* find(const std::string& id) const;

  /// Top-m cases of the bucket by descending cosine, ties to the smaller id.
  /// An unknown subheading yields an empty list.
  std::vector<SimilarCase> similar_cases(std::span<const double> query, const std::string& subheading,
                                         std::size_t m = 3) const;

  friend bool operator==(const CaseIndex& a, const CaseIndex& b) {
    return a.dimension_ == b.dimension_ && a.buckets_ == b.buckets_;
  }

 private:
  std::size_t dimension_ = 0;
  std::map<std::string, std::vector<IndexedCase>> buckets_;
  std::map<std::string, std::pair<std::string, std::size_t>> ids_;
};

/// Snippet length used for indexed cases, in bytes (cut on a UTF-8 boundary).
inline constexpr std::size_t kSnippetBytes = 120;
std::string make_snippet(std::string_view description, std::size_t max_bytes = kSnippetBytes);

/// Embeds every case with encode_with_evidence(description, evidence[i]) and
/// groups by gold subheading. `evidence` is parallel to `cases`.
/// Throws EmptyInput, DuplicateId, DimensionMismatch.
CaseIndex build_index(std::span<const DecisionCase> cases, const DescriptionEncoder& encoder,
                      std::span<const RetrievalResult> evidence);

void write_case_index(std::ostream& out, const CaseIndex& index);
CaseIndex read_case_index(std::istream& in, const std::string& source_name);

}  // namespace hsc
