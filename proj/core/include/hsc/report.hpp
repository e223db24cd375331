#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hsc/air_retrieval.hpp"

namespace hsc {

struct HeadingCandidate {
  std::string heading;
  double score = 0.0;
  std::vector<SelectedSentence> key_sentences;
  bool manual_missing = false;

  friend bool operator==(const HeadingCandidate&, const HeadingCandidate&) = default;
};

struct SimilarCaseRef {
  std::string id;
  double similarity = 0.0;
  std::string snippet;

  friend bool operator==(const SimilarCaseRef&, const SimilarCaseRef&) = default;
};

struct SubheadingCandidate {
  std::string subheading;
  double score = 0.0;
  std::vector<SimilarCaseRef> similar_cases;

  friend bool operator==(const SubheadingCandidate&, const SubheadingCandidate&) = default;
};

/// Decision-support output for one item description.
struct CandidateReport {
  std::string description;
  std::vector<HeadingCandidate> headings;        // descending calibrated score
  std::vector<SubheadingCandidate> subheadings;  // descending calibrated score
  bool evidence_used = true;

  friend bool operator==(const CandidateReport&, const CandidateReport&) = default;
};

/// Human-readable layout; scores with 4 decimals.
std::string render_text(const CandidateReport& report);

/// JSON with full-precision scores; parse_report(render_structured(r)) == r.
std::string render_structured(const CandidateReport& report);
CandidateReport parse_report(std::string_view json_text);

}  // namespace hsc
