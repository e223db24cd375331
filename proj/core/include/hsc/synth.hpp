#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hsc/corpus.hpp"
#include "hsc/textproc.hpp"

namespace hsc {

struct SynthConfig {
  std::uint64_t seed = 7;
  std::size_t headings = 20;
  std::size_t subheadings_per_heading = 3;
  std::size_t train_per_subheading = 50;
  std::size_t validation_per_subheading = 5;
  std::size_t test_per_subheading = 5;
  std::size_t dimension = 50;
};

struct SyntheticCorpus {
  std::vector<DecisionCase> cases;  // ordered by date, then id
  Manual manual;
  WordVectorTable vectors;
};

/// Seeded synthetic classification corpus with a deliberate vocabulary gap
/// between descriptions and manual text.
///
/// Headings are 8501, 8502, ...; subheadings append 10, 20, 30, ... Every
/// heading owns 6 manual terms and 8 description terms, every subheading 3
/// manual terms and 4 description terms. The first description term of a
/// subheading is a spelling variant of its first manual term whose vector sits
/// at cosine 1/sqrt(1.04) ≈ 0.981 from it, so alignment retrieval can cover
/// it while exact word matching cannot.
///
/// A description carries 2 heading description terms, 2 subheading
/// description terms (the variant with probability 0.7), one heading manual
/// term with probability 0.25, 3 shared generic words, one manual term of a
/// random other heading, stopwords and a rating such as "135w". Manual entries
/// have a title sentence, one sentence per subheading, an "also covers"
/// sentence, legal filler, an exclusion sentence naming another heading's
/// terms and a PARTS sentence.
///
/// Word vectors cluster: heading terms scatter around a heading direction and
/// subheading terms around heading + subheading directions. Generic words,
/// stopwords and legal filler get independent random unit vectors.
///
/// Dates: train cases fall in 2018-01 .. 2021-06, validation in 2021-07 .. 09,
/// test in 2021-10 .. 12, so the default chronological split recovers the
/// requested partition sizes exactly. Validation and test cases carry gold
/// evidence: the gold heading's title and subheading sentences.
SyntheticCorpus generate_synthetic_corpus(const SynthConfig& config = {});

}  // namespace hsc
