#include "hsc/encoder.hpp"

#include <cmath>

#include "hsc/error.hpp"

namespace hsc {

Embedding DescriptionEncoder::encode_with_evidence(std::string_view description,
                                                   std::span<const std::string> sentences) const {
  if (sentences.empty()) return encode(description);
  std::string joined(description);
  for (const auto& s : sentences) {
    joined += kEvidenceSeparator;
    joined += s;
  }
  return encode(joined);
}

PooledEncoder::PooledEncoder(std::shared_ptr<const WordVectorTable> vectors, std::shared_ptr<const IdfTable> idf,
                             bool normalize)
    : vectors_(std::move(vectors)), idf_(std::move(idf)), normalize_(normalize) {
  if (!vectors_ || !idf_) throw Error("PooledEncoder requires word vectors and an idf table");
}

Embedding PooledEncoder::encode(std::string_view text) const {
  const std::size_t d = vectors_->dimension();
  Embedding pooled(d, 0.0);
  double total_weight = 0.0;
  std::size_t in_vocabulary = 0;
  const auto tokens = tokenize(text);
  for (const auto& token : tokens) {
    if (!vectors_->contains(token)) continue;
    ++in_vocabulary;
    const double w = idf_->idf(token);
    const auto v = vectors_->vector(token);
    for (std::size_t i = 0; i < d; ++i) pooled[i] += w * v[i];
    total_weight += w;
  }
  if (in_vocabulary == 0) return pooled;
  if (total_weight == 0.0) {
    // Every token occurs in every document: fall back to the plain mean.
    for (const auto& token : tokens) {
      if (!vectors_->contains(token)) continue;
      const auto v = vectors_->vector(token);
      for (std::size_t i = 0; i < d; ++i) pooled[i] += v[i];
    }
    total_weight = static_cast<double>(in_vocabulary);
  }
  for (auto& x : pooled) x /= total_weight;
  if (normalize_) {
    double norm = 0.0;
    for (double x : pooled) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (auto& x : pooled) x /= norm;
    }
  }
  return pooled;
}

}  // namespace hsc
