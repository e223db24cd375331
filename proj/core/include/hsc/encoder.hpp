#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hsc/textproc.hpp"

namespace hsc {

using Embedding = std::vector<double>;

/// Maps text to a fixed-length embedding. Implementations must be
/// deterministic and safe for concurrent encode() calls.
class DescriptionEncoder {
 public:
  virtual ~DescriptionEncoder() = default;

  virtual std::size_t output_dimension() const = 0;
  virtual Embedding encode(std::string_view text) const = 0;

  /// Encodes the description followed by the key sentences in retrieval
  /// order, joined with the reserved separator. With no sentences this is
  /// exactly encode(description).
  Embedding encode_with_evidence(std::string_view description, std::span<const std::string> sentences) const;
};

/// Reserved boundary marker between description and evidence; the
/// tokenizer treats it as punctuation.
inline constexpr std::string_view kEvidenceSeparator = " ‖ ";

/// IDF-weighted mean of in-vocabulary token vectors, optionally scaled to
/// unit L2 norm. Text without any in-vocabulary token encodes to zero.
class PooledEncoder final : public DescriptionEncoder {
 public:
  PooledEncoder(std::shared_ptr<const WordVectorTable> vectors, std::shared_ptr<const IdfTable> idf,
                bool normalize = true);

  std::size_t output_dimension() const override { return vectors_->dimension(); }
  Embedding encode(std::string_view text) const override;

  bool normalizes() const noexcept { return normalize_; }

 private:
  std::shared_ptr<const WordVectorTable> vectors_;
  std::shared_ptr<const IdfTable> idf_;
  bool normalize_;
};

}  // namespace hsc
