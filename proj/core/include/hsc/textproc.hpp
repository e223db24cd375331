#pragma once

#include <cstddef>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace hsc {

/// Lowercase word tokens; never empty, never containing whitespace.
using TokenSequence = std::vector<std::string>;
using StopwordSet = std::unordered_set<std::string>;
using KeywordSet = std::set<std::string>;

/// Splits UTF-8 text into lowercase word tokens.
///
/// A token is a maximal run of letters and digits. ASCII letters/digits and
/// any non-ASCII code point outside the punctuation and symbol blocks count
/// as word characters. A '.' or ',' survives only when it sits between two
/// digits ("22.1v", "1,000"); all other punctuation separates tokens.
/// Lowercasing covers ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic.
TokenSequence tokenize(std::string_view text);

/// The built-in English stopword list.
const StopwordSet& default_stopwords();

/// One token per line; blank lines and lines starting with '#' are skipped.
/// Entries are lowercased through tokenize().
StopwordSet load_stopwords(const std::string& path);
StopwordSet read_stopwords(std::istream& in);

/// Static word vectors with a fixed dimension. Lookups of unknown tokens
/// yield the zero vector.
class WordVectorTable {
 public:
  explicit WordVectorTable(std::size_t dimension);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool contains(std::string_view token) const;

  /// Adds or replaces. Throws DimensionMismatch on a wrong length.
  void insert(const std::string& token, std::span<const double> values);

  std::span<const double> vector(std::string_view token) const;

  /// Tokens in insertion order.
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

 private:
  std::size_t dimension_;
  std::vector<std::string> tokens_;
  std::vector<double> data_;
  std::unordered_map<std::string, std::size_t> rows_;
  std::vector<double> zero_;
};

/// "token v1 ... vd" per line; an optional first line "count dim" is
/// accepted. Throws ParseError on ragged rows.
WordVectorTable load_word_vectors(const std::string& path);
WordVectorTable read_word_vectors(std::istream& in, const std::string& source_name);
/// Writes shortest round-trip decimal forms, so read(write(t)) == t exactly.
void write_word_vectors(std::ostream& out, const WordVectorTable& table);

/// Document-frequency statistics. idf(t) = ln(N / df(t)); a token seen in no
/// document is looked up as if df were 1.
class IdfTable {
 public:
  IdfTable(std::size_t document_count, std::unordered_map<std::string, std::size_t> document_frequency);

  std::size_t document_count() const noexcept { return document_count_; }
  double idf(std::string_view token) const;
  std::size_t document_frequency(std::string_view token) const;
  const std::unordered_map<std::string, std::size_t>& document_frequencies() const noexcept { return df_; }

 private:
  std::size_t document_count_;
  std::unordered_map<std::string, std::size_t> df_;
};

/// Throws EmptyInput on zero documents.
IdfTable compute_idf(std::span<const TokenSequence> documents);

/// Standard cosine similarity; 0 when either vector has zero norm.
/// Throws DimensionMismatch.
double cosine(std::span<const double> u, std::span<const double> v);

/// Unique tokens that are not stopwords and whose idf is at least `idf_floor`.
KeywordSet content_keywords(const TokenSequence& tokens, const IdfTable& idf, const StopwordSet& stopwords,
                            double idf_floor = 0.0);

}  // namespace hsc
