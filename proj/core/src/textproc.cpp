#include "hsc/textproc.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "hsc/error.hpp"

namespace hsc {

namespace {

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one code point starting at text[i] and advances i. Malformed
// sequences consume one byte and yield kInvalid.
char32_t next_code_point(std::string_view text, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(text[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return kInvalid;
  }
  if (i + len > text.size()) {
    ++i;
    return kInvalid;
  }
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(text[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return kInvalid;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  // Overlong forms and surrogates are rejected.
  if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
      (cp >= 0xD800 && cp <= 0xDFFF)) {
    ++i;
    return kInvalid;
  }
  i += len;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

bool is_ascii_digit(char32_t cp) { return in(cp, U'0', U'9'); }

bool is_word_char(char32_t cp) {
  if (cp == kInvalid) return false;
  if (cp < 0x80) return is_ascii_digit(cp) || in(cp, U'a', U'z') || in(cp, U'A', U'Z');
  if (in(cp, 0x80, 0xBF)) return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (in(cp, 0x2000, 0x206F) || in(cp, 0x20A0, 0x20CF) || in(cp, 0x2190, 0x2BFF) ||
      in(cp, 0x2E00, 0x2E7F) || in(cp, 0x3000, 0x303F) || in(cp, 0xFE10, 0xFE1F) ||
      in(cp, 0xFE30, 0xFE6F) || cp == 0xFEFF || in(cp, 0xFF00, 0xFF0F) || in(cp, 0xFF1A, 0xFF20) ||
      in(cp, 0xFF3B, 0xFF40) || in(cp, 0xFF5B, 0xFF65) || in(cp, 0x1F000, 0x1FAFF)) {
    return false;
  }
  return true;
}

char32_t to_lower(char32_t cp) {
  if (in(cp, U'A', U'Z')) return cp + 0x20;
  if (cp < 0x80) return cp;
  if (in(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 0x20;
  if (in(cp, 0x100, 0x137) || in(cp, 0x14A, 0x177)) return (cp % 2 == 0) ? cp + 1 : cp;
  if (in(cp, 0x139, 0x148) || in(cp, 0x179, 0x17E)) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp == 0x178) return 0xFF;
  if (in(cp, 0x391, 0x3A9) && cp != 0x3A2) return cp + 0x20;
  if (cp == 0x386) return 0x3AC;
  if (in(cp, 0x388, 0x38A)) return cp + 0x25;
  if (cp == 0x38C) return 0x3CC;
  if (in(cp, 0x38E, 0x38F)) return cp + 0x3F;
  if (in(cp, 0x410, 0x42F)) return cp + 0x20;
  if (in(cp, 0x400, 0x40F)) return cp + 0x50;
  return cp;
}

bool blank_line(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

TokenSequence tokenize(std::string_view text) {
  TokenSequence tokens;
  std::string current;
  bool last_was_digit = false;
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t cp = next_code_point(text, i);
    if (is_word_char(cp)) {
      append_utf8(current, to_lower(cp));
      last_was_digit = is_ascii_digit(cp);
      continue;
    }
    if ((cp == U'.' || cp == U',') && last_was_digit && i < text.size() &&
        is_ascii_digit(static_cast<unsigned char>(text[i]))) {
      current.push_back(static_cast<char>(cp));
      last_was_digit = false;
      continue;
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
    last_was_digit = false;
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

const StopwordSet& default_stopwords() {
  static const StopwordSet words = {
      "a",       "about",   "above",  "after",   "again",   "against", "all",     "also",   "am",
      "an",      "and",     "any",    "are",     "as",      "at",      "be",      "because", "been",
      "before",  "being",   "below",  "between", "both",    "but",     "by",      "can",    "could",
      "did",     "do",      "does",   "doing",   "down",    "during",  "each",    "either", "etc",
      "few",     "for",     "from",   "further", "had",     "has",     "have",    "having", "he",
      "her",     "here",    "hers",   "him",     "his",     "how",     "however", "i",      "if",
      "in",      "into",    "is",     "it",      "its",     "itself",  "may",     "me",     "more",
      "most",    "must",    "my",     "neither", "no",      "nor",     "not",     "of",     "off",
      "on",      "once",    "only",   "or",      "other",   "otherwise", "our",   "out",    "over",
      "own",     "same",    "shall",  "she",     "should",  "so",      "some",    "such",   "than",
      "that",    "the",     "their",  "them",    "then",    "there",   "these",   "they",   "this",
      "those",   "through", "thus",   "to",      "too",     "under",   "until",   "up",     "upon",
      "very",    "was",     "we",     "were",    "what",    "when",    "where",   "whether", "which",
      "while",   "who",     "whom",   "why",     "will",    "with",    "within",  "without", "would",
      "you",     "your",
  };
  return words;
}

StopwordSet read_stopwords(std::istream& in) {
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    if (blank_line(line) || line.front() == '#') continue;
    for (auto& t : tokenize(line)) words.insert(std::move(t));
  }
  return words;
}

StopwordSet load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open stopword file '" + path + "'");
  return read_stopwords(in);
}

WordVectorTable::WordVectorTable(std::size_t dimension) : dimension_(dimension), zero_(dimension, 0.0) {
  if (dimension == 0) throw DimensionMismatch("word vector dimension must be positive");
}

bool WordVectorTable::contains(std::string_view token) const { return rows_.count(std::string(token)) != 0; }

void WordVectorTable::insert(const std::string& token, std::span<const double> values) {
  if (values.size() != dimension_) {
    throw DimensionMismatch("vector for '" + token + "' has length " + std::to_string(values.size()) +
                            ", expected " + std::to_string(dimension_));
  }
  if (auto it = rows_.find(token); it != rows_.end()) {
    std::copy(values.begin(), values.end(), data_.begin() + static_cast<std::ptrdiff_t>(it->second * dimension_));
    return;
  }
  rows_.emplace(token, tokens_.size());
  tokens_.push_back(token);
  data_.insert(data_.end(), values.begin(), values.end());
}

std::span<const double> WordVectorTable::vector(std::string_view token) const {
  auto it = rows_.find(std::string(token));
  if (it == rows_.end()) return zero_;
  return std::span<const double>(data_).subspan(it->second * dimension_, dimension_);
}

WordVectorTable read_word_vectors(std::istream& in, const std::string& source_name) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<WordVectorTable> table;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank_line(line)) continue;
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    values.clear();
    std::string field;
    while (fields >> field) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ParseError(source_name, line_no, "bad number '" + field + "'");
      }
      values.push_back(v);
    }
    if (!table) {
      // "count dim" header: two integral fields and nothing else.
      const bool header = values.size() == 1 && token.find_first_not_of("0123456789") == std::string::npos &&
                          values[0] > 0 && std::floor(values[0]) == values[0];
      if (header) {
        table.emplace(static_cast<std::size_t>(values[0]));
        continue;
      }
      if (values.empty()) throw ParseError(source_name, line_no, "vector line without values");
      table.emplace(values.size());
    }
    if (values.size() != table->dimension()) {
      throw ParseError(source_name, line_no,
                       "expected " + std::to_string(table->dimension()) + " values, got " +
                           std::to_string(values.size()));
    }
    table->insert(token, values);
  }
  if (!table) throw ParseError(source_name + ": no word vectors found");
  return std::move(*table);
}

WordVectorTable load_word_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open word-vector file '" + path + "'");
  return read_word_vectors(in, path);
}

void write_word_vectors(std::ostream& out, const WordVectorTable& table) {
  out << table.size() << ' ' << table.dimension() << '\n';
  char buf[64];
  for (const auto& token : table.tokens()) {
    out << token;
    for (double v : table.vector(token)) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    out << '\n';
  }
}

IdfTable::IdfTable(std::size_t document_count, std::unordered_map<std::string, std::size_t> document_frequency)
    : document_count_(document_count), df_(std::move(document_frequency)) {
  if (document_count_ == 0) throw EmptyInput("idf table needs at least one document");
  for (const auto& [token, df] : df_) {
    if (df == 0 || df > document_count_) {
      throw InputError("document frequency of '" + token + "' out of range");
    }
  }
}

std::size_t IdfTable::document_frequency(std::string_view token) const {
  auto it = df_.find(std::string(token));
  return it == df_.end() ? 0 : it->second;
}

double IdfTable::idf(std::string_view token) const {
  const std::size_t df = std::max<std::size_t>(1, document_frequency(token));
  return std::log(static_cast<double>(document_count_) / static_cast<double>(df));
}

IdfTable compute_idf(std::span<const TokenSequence> documents) {
  if (documents.empty()) throw EmptyInput("compute_idf needs at least one document");
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : documents) {
    std::unordered_set<std::string_view> unique(doc.begin(), doc.end());
    for (auto token : unique) ++df[std::string(token)];
  }
  return IdfTable(documents.size(), std::move(df));
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw DimensionMismatch("cosine of vectors with lengths " + std::to_string(u.size()) + " and " +
                            std::to_string(v.size()));
  }
  double dot = 0.0;
  double uu = 0.0;
  double vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) return 0.0;
  // sqrt(uu * vv) keeps cos(u, u) == 1 and cos(u, v) == cos(v, u) exactly;
  // the split form is only a fallback when the product leaves double range.
  const double product = uu * vv;
  const double norm = std::isfinite(product) && product >= std::numeric_limits<double>::min()
                          ? std::sqrt(product)
                          : std::sqrt(uu) * std::sqrt(vv);
  return std::clamp(dot / norm, -1.0, 1.0);
}

KeywordSet content_keywords(const TokenSequence& tokens, const IdfTable& idf, const StopwordSet& stopwords,
                            double idf_floor) {
  KeywordSet keywords;
  for (const auto& t : tokens) {
    if (stopwords.count(t) != 0) continue;
    if (idf.idf(t) < idf_floor) continue;
    keywords.insert(t);
  }
  return keywords;
}

}  // namespace hsc
