#pragma once

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hsc {

/// The internationally standardized six-digit prefix of a tariff code.
/// Construct through parse_hs_code(); the fields always satisfy
/// chapter ⊂ heading ⊂ subheading as string prefixes.
struct HsCode {
  std::string chapter;     // 2 digits
  std::string heading;     // 4 digits
  std::string subheading;  // 6 digits

  friend bool operator==(const HsCode&, const HsCode&) = default;
  friend auto operator<=>(const HsCode& a, const HsCode& b) { return a.subheading <=> b.subheading; }
};

/// Parses "8541.40-9000", "852859", "8541 40" ... Separators '.', '-' and
/// whitespace are dropped; digits past the sixth (national extensions) are
/// discarded. Throws MalformedCode.
HsCode parse_hs_code(std::string_view raw);

/// Dotted form, e.g. "8541.40". parse_hs_code(format_hs_code(c)) == c.
std::string format_hs_code(const HsCode& code);

/// True when `s` is exactly four decimal digits.
bool is_heading_code(std::string_view s);

using Date = std::chrono::year_month_day;

/// Strict YYYY-MM-DD. Returns nullopt for anything else, including
/// impossible calendar dates.
std::optional<Date> parse_iso_date(std::string_view s);
std::string format_iso_date(const Date& d);

enum class Origin { international, domestic };

std::string_view to_string(Origin origin);
std::optional<Origin> parse_origin(std::string_view s);

struct DecisionCase {
  std::string id;
  std::string description;
  HsCode label;
  Date decision_date;
  Origin origin = Origin::international;
  std::optional<std::vector<std::string>> gold_evidence;

  friend bool operator==(const DecisionCase&, const DecisionCase&) = default;
};

struct ManualEntry {
  std::string heading;
  std::vector<std::string> sentences;

  friend bool operator==(const ManualEntry&, const ManualEntry&) = default;
};

using Manual = std::map<std::string, ManualEntry>;

struct CaseLoadOptions {
  // Cases dated after this are rejected. Defaults to the current UTC date.
  std::optional<Date> ingestion_date;
};

/// Line-delimited JSON records with keys id, description, hs_code, date,
/// origin and optional revoked / gold_evidence. Revoked cases are dropped.
/// Blank lines are skipped. Throws ParseError (with line) or DuplicateId.
std::vector<DecisionCase> load_cases(const std::string& path, const CaseLoadOptions& options = {});
std::vector<DecisionCase> read_cases(std::istream& in, const std::string& source_name,
                                     const CaseLoadOptions& options = {});
void write_cases(std::ostream& out, const std::vector<DecisionCase>& cases);

/// Line-delimited JSON records {heading, sentences:[...]}. Throws ParseError
/// or DuplicateHeading.
Manual load_manual(const std::string& path);
Manual read_manual(std::istream& in, const std::string& source_name);
void write_manual(std::ostream& out, const Manual& manual);

/// Sorted unique heading and subheading labels with bidirectional index maps.
class LabelSpace {
 public:
  LabelSpace() = default;
  LabelSpace(std::vector<std::string> headings, std::vector<std::string> subheadings);

  const std::vector<std::string>& headings() const noexcept { return headings_; }
  const std::vector<std::string>& subheadings() const noexcept { return subheadings_; }

  std::optional<std::size_t> heading_index(std::string_view heading) const;
  std::optional<std::size_t> subheading_index(std::string_view subheading) const;

  friend bool operator==(const LabelSpace& a, const LabelSpace& b) {
    return a.headings_ == b.headings_ && a.subheadings_ == b.subheadings_;
  }

 private:
  std::vector<std::string> headings_;
  std::vector<std::string> subheadings_;
  std::unordered_map<std::string, std::size_t> heading_lookup_;
  std::unordered_map<std::string, std::size_t> subheading_lookup_;
};

/// Throws EmptyInput.
LabelSpace build_label_space(const std::vector<DecisionCase>& cases);

struct DatasetSplit {
  std::vector<DecisionCase> train;
  std::vector<DecisionCase> validation;
  std::vector<DecisionCase> test;
  std::vector<std::string> warnings;
};

/// Calendar-month windows anchored at the month of the latest decision date:
/// test covers the final `test_months` months, validation the
/// `validation_months` months before that, train everything earlier.
/// Input order is preserved inside each partition.
DatasetSplit chronological_split(const std::vector<DecisionCase>& cases, int validation_months = 3,
                                 int test_months = 3);

}  // namespace hsc
