#include "hsc/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

#include "hsc/error.hpp"
#include "json.hpp"

namespace hsc {

using nlohmann::json;

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_separator(char c) {
  return c == '.' || c == '-' || c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

Date today_utc() {
  return Date{std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now())};
}

int month_index(const Date& d) {
  return static_cast<int>(d.year()) * 12 + static_cast<int>(static_cast<unsigned>(d.month())) - 1;
}

const std::string& require_string(const json& record, const char* key, const std::string& source,
                                  std::size_t line) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) {
    throw ParseError(source, line, std::string("missing field '") + key + "'");
  }
  if (!it->is_string()) {
    throw ParseError(source, line, std::string("field '") + key + "' must be a string");
  }
  return it->get_ref<const std::string&>();
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open '" + path + "' for reading");
  }
  return in;
}

}  // namespace

HsCode parse_hs_code(std::string_view raw) {
  std::string digits;
  for (char c : raw) {
    if (is_separator(c)) continue;
    if (digits.size() < 6 && !is_digit(c)) {
      throw MalformedCode("non-digit character in HS code '" + std::string(raw) + "'");
    }
    if (digits.size() == 6) break;
    digits.push_back(c);
  }
  if (digits.size() < 6) {
    throw MalformedCode("HS code '" + std::string(raw) + "' has fewer than 6 digits");
  }
  return HsCode{digits.substr(0, 2), digits.substr(0, 4), digits};
}

std::string format_hs_code(const HsCode& code) {
  return code.heading + "." + code.subheading.substr(4, 2);
}

bool is_heading_code(std::string_view s) {
  return s.size() == 4 && std::all_of(s.begin(), s.end(), is_digit);
}

std::optional<Date> parse_iso_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  auto field = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int value = 0;
    auto first = s.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, value);
    if (ec != std::errc{} || ptr != first + len) return std::nullopt;
    return value;
  };
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (!is_digit(s[i])) return std::nullopt;
  }
  auto y = field(0, 4);
  auto m = field(5, 2);
  auto d = field(8, 2);
  if (!y || !m || !d) return std::nullopt;
  Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
            std::chrono::day{static_cast<unsigned>(*d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_iso_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

std::string_view to_string(Origin origin) {
  return origin == Origin::domestic ? "domestic" : "international";
}

std::optional<Origin> parse_origin(std::string_view s) {
  if (s == "international") return Origin::international;
  if (s == "domestic") return Origin::domestic;
  return std::nullopt;
}

std::vector<DecisionCase> read_cases(std::istream& in, const std::string& source_name,
                                     const CaseLoadOptions& options) {
  const Date ingestion = options.ingestion_date.value_or(today_utc());
  std::vector<DecisionCase> cases;
  std::unordered_set<std::string> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (blank(text)) continue;
    json record;
    try {
      record = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(source_name, line, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) throw ParseError(source_name, line, "record is not an object");

    DecisionCase c;
    c.id = require_string(record, "id", source_name, line);
    if (blank(c.id)) throw ParseError(source_name, line, "empty id");
    c.description = require_string(record, "description", source_name, line);
    if (blank(c.description)) throw ParseError(source_name, line, "empty description");
    try {
      c.label = parse_hs_code(require_string(record, "hs_code", source_name, line));
    } catch (const MalformedCode& e) {
      throw ParseError(source_name, line, e.what());
    }
    auto date = parse_iso_date(require_string(record, "date", source_name, line));
    if (!date) throw ParseError(source_name, line, "date is not a valid YYYY-MM-DD");
    if (*date > ingestion) throw ParseError(source_name, line, "date lies after the ingestion date");
    c.decision_date = *date;
    auto origin = parse_origin(require_string(record, "origin", source_name, line));
    if (!origin) throw ParseError(source_name, line, "origin must be 'international' or 'domestic'");
    c.origin = *origin;

    if (auto it = record.find("gold_evidence"); it != record.end() && !it->is_null()) {
      if (!it->is_array()) throw ParseError(source_name, line, "gold_evidence must be an array");
      std::vector<std::string> evidence;
      for (const auto& s : *it) {
        if (!s.is_string()) throw ParseError(source_name, line, "gold_evidence entries must be strings");
        evidence.push_back(s.get<std::string>());
      }
      c.gold_evidence = std::move(evidence);
    }

    bool revoked = false;
    if (auto it = record.find("revoked"); it != record.end() && !it->is_null()) {
      if (!it->is_boolean()) throw ParseError(source_name, line, "revoked must be a boolean");
      revoked = it->get<bool>();
    }
    if (!seen.insert(c.id).second) {
      throw DuplicateId(source_name + ":" + std::to_string(line) + ": duplicate case id '" + c.id + "'");
    }
    if (revoked) continue;
    cases.push_back(std::move(c));
  }
  return cases;
}

std::vector<DecisionCase> load_cases(const std::string& path, const CaseLoadOptions& options) {
  auto in = open_input(path);
  return read_cases(in, path, options);
}

void write_cases(std::ostream& out, const std::vector<DecisionCase>& cases) {
  for (const auto& c : cases) {
    json record = json::object();
    record["id"] = c.id;
    record["description"] = c.description;
    record["hs_code"] = format_hs_code(c.label);
    record["date"] = format_iso_date(c.decision_date);
    record["origin"] = std::string(to_string(c.origin));
    if (c.gold_evidence) record["gold_evidence"] = *c.gold_evidence;
    out << record.dump() << '\n';
  }
}

Manual read_manual(std::istream& in, const std::string& source_name) {
  Manual manual;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (blank(text)) continue;
    json record;
    try {
      record = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(source_name, line, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) throw ParseError(source_name, line, "record is not an object");
    ManualEntry entry;
    std::string raw_heading = require_string(record, "heading", source_name, line);
    raw_heading.erase(std::remove(raw_heading.begin(), raw_heading.end(), '.'), raw_heading.end());
    if (!is_heading_code(raw_heading)) {
      throw ParseError(source_name, line, "heading must be four digits");
    }
    entry.heading = raw_heading;
    auto it = record.find("sentences");
    if (it == record.end() || !it->is_array()) {
      throw ParseError(source_name, line, "missing 'sentences' array");
    }
    for (const auto& s : *it) {
      if (!s.is_string()) throw ParseError(source_name, line, "sentences must be strings");
      const auto& str = s.get_ref<const std::string&>();
      if (blank(str)) throw ParseError(source_name, line, "empty sentence");
      entry.sentences.push_back(str);
    }
    if (entry.sentences.empty()) throw ParseError(source_name, line, "empty sentence list");
    if (manual.count(entry.heading) != 0) {
      throw DuplicateHeading(source_name + ":" + std::to_string(line) + ": duplicate heading '" +
                             entry.heading + "'");
    }
    manual.emplace(entry.heading, std::move(entry));
  }
  return manual;
}

Manual load_manual(const std::string& path) {
  auto in = open_input(path);
  return read_manual(in, path);
}

void write_manual(std::ostream& out, const Manual& manual) {
  for (const auto& [heading, entry] : manual) {
    json record = json::object();
    record["heading"] = heading;
    record["sentences"] = entry.sentences;
    out << record.dump() << '\n';
  }
}

LabelSpace::LabelSpace(std::vector<std::string> headings, std::vector<std::string> subheadings)
    : headings_(std::move(headings)), subheadings_(std::move(subheadings)) {
  for (std::size_t i = 0; i < headings_.size(); ++i) {
    if (!heading_lookup_.emplace(headings_[i], i).second) {
      throw InputError("duplicate heading label '" + headings_[i] + "'");
    }
  }
  for (std::size_t i = 0; i < subheadings_.size(); ++i) {
    const auto& s = subheadings_[i];
    if (s.size() != 6 || heading_lookup_.count(s.substr(0, 4)) == 0) {
      throw InputError("subheading '" + s + "' has no parent heading in the label space");
    }
    if (!subheading_lookup_.emplace(s, i).second) {
      throw InputError("duplicate subheading label '" + s + "'");
    }
  }
}

std::optional<std::size_t> LabelSpace::heading_index(std::string_view heading) const {
  auto it = heading_lookup_.find(std::string(heading));
  if (it == heading_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> LabelSpace::subheading_index(std::string_view subheading) const {
  auto it = subheading_lookup_.find(std::string(subheading));
  if (it == subheading_lookup_.end()) return std::nullopt;
  return it->second;
}

LabelSpace build_label_space(const std::vector<DecisionCase>& cases) {
  if (cases.empty()) throw EmptyInput("cannot build a label space from zero cases");
  std::set<std::string> headings;
  std::set<std::string> subheadings;
  for (const auto& c : cases) {
    headings.insert(c.label.heading);
    subheadings.insert(c.label.subheading);
  }
  return LabelSpace({headings.begin(), headings.end()}, {subheadings.begin(), subheadings.end()});
}

DatasetSplit chronological_split(const std::vector<DecisionCase>& cases, int validation_months,
                                 int test_months) {
  if (cases.empty()) throw EmptyInput("cannot split zero cases");
  if (validation_months < 1 || test_months < 1) {
    throw InputError("validation_months and test_months must be at least 1");
  }
  int latest = month_index(cases.front().decision_date);
  for (const auto& c : cases) latest = std::max(latest, month_index(c.decision_date));
  const int test_start = latest - test_months + 1;
  const int validation_start = test_start - validation_months;

  DatasetSplit split;
  for (const auto& c : cases) {
    const int m = month_index(c.decision_date);
    if (m >= test_start) {
      split.test.push_back(c);
    } else if (m >= validation_start) {
      split.validation.push_back(c);
    } else {
      split.train.push_back(c);
    }
  }
  if (split.train.empty()) split.warnings.emplace_back("chronological split: training partition is empty");
  if (split.validation.empty()) {
    split.warnings.emplace_back("chronological split: validation partition is empty");
  }
  return split;
}

}  // namespace hsc
