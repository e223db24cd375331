#include "hsc/report.hpp"

#include <cstdio>
#include <sstream>

#include "hsc/error.hpp"
#include "json_io.hpp"

namespace hsc {

namespace {

using detail::json;

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string dotted_heading(const std::string& h) { return h.size() == 4 ? h.substr(0, 2) + "." + h.substr(2) : h; }

std::string dotted_subheading(const std::string& s) {
  return s.size() == 6 ? s.substr(0, 4) + "." + s.substr(4) : s;
}

}  // namespace

std::string render_text(const CandidateReport& report) {
  std::ostringstream out;
  out << "Item description: " << report.description << "\n\n";
  out << "Heading candidates\n";
  for (std::size_t i = 0; i < report.headings.size(); ++i) {
    const auto& h = report.headings[i];
    out << "  " << i + 1 << ". " << dotted_heading(h.heading) << "  score " << fixed4(h.score) << "\n";
    if (h.manual_missing) {
      out << "     Key sentences: none (no manual entry for this heading)\n";
      continue;
    }
    if (h.key_sentences.empty()) {
      out << "     Key sentences: none retrieved\n";
      continue;
    }
    out << "     Key sentences:\n";
    for (std::size_t j = 0; j < h.key_sentences.size(); ++j) {
      out << "       (" << j + 1 << ") " << h.key_sentences[j].text << "\n";
    }
  }
  out << "\nSubheading candidates\n";
  for (std::size_t i = 0; i < report.subheadings.size(); ++i) {
    const auto& s = report.subheadings[i];
    out << "  " << i + 1 << ". " << dotted_subheading(s.subheading) << "  score " << fixed4(s.score) << "\n";
    if (s.similar_cases.empty()) {
      out << "     Similar cases: none\n";
      continue;
    }
    out << "     Similar cases:\n";
    for (const auto& c : s.similar_cases) {
      out << "       - " << c.id << " (" << fixed4(c.similarity) << "): " << c.snippet << "\n";
    }
  }
  if (!report.evidence_used) out << "\n(subheading scores computed without key sentences)\n";
  return out.str();
}

std::string render_structured(const CandidateReport& report) {
  json j;
  j["description"] = report.description;
  j["evidence_used"] = report.evidence_used;
  auto headings = json::array();
  for (const auto& h : report.headings) {
    auto sentences = json::array();
    for (const auto& s : h.key_sentences) sentences.push_back({{"index", s.index}, {"text", s.text}, {"score", s.score}});
    headings.push_back({{"heading", h.heading},
                        {"score", h.score},
                        {"manual_missing", h.manual_missing},
                        {"key_sentences", std::move(sentences)}});
  }
  j["headings"] = std::move(headings);
  auto subheadings = json::array();
  for (const auto& s : report.subheadings) {
    auto cases = json::array();
    for (const auto& c : s.similar_cases) {
      cases.push_back({{"id", c.id}, {"similarity", c.similarity}, {"snippet", c.snippet}});
    }
    subheadings.push_back({{"subheading", s.subheading}, {"score", s.score}, {"similar_cases", std::move(cases)}});
  }
  j["subheadings"] = std::move(subheadings);
  return j.dump(2) + "\n";
}

CandidateReport parse_report(std::string_view json_text) {
  const std::string src = "report";
  const auto j = detail::parse_json(json_text, src);
  using detail::get_field;
  CandidateReport r;
  r.description = get_field<std::string>(j, "description", src);
  r.evidence_used = get_field<bool>(j, "evidence_used", src);
  for (const auto& h : j.at("headings")) {
    HeadingCandidate c;
    c.heading = get_field<std::string>(h, "heading", src);
    c.score = get_field<double>(h, "score", src);
    c.manual_missing = get_field<bool>(h, "manual_missing", src);
    for (const auto& s : h.at("key_sentences")) {
      c.key_sentences.push_back({get_field<std::string>(s, "text", src), get_field<std::size_t>(s, "index", src),
                                 get_field<double>(s, "score", src)});
    }
    r.headings.push_back(std::move(c));
  }
  for (const auto& s : j.at("subheadings")) {
    SubheadingCandidate c;
    c.subheading = get_field<std::string>(s, "subheading", src);
    c.score = get_field<double>(s, "score", src);
    for (const auto& m : s.at("similar_cases")) {
      c.similar_cases.push_back({get_field<std::string>(m, "id", src), get_field<double>(m, "similarity", src),
                                 get_field<std::string>(m, "snippet", src)});
    }
    r.subheadings.push_back(std::move(c));
  }
  return r;
}

}  // namespace hsc
