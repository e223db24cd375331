#include "hsc/case_retrieval.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "hsc/error.hpp"
#include "hsc/textproc.hpp"
#include "json_io.hpp"

namespace hsc {

void CaseIndex::add(const std::string& subheading, IndexedCase entry) {
  if (entry.embedding.size() != dimension_) {
    throw DimensionMismatch("case '" + entry.id + "' embedding has length " +
                            std::to_string(entry.embedding.size()) + ", index expects " +
                            std::to_string(dimension_));
  }
  auto& bucket = buckets_[subheading];
  if (!ids_.emplace(entry.id, std::make_pair(subheading, bucket.size())).second) {
    throw DuplicateId("case id '" + entry.id + "' already indexed");
  }
  bucket.push_back(std::move(entry));
}

const IndexedCase* CaseIndex::find(const std::string& id) const {
  auto it = ids_.find(id);
  if (it == ids_.end()) return nullptr;
  return &buckets_.at(it->second.first)[it->second.second];
}

std::vector<SimilarCase> CaseIndex::similar_cases(std::span<const double> query, const std::string& subheading,
                                                  std::size_t m) const {
  auto it = buckets_.find(subheading);
  if (it == buckets_.end() || m == 0) return {};
  std::vector<SimilarCase> scored;
  scored.reserve(it->second.size());
  for (const auto& c : it->second) scored.push_back({c.id, cosine(query, c.embedding)});
  const std::size_t keep = std::min(m, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                    [](const SimilarCase& a, const SimilarCase& b) {
                      if (a.similarity != b.similarity) return a.similarity > b.similarity;
                      return a.id < b.id;
                    });
  scored.resize(keep);
  return scored;
}

std::string make_snippet(std::string_view description, std::size_t max_bytes) {
  if (description.size() <= max_bytes) return std::string(description);
  std::size_t cut = max_bytes;
  while (cut > 0 && (static_cast<unsigned char>(description[cut]) & 0xC0) == 0x80) --cut;
  return std::string(description.substr(0, cut)) + "...";
}

CaseIndex build_index(std::span<const DecisionCase> cases, const DescriptionEncoder& encoder,
                      std::span<const RetrievalResult> evidence) {
  if (cases.empty()) throw EmptyInput("cannot index zero cases");
  if (evidence.size() != cases.size()) throw DimensionMismatch("one retrieval result per case is required");
  CaseIndex index(encoder.output_dimension());
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto texts = evidence[i].texts();
    index.add(cases[i].label.subheading,
              {cases[i].id, encoder.encode_with_evidence(cases[i].description, texts),
               make_snippet(cases[i].description)});
  }
  return index;
}

void write_case_index(std::ostream& out, const CaseIndex& index) {
  detail::json j;
  j["format"] = "hsc.case_index";
  j["version"] = 1;
  j["dimension"] = index.dimension();
  auto buckets = detail::json::object();
  for (const auto& [subheading, entries] : index.buckets()) {
    auto list = detail::json::array();
    for (const auto& e : entries) list.push_back({{"id", e.id}, {"snippet", e.snippet}, {"embedding", e.embedding}});
    buckets[subheading] = std::move(list);
  }
  j["buckets"] = std::move(buckets);
  out << j.dump() << '\n';
}

CaseIndex read_case_index(std::istream& in, const std::string& source_name) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const auto j = detail::parse_json(buffer.str(), source_name);
  using detail::get_field;
  if (get_field<std::string>(j, "format", source_name) != "hsc.case_index") {
    throw ParseError(source_name + ": not a case index");
  }
  CaseIndex index(get_field<std::size_t>(j, "dimension", source_name));
  for (const auto& [subheading, list] : j.at("buckets").items()) {
    for (const auto& e : list) {
      index.add(subheading, {get_field<std::string>(e, "id", source_name),
                             get_field<std::vector<double>>(e, "embedding", source_name),
                             get_field<std::string>(e, "snippet", source_name)});
    }
  }
  return index;
}

}  // namespace hsc
