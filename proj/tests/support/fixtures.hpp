#pragma once

// Small hand-written corpus around the photovoltaic example and helpers for
// tests that touch the filesystem.

#include <filesystem>
#include <string>
#include <vector>

#include "hsc/corpus.hpp"
#include "hsc/textproc.hpp"

namespace hsc::fixtures {

extern const char* const kPhotovoltaicDescription;

/// The photovoltaic ruling as one JSONL record.
std::string photovoltaic_case_json();

/// Heading 85.41 as four manual paragraphs.
std::vector<std::string> table2_sentences();

/// Four subheadings (854110, 854140, 852859, 852872), two train cases each
/// in 2021-01..06, one validation case in 07..09 and one test case in
/// 10..12 with gold evidence. The photovoltaic ruling is a train case.
std::vector<DecisionCase> fixture_cases();
Manual fixture_manual();

/// Deterministic pseudo-random vectors (seeded by a hash of the token) for
/// every token of `texts`.
WordVectorTable hashed_vectors(const std::vector<std::string>& texts, std::size_t dimension);
WordVectorTable fixture_vectors(std::size_t dimension = 16);

/// Expert quotes and model output from the camera ruling comparison: four
/// retrieved, four gold, three equivalent pairs.
std::vector<std::string> camera_retrieved();
std::vector<std::string> camera_gold();

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

struct FixtureFiles {
  std::filesystem::path cases;
  std::filesystem::path manual;
  std::filesystem::path vectors;
};
/// Writes the fixture corpus into `dir`.
FixtureFiles write_fixture_files(const std::filesystem::path& dir);

}  // namespace hsc::fixtures
