#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace hsc::fixtures {

const char* const kPhotovoltaicDescription =
    "Photovoltaic cell panel silicon (Si) embedded in plastic (EVA) and assembled a layer of glass and fiberglass "
    "and upper layer of \"Tedlar EVA\", with an aluminum frame, which converts sunlight into electricity. Type cells "
    "are polycrystalline, with a maximum power of 135W. Each panel has 36 cells connected in series and the open "
    "circuit voltage is 22.1V. Incorporates type diodes \"bypass\" of protection in the junction box and cables. It "
    "has no other devices that allow power directly usable. Dimensions 1008 x 992 x 35mm and a weight of 13.5kg.";

std::string photovoltaic_case_json() {
  std::string escaped;
  for (const char* p = kPhotovoltaicDescription; *p; ++p) {
    if (*p == '"') escaped += '\\';
    escaped += *p;
  }
  return R"({"id":"PV-0001","description":")" + escaped +
         R"(","hs_code":"8541.40-9000","date":"2021-02-10","origin":"international"})";
}

std::vector<std::string> table2_sentences() {
  return {
      "85.41 Diodes, transistors and similar semiconductor devices; photosensitive semiconductor devices, "
      "including photovoltaic cells whether or not assembled in modules or made up into panels; light-emitting "
      "diodes (LED); mounted piezo-electric crystals (+).",
      "8541.40 Photosensitive semiconductor devices, including photovoltaic cells whether or not assembled in "
      "modules or made up into panels; light-emitting diodes (LED)",
      "(B) PHOTOSENSITIVE SEMICONDUCTOR DEVICES",
      "This group comprises photosensitive semiconductor devices in which the action of visible rays, infra red "
      "rays or ultra violet rays causes variations in resistivity or generates an electromotive force, by the "
      "internal photoelectric effect.",
  };
}

Manual fixture_manual() {
  Manual m;
  auto s8541 = table2_sentences();
  s8541.push_back("8541.10 Diodes, other than photosensitive or light-emitting diodes (LED), such as rectifier "
                  "diodes in plastic packages.");
  m.emplace("8541", ManualEntry{"8541", s8541});
  m.emplace("8528",
            ManualEntry{"8528",
                        {"85.28 Monitors and projectors, not incorporating television reception apparatus; "
                         "reception apparatus for television.",
                         "8528.59 Other monitors, such as colour monitors with liquid crystal screens.",
                         "8528.72 Other reception apparatus for television, colour, with tuner.",
                         "This heading covers monitors which display signals from a computer or video source."}});
  return m;
}

namespace {

DecisionCase make_case(std::string id, std::string description, const std::string& code, const std::string& date,
                       std::optional<std::vector<std::string>> gold = std::nullopt) {
  DecisionCase c;
  c.id = std::move(id);
  c.description = std::move(description);
  c.label = parse_hs_code(code);
  c.decision_date = *parse_iso_date(date);
  c.gold_evidence = std::move(gold);
  return c;
}

}  // namespace

std::vector<DecisionCase> fixture_cases() {
  const auto manual = fixture_manual();
  const auto& m41 = manual.at("8541").sentences;
  const auto& m28 = manual.at("8528").sentences;
  return {
      make_case("FX-001", "Silicon rectifier diode in a plastic package, rated 1A", "8541.10", "2021-01-15"),
      make_case("PV-0001", kPhotovoltaicDescription, "8541.40-9000", "2021-02-10"),
      make_case("FX-003", "Colour monitor with liquid crystal screen for computer video signals", "8528.59",
                "2021-03-04"),
      make_case("FX-004", "Solar photovoltaic module of monocrystalline silicon cells in an aluminum frame, 300W",
                "8541.40", "2021-04-02"),
      make_case("FX-005", "Television receiver, colour, with 55 inch screen and digital tuner", "8528.72",
                "2021-04-20"),
      make_case("FX-006", "Switching diode of silicon, glass package, not light-emitting", "8541.10", "2021-05-11"),
      make_case("FX-007", "Computer monitor with colour liquid crystal display and video input", "8528.59",
                "2021-06-01"),
      make_case("FX-008", "Colour television reception apparatus with tuner and remote control", "8528.72",
                "2021-06-21"),
      make_case("FX-009", "Rectifier diode assembly in plastic housing", "8541.10", "2021-07-08"),
      make_case("FX-010", "Photovoltaic panel of polycrystalline silicon cells with junction box, 250W", "8541.40",
                "2021-08-11"),
      make_case("FX-011", "Liquid crystal colour monitor for a computer", "8528.59", "2021-08-30"),
      make_case("FX-012", "Colour television receiver with tuner", "8528.72", "2021-09-14"),
      make_case("FX-013", "Silicon diode in plastic package for rectifier circuits", "8541.10", "2021-10-06",
                std::vector<std::string>{m41[0], m41[4]}),
      make_case("FX-014", "Solar cell panel assembled from silicon photovoltaic cells in a glass laminate",
                "8541.40", "2021-11-05", std::vector<std::string>{m41[0], m41[1]}),
      make_case("FX-015", "Colour monitor, liquid crystal screen, video signals", "8528.59", "2021-11-23",
                std::vector<std::string>{m28[0], m28[1]}),
      make_case("FX-016", "Television reception apparatus, colour, with digital tuner", "8528.72", "2021-12-17",
                std::vector<std::string>{m28[0], m28[2]}),
  };
}

WordVectorTable hashed_vectors(const std::vector<std::string>& texts, std::size_t dimension) {
  std::set<std::string> tokens;
  for (const auto& t : texts) {
    for (auto& tok : tokenize(t)) tokens.insert(tok);
  }
  WordVectorTable table(dimension);
  for (const auto& tok : tokens) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : tok) h = (h ^ ch) * 1099511628211ULL;
    std::mt19937_64 rng(h);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(dimension);
    for (auto& x : v) x = normal(rng);
    table.insert(tok, v);
  }
  return table;
}

WordVectorTable fixture_vectors(std::size_t dimension) {
  std::vector<std::string> texts;
  for (const auto& c : fixture_cases()) texts.push_back(c.description);
  for (const auto& [h, e] : fixture_manual()) texts.insert(texts.end(), e.sentences.begin(), e.sentences.end());
  return hashed_vectors(texts, dimension);
}

std::vector<std::string> camera_retrieved() {
  return {
      "PARTS",
      "TELEVISION CAMERAS, DIGITAL CAMERAS AND VIDEO CAMERA RECORDERS",
      "Transmission apparatus for radio-broadcasting or television, whether or not incorporating reception "
      "apparatus or sound recording or reproducing apparatus; television cameras, digital cameras and video camera "
      "recorders.",
      "In digital cameras and video camera recorders, the images are recorded on an internal storage medium.",
  };
}

std::vector<std::string> camera_gold() {
  return {
      "Transmission apparatus for radio-broadcasting or television, whether or not incorporating reception "
      "apparatus or sound recording or reproducing apparatus; television cameras, digital cameras and video camera "
      "recorders.",
      "TELEVISION CAMERAS, DIGITAL CAMERAS AND VIDEO CAMERA RECORDERS",
      "This group covers cameras that capture images and convert them into electrical signals.",
      "In digital cameras and video camera recorders, the images are recorded on an internal storage medium or "
      "removable card.",
  };
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("hsc-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FixtureFiles write_fixture_files(const std::filesystem::path& dir) {
  FixtureFiles f{dir / "cases.jsonl", dir / "manual.jsonl", dir / "vectors.txt"};
  {
    std::ofstream out(f.cases);
    write_cases(out, fixture_cases());
  }
  {
    std::ofstream out(f.manual);
    write_manual(out, fixture_manual());
  }
  {
    std::ofstream out(f.vectors);
    write_word_vectors(out, fixture_vectors());
  }
  return f;
}

}  // namespace hsc::fixtures
