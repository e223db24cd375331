#include "hsc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "hsc/error.hpp"
#include "json_io.hpp"

namespace hsc {

namespace {

using detail::json;

std::vector<std::size_t> heading_targets(const std::vector<DecisionCase>& cases, const LabelSpace& labels) {
  std::vector<std::size_t> y;
  y.reserve(cases.size());
  for (const auto& c : cases) y.push_back(labels.heading_index(c.label.heading).value_or(kUnknownLabel));
  return y;
}

std::vector<std::size_t> subheading_targets(const std::vector<DecisionCase>& cases, const LabelSpace& labels) {
  std::vector<std::size_t> y;
  y.reserve(cases.size());
  for (const auto& c : cases) y.push_back(labels.subheading_index(c.label.subheading).value_or(kUnknownLabel));
  return y;
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Temperature fit restricted to examples with a known label; T = 1 when none.
TemperatureScaler fit_on_known(const std::vector<std::vector<double>>& logits, const std::vector<std::size_t>& y,
                               const char* stage, std::vector<std::string>& warnings) {
  std::vector<std::vector<double>> z;
  std::vector<std::size_t> labels;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (y[i] == kUnknownLabel) continue;
    z.push_back(logits[i]);
    labels.push_back(y[i]);
  }
  if (z.empty()) {
    warnings.push_back(std::string("no usable validation cases for the ") + stage +
                       " temperature; using T = 1");
    return TemperatureScaler(1.0);
  }
  return fit_temperature(z, labels);
}

json train_config_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"seed", c.seed},
          {"l2_penalty", c.l2_penalty}};
}

TrainConfig train_config_from(const json& j, const std::string& src) {
  using detail::get_field;
  TrainConfig c;
  c.epochs = get_field<int>(j, "epochs", src);
  c.learning_rate = get_field<double>(j, "learning_rate", src);
  c.batch_size = get_field<int>(j, "batch_size", src);
  c.seed = get_field<std::uint64_t>(j, "seed", src);
  c.l2_penalty = get_field<double>(j, "l2_penalty", src);
  return c;
}

json config_json(const PipelineConfig& c) {
  return {{"heading_train", train_config_json(c.heading_train)},
          {"subheading_train", train_config_json(c.subheading_train)},
          {"retrieval",
           {{"max_sentences", c.retrieval.max_sentences},
            {"coverage_threshold", c.retrieval.coverage_threshold},
            {"idf_floor", c.retrieval.idf_floor}}},
          {"use_evidence", c.use_evidence},
          {"train_ablation", c.train_ablation},
          {"mask_to_heading", c.mask_to_heading},
          {"evidence_mode", c.evidence_mode == EvidenceMode::mixture ? "mixture" : "top_heading"},
          {"similar_cases", c.similar_cases},
          {"normalize_embeddings", c.normalize_embeddings},
          {"validation_months", c.validation_months},
          {"test_months", c.test_months}};
}

PipelineConfig config_from(const json& j, const std::string& src) {
  using detail::get_field;
  PipelineConfig c;
  c.heading_train = train_config_from(j.at("heading_train"), src);
  c.subheading_train = train_config_from(j.at("subheading_train"), src);
  const auto& r = j.at("retrieval");
  c.retrieval.max_sentences = get_field<std::size_t>(r, "max_sentences", src);
  c.retrieval.coverage_threshold = get_field<double>(r, "coverage_threshold", src);
  c.retrieval.idf_floor = get_field<double>(r, "idf_floor", src);
  c.use_evidence = get_field<bool>(j, "use_evidence", src);
  c.train_ablation = get_field<bool>(j, "train_ablation", src);
  c.mask_to_heading = get_field<bool>(j, "mask_to_heading", src);
  c.evidence_mode =
      get_field<std::string>(j, "evidence_mode", src) == "mixture" ? EvidenceMode::mixture : EvidenceMode::top_heading;
  c.similar_cases = get_field<std::size_t>(j, "similar_cases", src);
  c.normalize_embeddings = get_field<bool>(j, "normalize_embeddings", src);
  c.validation_months = get_field<int>(j, "validation_months", src);
  c.test_months = get_field<int>(j, "test_months", src);
  return c;
}

json report_json(const TrainReport& r) {
  return {{"training_loss", r.training_loss},
          {"validation_accuracy", r.validation_accuracy},
          {"best_epoch", r.best_epoch},
          {"validation_empty", r.validation_empty}};
}

TrainReport report_from(const json& j, const std::string& src) {
  using detail::get_field;
  TrainReport r;
  r.training_loss = get_field<std::vector<double>>(j, "training_loss", src);
  r.validation_accuracy = get_field<std::vector<double>>(j, "validation_accuracy", src);
  r.best_epoch = get_field<std::size_t>(j, "best_epoch", src);
  r.validation_empty = get_field<bool>(j, "validation_empty", src);
  return r;
}

std::string dump_to_string(const auto& writer) {
  std::ostringstream out;
  writer(out);
  return out.str();
}

constexpr const char* kManifest = "manifest.json";
constexpr const char* kHeadingFile = "heading_classifier.json";
constexpr const char* kSubheadingFile = "subheading_classifier.json";
constexpr const char* kAblationFile = "subheading_ablation_classifier.json";
constexpr const char* kIndexFile = "case_index.json";
constexpr const char* kIdfFile = "idf.json";
constexpr const char* kVectorsFile = "vectors.txt";
constexpr const char* kStopwordsFile = "stopwords.txt";
constexpr const char* kManualFile = "manual.jsonl";

}  // namespace

void PipelineModel::require_trained() const {
  if (!trained()) throw UntrainedModel("the pipeline model has not been trained");
}

void PipelineModel::build_encoders() {
  auto encoder = std::make_shared<PooledEncoder>(resources_.vectors, resources_.idf, config_.normalize_embeddings);
  heading_encoder_ = encoder;
  subheading_encoder_ = encoder;
}

const SoftmaxClassifier& PipelineModel::heading_classifier() const {
  require_trained();
  return *heading_classifier_;
}

const SoftmaxClassifier& PipelineModel::subheading_classifier() const {
  require_trained();
  return *subheading_classifier_;
}

std::vector<double> PipelineModel::heading_logits(std::string_view description) const {
  require_trained();
  return heading_classifier_->logits(heading_encoder_->encode(description));
}

std::vector<double> PipelineModel::masked(std::vector<double> logits, const std::string& top_heading) const {
  if (!config_.mask_to_heading) return logits;
  const auto& subs = labels_.subheadings();
  const bool any_child = std::any_of(subs.begin(), subs.end(),
                                     [&](const std::string& s) { return s.compare(0, 4, top_heading) == 0; });
  if (!any_child) return logits;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i].compare(0, 4, top_heading) != 0) logits[i] = -std::numeric_limits<double>::infinity();
  }
  return logits;
}

std::vector<double> PipelineModel::subheading_logits(std::string_view description, const RetrievalResult& evidence,
                                                     const std::string& top_heading) const {
  require_trained();
  Embedding x = config_.use_evidence ? subheading_encoder_->encode_with_evidence(description, evidence.texts())
                                     : subheading_encoder_->encode(description);
  return masked(subheading_classifier_->logits(x), top_heading);
}

std::vector<double> PipelineModel::ablation_logits(std::string_view description) const {
  require_trained();
  if (!ablation_classifier_) throw UntrainedModel("no description-only subheading variant was trained");
  return ablation_classifier_->logits(subheading_encoder_->encode(description));
}

std::optional<RetrievalResult> PipelineModel::key_sentences(std::string_view description,
                                                            const std::string& heading) const {
  auto it = manual_.find(heading);
  if (it == manual_.end()) return std::nullopt;
  return retrieve(description, it->second, config_.retrieval, resources_);
}

Analysis PipelineModel::analyze(std::string_view description) const {
  require_trained();
  Analysis a;
  const auto head_logits = heading_logits(description);
  a.heading_probabilities = heading_temperature_(head_logits);
  const std::string& top_heading = labels_.headings()[argmax(head_logits)];

  if (auto r = key_sentences(description, top_heading)) {
    a.top_evidence = std::move(*r);
  } else {
    a.top_manual_missing = true;
  }
  a.query_embedding = config_.use_evidence
                          ? subheading_encoder_->encode_with_evidence(description, a.top_evidence.texts())
                          : subheading_encoder_->encode(description);

  if (config_.use_evidence && config_.evidence_mode == EvidenceMode::mixture) {
    const std::size_t k = std::min<std::size_t>(3, labels_.headings().size());
    const auto candidates = top_k(a.heading_probabilities, k);
    double total = 0.0;
    for (const auto& c : candidates) total += c.probability;
    std::vector<double> mix(labels_.subheadings().size(), 0.0);
    for (const auto& c : candidates) {
      const auto& heading = labels_.headings()[c.index];
      const auto evidence = key_sentences(description, heading).value_or(RetrievalResult{});
      const auto p = subheading_temperature_(subheading_logits(description, evidence, heading));
      const double w = total > 0.0 ? c.probability / total : 1.0 / static_cast<double>(candidates.size());
      for (std::size_t i = 0; i < mix.size(); ++i) mix[i] += w * p[i];
    }
    double sum = 0.0;
    for (double v : mix) sum += v;
    for (auto& v : mix) v /= sum;
    a.subheading_probabilities = std::move(mix);
  } else {
    a.subheading_probabilities = subheading_temperature_(subheading_logits(description, a.top_evidence, top_heading));
  }
  if (ablation_classifier_) a.ablation_probabilities = ablation_temperature_(ablation_logits(description));
  return a;
}

CandidateReport PipelineModel::predict(std::string_view description, std::size_t k) const {
  require_trained();
  if (k < 1) throw BadK("k must be at least 1");
  const Analysis a = analyze(description);
  CandidateReport report;
  report.description = std::string(description);
  report.evidence_used = config_.use_evidence;

  const auto heads = top_k(a.heading_probabilities, std::min(k, labels_.headings().size()));
  for (std::size_t rank = 0; rank < heads.size(); ++rank) {
    HeadingCandidate cand;
    cand.heading = labels_.headings()[heads[rank].index];
    cand.score = heads[rank].probability;
    if (rank == 0) {
      cand.key_sentences = a.top_evidence.sentences;
      cand.manual_missing = a.top_manual_missing;
    } else if (auto r = key_sentences(description, cand.heading)) {
      cand.key_sentences = std::move(r->sentences);
    } else {
      cand.manual_missing = true;
    }
    report.headings.push_back(std::move(cand));
  }

  const auto subs = top_k(a.subheading_probabilities, std::min(k, labels_.subheadings().size()));
  for (const auto& s : subs) {
    SubheadingCandidate cand;
    cand.subheading = labels_.subheadings()[s.index];
    cand.score = s.probability;
    for (auto& sim : case_index_.similar_cases(a.query_embedding, cand.subheading, config_.similar_cases)) {
      const auto* entry = case_index_.find(sim.id);
      cand.similar_cases.push_back({sim.id, sim.similarity, entry ? entry->snippet : std::string()});
    }
    report.subheadings.push_back(std::move(cand));
  }
  return report;
}

void PipelineModel::calibrate(const std::vector<DecisionCase>& validation) {
  require_trained();
  const auto yh = heading_targets(validation, labels_);
  const auto ys = subheading_targets(validation, labels_);
  std::vector<std::vector<double>> zh, zs, za;
  for (const auto& c : validation) {
    auto logits = heading_logits(c.description);
    const auto& top = labels_.headings()[argmax(logits)];
    const auto evidence = key_sentences(c.description, top).value_or(RetrievalResult{});
    zh.push_back(std::move(logits));
    zs.push_back(subheading_logits(c.description, evidence, top));
    if (ablation_classifier_) za.push_back(ablation_logits(c.description));
  }
  heading_temperature_ = fit_on_known(zh, yh, "heading", warnings_);
  subheading_temperature_ = fit_on_known(zs, ys, "subheading", warnings_);
  if (ablation_classifier_) ablation_temperature_ = fit_on_known(za, ys, "description-only subheading", warnings_);
}

PipelineModel fit(const std::vector<DecisionCase>& train, const std::vector<DecisionCase>& validation, Manual manual,
                  std::shared_ptr<const WordVectorTable> vectors, std::shared_ptr<const StopwordSet> stopwords,
                  const PipelineConfig& config) {
  if (train.empty()) throw EmptyInput("the training split is empty");
  if (!vectors || !stopwords) throw Error("fit requires word vectors and stopwords");
  config.heading_train.validate();
  config.subheading_train.validate();
  config.retrieval.validate();

  PipelineModel model;
  model.config_ = config;
  model.manual_ = std::move(manual);
  model.labels_ = build_label_space(train);

  std::vector<TokenSequence> documents;
  for (const auto& c : train) documents.push_back(tokenize(c.description));
  for (const auto& c : validation) documents.push_back(tokenize(c.description));
  for (const auto& [heading, entry] : model.manual_) {
    for (const auto& s : entry.sentences) documents.push_back(tokenize(s));
  }
  model.resources_ = {std::move(vectors), std::make_shared<const IdfTable>(compute_idf(documents)),
                      std::move(stopwords)};
  model.build_encoders();

  // Stage 1: headings from descriptions.
  std::vector<Embedding> x_desc, xv_desc;
  for (const auto& c : train) x_desc.push_back(model.heading_encoder_->encode(c.description));
  for (const auto& c : validation) xv_desc.push_back(model.heading_encoder_->encode(c.description));
  const auto yh = heading_targets(train, model.labels_);
  const auto yh_val = heading_targets(validation, model.labels_);
  auto stage1 = hsc::train(x_desc, yh, xv_desc, yh_val, model.labels_.headings(), config.heading_train);
  model.heading_classifier_ = std::move(stage1.classifier);
  model.heading_report_ = std::move(stage1.report);

  // Stage 2 at train time: evidence from each case's gold heading.
  std::vector<RetrievalResult> gold_evidence;
  gold_evidence.reserve(train.size());
  for (const auto& c : train) {
    if (!config.use_evidence) {
      gold_evidence.emplace_back();
      continue;
    }
    auto r = model.key_sentences(c.description, c.label.heading);
    if (!r) {
      model.warnings_.push_back("MissingManual: case '" + c.id + "' has gold heading " + c.label.heading +
                                " without a manual entry; its subheading input uses the description only");
    }
    gold_evidence.push_back(r.value_or(RetrievalResult{}));
  }

  // Stage 3: subheadings from description plus evidence.
  std::vector<Embedding> x_sub, xv_sub;
  for (std::size_t i = 0; i < train.size(); ++i) {
    x_sub.push_back(model.subheading_encoder_->encode_with_evidence(train[i].description, gold_evidence[i].texts()));
  }
  for (std::size_t i = 0; i < validation.size(); ++i) {
    if (!config.use_evidence) {
      xv_sub.push_back(xv_desc[i]);
      continue;
    }
    const auto logits = model.heading_classifier_->logits(xv_desc[i]);
    const auto& top = model.labels_.headings()[argmax(logits)];
    const auto evidence = model.key_sentences(validation[i].description, top).value_or(RetrievalResult{});
    xv_sub.push_back(model.subheading_encoder_->encode_with_evidence(validation[i].description, evidence.texts()));
  }
  const auto ys = subheading_targets(train, model.labels_);
  const auto ys_val = subheading_targets(validation, model.labels_);
  auto stage3 = hsc::train(x_sub, ys, xv_sub, ys_val, model.labels_.subheadings(), config.subheading_train);
  model.subheading_classifier_ = std::move(stage3.classifier);
  model.subheading_report_ = std::move(stage3.report);

  if (config.use_evidence && config.train_ablation) {
    auto ablation = hsc::train(x_desc, ys, xv_desc, ys_val, model.labels_.subheadings(), config.subheading_train);
    model.ablation_classifier_ = std::move(ablation.classifier);
    model.ablation_report_ = std::move(ablation.report);
  }

  if (validation.empty()) {
    model.warnings_.push_back("validation split is empty; selecting final-epoch weights and T = 1");
  } else {
    model.calibrate(validation);
  }

  model.case_index_ = build_index(train, *model.subheading_encoder_, gold_evidence);
  return model;
}

void save_pipeline(const PipelineModel& model, const std::filesystem::path& dir) {
  model.require_trained();
  std::filesystem::create_directories(dir);

  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back(kHeadingFile, dump_to_string([&](std::ostream& o) {
                       write_classifier(o, *model.heading_classifier_, model.config_.heading_train);
                     }));
  files.emplace_back(kSubheadingFile, dump_to_string([&](std::ostream& o) {
                       write_classifier(o, *model.subheading_classifier_, model.config_.subheading_train);
                     }));
  if (model.ablation_classifier_) {
    files.emplace_back(kAblationFile, dump_to_string([&](std::ostream& o) {
                         write_classifier(o, *model.ablation_classifier_, model.config_.subheading_train);
                       }));
  }
  files.emplace_back(kIndexFile, dump_to_string([&](std::ostream& o) { write_case_index(o, model.case_index_); }));
  {
    const auto& idf = *model.resources_.idf;
    json j;
    j["document_count"] = idf.document_count();
    j["document_frequency"] =
        std::map<std::string, std::size_t>(idf.document_frequencies().begin(), idf.document_frequencies().end());
    files.emplace_back(kIdfFile, j.dump() + "\n");
  }
  files.emplace_back(kVectorsFile,
                     dump_to_string([&](std::ostream& o) { write_word_vectors(o, *model.resources_.vectors); }));
  {
    std::vector<std::string> words(model.resources_.stopwords->begin(), model.resources_.stopwords->end());
    std::sort(words.begin(), words.end());
    std::string text;
    for (const auto& w : words) text += w + "\n";
    files.emplace_back(kStopwordsFile, std::move(text));
  }
  files.emplace_back(kManualFile, dump_to_string([&](std::ostream& o) { write_manual(o, model.manual_); }));

  json manifest;
  manifest["format"] = "hsc.pipeline";
  manifest["version"] = kCheckpointVersion;
  manifest["config"] = config_json(model.config_);
  manifest["config_hash"] = detail::fnv1a_hex(manifest["config"].dump());
  manifest["labels"] = {{"headings", model.labels_.headings()}, {"subheadings", model.labels_.subheadings()}};
  manifest["temperatures"] = {{"heading", model.heading_temperature_.temperature()},
                              {"subheading", model.subheading_temperature_.temperature()},
                              {"ablation", model.ablation_temperature_.temperature()}};
  manifest["train_reports"] = {{"heading", report_json(model.heading_report_)},
                               {"subheading", report_json(model.subheading_report_)}};
  if (model.ablation_report_) manifest["train_reports"]["ablation"] = report_json(*model.ablation_report_);
  manifest["warnings"] = model.warnings_;
  auto listing = json::object();
  for (const auto& [name, contents] : files) {
    listing[name] = detail::fnv1a_hex(contents);
    detail::write_file(dir / name, contents);
  }
  manifest["files"] = std::move(listing);
  detail::write_file(dir / kManifest, manifest.dump(2) + "\n");
}

PipelineModel load_pipeline(const std::filesystem::path& dir) {
  const auto manifest_path = dir / kManifest;
  if (!std::filesystem::exists(manifest_path)) {
    throw UntrainedModel("no trained pipeline at '" + dir.string() + "' (missing " + kManifest + ")");
  }
  const std::string src = manifest_path.string();
  const auto manifest = detail::parse_json(detail::read_file(manifest_path), src);
  using detail::get_field;
  if (get_field<std::string>(manifest, "format", src) != "hsc.pipeline") {
    throw ParseError(src + ": not a pipeline manifest");
  }
  if (get_field<int>(manifest, "version", src) != kCheckpointVersion) {
    throw ParseError(src + ": unsupported checkpoint version");
  }

  auto read_checked = [&](const std::string& name) {
    const auto& listing = manifest.at("files");
    if (!listing.contains(name)) throw ParseError(src + ": manifest does not list " + name);
    auto contents = detail::read_file(dir / name);
    if (detail::fnv1a_hex(contents) != listing.at(name).get<std::string>()) {
      throw ParseError((dir / name).string() + ": content hash does not match the manifest");
    }
    return contents;
  };

  PipelineModel model;
  model.config_ = config_from(manifest.at("config"), src);
  if (detail::fnv1a_hex(manifest.at("config").dump()) != get_field<std::string>(manifest, "config_hash", src)) {
    throw ParseError(src + ": config hash mismatch");
  }
  const auto& labels = manifest.at("labels");
  model.labels_ = LabelSpace(get_field<std::vector<std::string>>(labels, "headings", src),
                             get_field<std::vector<std::string>>(labels, "subheadings", src));

  {
    std::istringstream in(read_checked(kVectorsFile));
    auto vectors = std::make_shared<const WordVectorTable>(read_word_vectors(in, (dir / kVectorsFile).string()));
    const auto idf_src = (dir / kIdfFile).string();
    const auto idf_json = detail::parse_json(read_checked(kIdfFile), idf_src);
    auto df_map = get_field<std::map<std::string, std::size_t>>(idf_json, "document_frequency", idf_src);
    auto idf = std::make_shared<const IdfTable>(
        get_field<std::size_t>(idf_json, "document_count", idf_src),
        std::unordered_map<std::string, std::size_t>(df_map.begin(), df_map.end()));
    std::istringstream sw(read_checked(kStopwordsFile));
    auto stopwords = std::make_shared<const StopwordSet>(read_stopwords(sw));
    model.resources_ = {std::move(vectors), std::move(idf), std::move(stopwords)};
  }
  {
    std::istringstream in(read_checked(kManualFile));
    model.manual_ = read_manual(in, (dir / kManualFile).string());
  }
  model.build_encoders();

  auto load_clf = [&](const char* name) {
    std::istringstream in(read_checked(name));
    return read_classifier(in, (dir / name).string()).classifier;
  };
  model.heading_classifier_ = load_clf(kHeadingFile);
  model.subheading_classifier_ = load_clf(kSubheadingFile);
  if (manifest.at("files").contains(kAblationFile)) model.ablation_classifier_ = load_clf(kAblationFile);
  if (model.heading_classifier_->labels() != model.labels_.headings() ||
      model.subheading_classifier_->labels() != model.labels_.subheadings()) {
    throw ParseError(src + ": classifier labels disagree with the manifest label space");
  }
  const auto d = model.heading_encoder_->output_dimension();
  if (model.heading_classifier_->input_dimension() != d || model.subheading_classifier_->input_dimension() != d) {
    throw ParseError(src + ": classifier input dimension disagrees with the word vectors");
  }
  {
    std::istringstream in(read_checked(kIndexFile));
    model.case_index_ = read_case_index(in, (dir / kIndexFile).string());
  }

  const auto& temps = manifest.at("temperatures");
  try {
    model.heading_temperature_ = TemperatureScaler(get_field<double>(temps, "heading", src));
    model.subheading_temperature_ = TemperatureScaler(get_field<double>(temps, "subheading", src));
    model.ablation_temperature_ = TemperatureScaler(get_field<double>(temps, "ablation", src));
  } catch (const BadTemperature& e) {
    throw ParseError(src + ": " + e.what());
  }
  const auto& reports = manifest.at("train_reports");
  model.heading_report_ = report_from(reports.at("heading"), src);
  model.subheading_report_ = report_from(reports.at("subheading"), src);
  if (reports.contains("ablation")) model.ablation_report_ = report_from(reports.at("ablation"), src);
  model.warnings_ = get_field<std::vector<std::string>>(manifest, "warnings", src);
  return model;
}

}  // namespace hsc
