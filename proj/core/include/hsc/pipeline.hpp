#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hsc/air_retrieval.hpp"
#include "hsc/calibration.hpp"
#include "hsc/case_retrieval.hpp"
#include "hsc/classifier.hpp"
#include "hsc/corpus.hpp"
#include "hsc/encoder.hpp"
#include "hsc/report.hpp"

namespace hsc {

/// How the subheading stage picks its evidence at inference time.
enum class EvidenceMode {
  top_heading,  // one forward pass with the top-1 heading's key sentences
  mixture,      // one pass per heading candidate, mixed by heading score
};

struct PipelineConfig {
  TrainConfig heading_train;
  TrainConfig subheading_train;
  RetrievalConfig retrieval;
  bool use_evidence = true;      // false trains the description-only variant as the main stage
  bool train_ablation = true;    // with evidence on, also fit the description-only variant
  bool mask_to_heading = false;  // restrict subheadings to children of the top heading
  EvidenceMode evidence_mode = EvidenceMode::top_heading;
  std::size_t similar_cases = 3;
  bool normalize_embeddings = true;
  int validation_months = 3;
  int test_months = 3;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Full, uncalibrated and calibrated outputs of one forward pass, used by
/// prediction and evaluation alike.
struct Analysis {
  std::vector<double> heading_probabilities;      // calibrated, label-space order
  std::vector<double> subheading_probabilities;   // calibrated, main stage-3 variant
  std::optional<std::vector<double>> ablation_probabilities;
  RetrievalResult top_evidence;                   // retrieval from the top-1 heading's manual
  bool top_manual_missing = false;
  Embedding query_embedding;                      // stage-3 embedding used for similar cases
};

class PipelineModel {
 public:
  /// An untrained model; predict() throws UntrainedModel.
  PipelineModel() = default;

  bool trained() const noexcept { return heading_classifier_.has_value(); }

  /// Throws UntrainedModel.
  Analysis analyze(std::string_view description) const;
  /// k candidates per level (capped at the label-space size). Throws
  /// UntrainedModel, BadK.
  CandidateReport predict(std::string_view description, std::size_t k = 3) const;

  const PipelineConfig& config() const noexcept { return config_; }
  const LabelSpace& labels() const noexcept { return labels_; }
  const Manual& manual() const noexcept { return manual_; }
  const TextResources& resources() const noexcept { return resources_; }
  const DescriptionEncoder& heading_encoder() const { return *heading_encoder_; }
  const DescriptionEncoder& subheading_encoder() const { return *subheading_encoder_; }
  const SoftmaxClassifier& heading_classifier() const;
  const SoftmaxClassifier& subheading_classifier() const;
  const SoftmaxClassifier* ablation_classifier() const {
    return ablation_classifier_ ? &*ablation_classifier_ : nullptr;
  }
  const CaseIndex& case_index() const noexcept { return case_index_; }

  const TemperatureScaler& heading_temperature() const noexcept { return heading_temperature_; }
  const TemperatureScaler& subheading_temperature() const noexcept { return subheading_temperature_; }
  const TemperatureScaler& ablation_temperature() const noexcept { return ablation_temperature_; }

  const TrainReport& heading_report() const noexcept { return heading_report_; }
  const TrainReport& subheading_report() const noexcept { return subheading_report_; }
  const std::optional<TrainReport>& ablation_report() const noexcept { return ablation_report_; }

  /// Diagnostics collected while fitting (missing manuals, empty splits...).
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  /// Raw logits of each stage, before temperature scaling.
  std::vector<double> heading_logits(std::string_view description) const;
  std::vector<double> subheading_logits(std::string_view description, const RetrievalResult& evidence,
                                        const std::string& top_heading) const;
  std::vector<double> ablation_logits(std::string_view description) const;

  /// Key sentences for `heading`, or nullopt when the manual lacks it.
  std::optional<RetrievalResult> key_sentences(std::string_view description, const std::string& heading) const;

  /// Refits the stage temperatures on validation cases (inference-time
  /// evidence). Cases with labels outside the label space are skipped.
  void calibrate(const std::vector<DecisionCase>& validation);

 private:
  friend PipelineModel fit(const std::vector<DecisionCase>&, const std::vector<DecisionCase>&, Manual,
                           std::shared_ptr<const WordVectorTable>, std::shared_ptr<const StopwordSet>,
                           const PipelineConfig&);
  friend void save_pipeline(const PipelineModel&, const std::filesystem::path&);
  friend PipelineModel load_pipeline(const std::filesystem::path&);

  void require_trained() const;
  void build_encoders();
  std::vector<double> masked(std::vector<double> logits, const std::string& top_heading) const;

  PipelineConfig config_;
  TextResources resources_;
  std::shared_ptr<const DescriptionEncoder> heading_encoder_;
  std::shared_ptr<const DescriptionEncoder> subheading_encoder_;
  LabelSpace labels_;
  Manual manual_;
  std::optional<SoftmaxClassifier> heading_classifier_;
  std::optional<SoftmaxClassifier> subheading_classifier_;
  std::optional<SoftmaxClassifier> ablation_classifier_;
  TemperatureScaler heading_temperature_;
  TemperatureScaler subheading_temperature_;
  TemperatureScaler ablation_temperature_;
  CaseIndex case_index_;
  TrainReport heading_report_;
  TrainReport subheading_report_;
  std::optional<TrainReport> ablation_report_;
  std::vector<std::string> warnings_;
};

/// Trains all stages. Subheading training uses key sentences retrieved from
/// each case's gold heading; validation and inference use predicted
/// headings. Idf statistics come from the train and validation descriptions
/// plus every manual sentence. Throws EmptyInput.
PipelineModel fit(const std::vector<DecisionCase>& train, const std::vector<DecisionCase>& validation,
                  Manual manual, std::shared_ptr<const WordVectorTable> vectors,
                  std::shared_ptr<const StopwordSet> stopwords, const PipelineConfig& config = {});

/// Checkpoint directory: manifest.json plus one file per component.
void save_pipeline(const PipelineModel& model, const std::filesystem::path& dir);
/// Throws ParseError when files are missing, altered or inconsistent.
PipelineModel load_pipeline(const std::filesystem::path& dir);

inline constexpr int kCheckpointVersion = 1;

}  // namespace hsc
