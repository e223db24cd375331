#include <benchmark/benchmark.h>

#include <memory>
#include <string>
#include <vector>

#include "hsc/case_retrieval.hpp"
#include "hsc/classifier.hpp"
#include "hsc/corpus.hpp"
#include "hsc/pipeline.hpp"
#include "hsc/synth.hpp"
#include "hsc/textproc.hpp"

namespace {

struct Bench {
  hsc::SyntheticCorpus data;
  hsc::DatasetSplit split;
  hsc::PipelineModel model;
};

// Default synthetic corpus, fitted once and shared by every benchmark.
const Bench& bench() {
  static const Bench b = [] {
    auto data = hsc::generate_synthetic_corpus();
    auto split = hsc::chronological_split(data.cases);
    auto model = hsc::fit(split.train, split.validation, data.manual,
                          std::make_shared<hsc::WordVectorTable>(data.vectors),
                          std::make_shared<hsc::StopwordSet>(hsc::default_stopwords()));
    return Bench{std::move(data), std::move(split), std::move(model)};
  }();
  return b;
}

const std::string& sample_description() { return bench().split.test.front().description; }

}  // namespace

static void BM_Tokenize(benchmark::State& state) {
  const auto& text = sample_description();
  for (auto _ : state) benchmark::DoNotOptimize(hsc::tokenize(text));
}
BENCHMARK(BM_Tokenize);

static void BM_EncodeDescription(benchmark::State& state) {
  const auto& encoder = bench().model.heading_encoder();
  const auto& text = sample_description();
  for (auto _ : state) benchmark::DoNotOptimize(encoder.encode(text));
}
BENCHMARK(BM_EncodeDescription);

static void BM_KeySentences(benchmark::State& state) {
  const auto& b = bench();
  const auto& c = b.split.test.front();
  const auto heading = c.label.heading;
  for (auto _ : state) benchmark::DoNotOptimize(b.model.key_sentences(c.description, heading));
}
BENCHMARK(BM_KeySentences);

static void BM_SimilarCases(benchmark::State& state) {
  const auto& b = bench();
  const auto& c = b.split.test.front();
  const auto query = b.model.subheading_encoder().encode(c.description);
  const auto sub = c.label.subheading;
  for (auto _ : state) benchmark::DoNotOptimize(b.model.case_index().similar_cases(query, sub, 3));
}
BENCHMARK(BM_SimilarCases);

static void BM_Predict(benchmark::State& state) {
  const auto& b = bench();
  const auto& text = sample_description();
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(b.model.predict(text, k));
}
BENCHMARK(BM_Predict)->Arg(1)->Arg(3)->Arg(5);

static void BM_TrainHeadingClassifier(benchmark::State& state) {
  const auto& b = bench();
  const auto labels = hsc::build_label_space(b.split.train);
  std::vector<hsc::Embedding> inputs;
  std::vector<std::size_t> targets;
  for (const auto& c : b.split.train) {
    inputs.push_back(b.model.heading_encoder().encode(c.description));
    targets.push_back(*labels.heading_index(c.label.heading));
  }
  hsc::TrainConfig cfg;
  cfg.epochs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(hsc::train(inputs, targets, {}, {}, labels.headings(), cfg));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(inputs.size()) * cfg.epochs);
}
BENCHMARK(BM_TrainHeadingClassifier)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
