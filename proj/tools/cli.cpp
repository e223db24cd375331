#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "hsc/corpus.hpp"
#include "hsc/error.hpp"
#include "hsc/evaluation.hpp"
#include "hsc/pipeline.hpp"
#include "hsc/synth.hpp"

namespace hsc::cli {

namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string format = "text";
};

struct TrainOptions {
  std::string cases;
  std::string manual;
  std::string vectors;
  std::string stopwords;
  std::string checkpoint;
  PipelineConfig pipeline;
  bool no_evidence = false;
  bool no_ablation = false;
  std::string evidence_mode = "top_heading";
};

struct PredictOptions {
  std::string checkpoint;
  std::string text;
  std::string input;
  std::size_t k = 3;
};

struct EvaluateOptions {
  std::string checkpoint;
  std::string cases;
  std::string manual;
  std::string out;
  std::string split = "test";
};

struct CalibrateOptions {
  std::string checkpoint;
  std::string cases;
};

struct SynthOptions {
  std::string out;
  SynthConfig config;
};

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  constexpr std::size_t kShown = 10;
  for (std::size_t i = 0; i < std::min(kShown, warnings.size()); ++i) err << "warning: " << warnings[i] << "\n";
  if (warnings.size() > kShown) err << "warning: ... and " << warnings.size() - kShown << " more\n";
}

void print_stage(std::ostream& out, const char* name, const TrainReport& r) {
  out << "  " << name << ": best epoch " << r.best_epoch + 1 << "/" << r.training_loss.size();
  if (!r.validation_empty) out << ", validation top-1 " << fixed4(r.validation_accuracy[r.best_epoch]);
  out << ", final training loss " << fixed4(r.training_loss.back()) << "\n";
}

DatasetSplit split_cases(const std::string& path, const PipelineConfig& config, std::ostream& err) {
  auto cases = load_cases(path);
  auto split = chronological_split(cases, config.validation_months, config.test_months);
  print_warnings(split.warnings, err);
  return split;
}

int cmd_train(const GlobalOptions& global, TrainOptions opts, std::ostream& out, std::ostream& err) {
  auto& cfg = opts.pipeline;
  cfg.heading_train.seed = global.seed;
  cfg.subheading_train.seed = global.seed;
  cfg.use_evidence = !opts.no_evidence;
  cfg.train_ablation = !opts.no_ablation;
  cfg.evidence_mode = opts.evidence_mode == "mixture" ? EvidenceMode::mixture : EvidenceMode::top_heading;

  const auto split = split_cases(opts.cases, cfg, err);
  auto manual = load_manual(opts.manual);
  auto vectors = std::make_shared<const WordVectorTable>(load_word_vectors(opts.vectors));
  auto stopwords = std::make_shared<const StopwordSet>(opts.stopwords.empty() ? default_stopwords()
                                                                               : load_stopwords(opts.stopwords));
  out << "cases: train " << split.train.size() << ", validation " << split.validation.size() << ", test "
      << split.test.size() << "\n";
  const auto model = fit(split.train, split.validation, std::move(manual), vectors, stopwords, cfg);
  print_warnings(model.warnings(), err);
  save_pipeline(model, opts.checkpoint);

  out << "labels: " << model.labels().headings().size() << " headings, " << model.labels().subheadings().size()
      << " subheadings\n";
  print_stage(out, "heading", model.heading_report());
  print_stage(out, "subheading", model.subheading_report());
  if (model.ablation_report()) print_stage(out, "subheading (w/o sentences)", *model.ablation_report());
  out << "temperatures: heading " << fixed4(model.heading_temperature().temperature()) << ", subheading "
      << fixed4(model.subheading_temperature().temperature()) << "\n";
  out << "checkpoint written to " << opts.checkpoint << "\n";
  return kExitOk;
}

int cmd_predict(const GlobalOptions& global, const PredictOptions& opts, std::ostream& out, std::ostream& err) {
  std::string description = opts.text;
  if (!opts.input.empty()) {
    std::ifstream in(opts.input);
    if (!in) {
      err << "error: cannot read '" << opts.input << "'\n";
      return kExitUsage;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    description = buffer.str();
  }
  description = trim(description);
  if (description.empty()) {
    err << "error: an item description is required (--text or --input)\n"
        << "usage: hsclassify predict --checkpoint DIR (--text TEXT | --input FILE) [--k N]\n";
    return kExitUsage;
  }
  const auto model = load_pipeline(opts.checkpoint);
  const auto report = model.predict(description, opts.k);
  out << (global.format == "structured" ? render_structured(report) : render_text(report));
  return kExitOk;
}

int cmd_evaluate(const GlobalOptions& global, const EvaluateOptions& opts, std::ostream& out, std::ostream& err) {
  const auto model = load_pipeline(opts.checkpoint);
  const auto split = split_cases(opts.cases, model.config(), err);
  std::vector<DecisionCase> cases;
  if (opts.split == "test") {
    cases = split.test;
  } else if (opts.split == "validation") {
    cases = split.validation;
  } else {
    cases = split.train;
    cases.insert(cases.end(), split.validation.begin(), split.validation.end());
    cases.insert(cases.end(), split.test.begin(), split.test.end());
  }
  const Manual manual = opts.manual.empty() ? model.manual() : load_manual(opts.manual);
  const auto metrics = evaluate_pipeline(model, cases, manual);
  const auto json_text = render_metrics_json(metrics);
  const auto table = render_metrics_table(metrics);

  const fs::path report_path = opts.out.empty() ? fs::path(opts.checkpoint) / "metrics.json" : fs::path(opts.out);
  if (report_path.has_parent_path()) fs::create_directories(report_path.parent_path());
  {
    std::ofstream f(report_path, std::ios::binary | std::ios::trunc);
    f << json_text;
    if (!f) throw Error("cannot write '" + report_path.string() + "'");
  }
  {
    auto table_path = report_path;
    table_path.replace_extension(".txt");
    std::ofstream f(table_path, std::ios::binary | std::ios::trunc);
    f << table;
  }
  out << (global.format == "structured" ? json_text : table);
  return kExitOk;
}

int cmd_calibrate(const CalibrateOptions& opts, std::ostream& out, std::ostream& err) {
  auto model = load_pipeline(opts.checkpoint);
  const auto split = split_cases(opts.cases, model.config(), err);
  if (split.validation.empty()) {
    err << "error: the validation split is empty; nothing to calibrate on\n";
    return kExitUsage;
  }
  model.calibrate(split.validation);
  save_pipeline(model, opts.checkpoint);
  out << "temperatures: heading " << fixed4(model.heading_temperature().temperature()) << ", subheading "
      << fixed4(model.subheading_temperature().temperature());
  if (model.ablation_classifier()) {
    out << ", subheading (w/o sentences) " << fixed4(model.ablation_temperature().temperature());
  }
  out << "\n";
  return kExitOk;
}

int cmd_synth(const GlobalOptions& global, SynthOptions opts, std::ostream& out) {
  opts.config.seed = global.seed;
  const auto corpus = generate_synthetic_corpus(opts.config);
  const fs::path dir(opts.out);
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "cases.jsonl", std::ios::binary | std::ios::trunc);
    write_cases(f, corpus.cases);
  }
  {
    std::ofstream f(dir / "manual.jsonl", std::ios::binary | std::ios::trunc);
    write_manual(f, corpus.manual);
  }
  {
    std::ofstream f(dir / "vectors.txt", std::ios::binary | std::ios::trunc);
    write_word_vectors(f, corpus.vectors);
  }
  out << "wrote " << corpus.cases.size() << " cases, " << corpus.manual.size() << " manual entries and "
      << corpus.vectors.size() << " word vectors to " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hierarchical HS code classification with manual evidence and similar cases", "hsclassify"};
  app.set_config("--config", "", "Read options from a TOML/INI file");
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Random seed for training and corpus generation");
  app.add_option("--format", global.format, "Output format")->check(CLI::IsMember({"text", "structured"}));

  TrainOptions train_opts;
  auto* train = app.add_subcommand("train", "Fit the full pipeline and write a checkpoint");
  train->add_option("--cases", train_opts.cases, "Decision cases (JSON lines)")->required()->check(CLI::ExistingFile);
  train->add_option("--manual", train_opts.manual, "Heading manual (JSON lines)")->required()->check(CLI::ExistingFile);
  train->add_option("--vectors", train_opts.vectors, "Word vectors (text)")->required()->check(CLI::ExistingFile);
  train->add_option("--stopwords", train_opts.stopwords, "Stopword list, one per line")->check(CLI::ExistingFile);
  train->add_option("--checkpoint", train_opts.checkpoint, "Output checkpoint directory")->required();
  auto& pc = train_opts.pipeline;
  train->add_option("--epochs", pc.heading_train.epochs, "Training epochs per stage")->check(CLI::PositiveNumber)
      ->each([&](const std::string&) { pc.subheading_train.epochs = pc.heading_train.epochs; });
  train->add_option("--learning-rate", pc.heading_train.learning_rate, "Gradient step size")
      ->check(CLI::NonNegativeNumber)
      ->each([&](const std::string&) { pc.subheading_train.learning_rate = pc.heading_train.learning_rate; });
  train->add_option("--batch-size", pc.heading_train.batch_size, "Mini-batch size")->check(CLI::PositiveNumber)
      ->each([&](const std::string&) { pc.subheading_train.batch_size = pc.heading_train.batch_size; });
  train->add_option("--l2", pc.heading_train.l2_penalty, "L2 penalty on the weights")
      ->check(CLI::NonNegativeNumber)
      ->each([&](const std::string&) { pc.subheading_train.l2_penalty = pc.heading_train.l2_penalty; });
  train->add_option("--max-sentences", pc.retrieval.max_sentences, "Key sentences per heading")
      ->check(CLI::PositiveNumber);
  train->add_option("--coverage-threshold", pc.retrieval.coverage_threshold, "Cosine for keyword coverage")
      ->check(CLI::Range(1e-9, 1.0));
  train->add_option("--validation-months", pc.validation_months, "Validation window in months")
      ->check(CLI::PositiveNumber);
  train->add_option("--test-months", pc.test_months, "Test window in months")->check(CLI::PositiveNumber);
  train->add_option("--similar-cases", pc.similar_cases, "Similar cases per subheading candidate");
  train->add_option("--evidence-mode", train_opts.evidence_mode, "Subheading evidence at inference")
      ->check(CLI::IsMember({"top_heading", "mixture"}));
  train->add_flag("--no-evidence", train_opts.no_evidence, "Train the subheading stage on descriptions only");
  train->add_flag("--no-ablation", train_opts.no_ablation, "Skip the description-only comparison model");
  train->add_flag("--mask-to-heading", pc.mask_to_heading, "Restrict subheadings to the top heading's children");

  PredictOptions predict_opts;
  auto* predict = app.add_subcommand("predict", "Render heading and subheading candidates for one description");
  predict->add_option("--checkpoint", predict_opts.checkpoint, "Checkpoint directory")->required();
  predict->add_option("--text", predict_opts.text, "Item description");
  predict->add_option("--input", predict_opts.input, "File holding the item description");
  predict->add_option("--k", predict_opts.k, "Candidates per level")->check(CLI::PositiveNumber);

  EvaluateOptions eval_opts;
  auto* evaluate = app.add_subcommand("evaluate", "Score a checkpoint on the chronological test split");
  evaluate->add_option("--checkpoint", eval_opts.checkpoint, "Checkpoint directory")->required();
  evaluate->add_option("--cases", eval_opts.cases, "Decision cases (JSON lines)")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--manual", eval_opts.manual, "Manual for the word-matching baseline")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--out", eval_opts.out, "Metrics report path (default CHECKPOINT/metrics.json)");
  evaluate->add_option("--split", eval_opts.split, "Partition to score")
      ->check(CLI::IsMember({"test", "validation", "all"}));

  CalibrateOptions cal_opts;
  auto* calibrate = app.add_subcommand("calibrate", "Refit temperatures on the validation split");
  calibrate->add_option("--checkpoint", cal_opts.checkpoint, "Checkpoint directory")->required();
  calibrate->add_option("--cases", cal_opts.cases, "Decision cases (JSON lines)")->required()->check(CLI::ExistingFile);

  SynthOptions synth_opts;
  auto* synth = app.add_subcommand("synth", "Generate the synthetic corpus (cases, manual, vectors)");
  synth->add_option("--out", synth_opts.out, "Output directory")->required();
  synth->add_option("--dim", synth_opts.config.dimension, "Word-vector dimension")->check(CLI::PositiveNumber);
  synth->add_option("--headings", synth_opts.config.headings, "Number of headings")->check(CLI::Range(1, 99));
  synth->add_option("--subheadings", synth_opts.config.subheadings_per_heading, "Subheadings per heading")
      ->check(CLI::Range(1, 9));
  synth->add_option("--train-per", synth_opts.config.train_per_subheading, "Training cases per subheading");
  synth->add_option("--validation-per", synth_opts.config.validation_per_subheading,
                    "Validation cases per subheading");
  synth->add_option("--test-per", synth_opts.config.test_per_subheading, "Test cases per subheading");

  std::vector<std::string> argv_tail(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(argv_tail.begin(), argv_tail.end());
  try {
    app.parse(argv_tail);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) return cmd_train(global, train_opts, out, err);
    if (*predict) return cmd_predict(global, predict_opts, out, err);
    if (*evaluate) return cmd_evaluate(global, eval_opts, out, err);
    if (*calibrate) return cmd_calibrate(cal_opts, out, err);
    if (*synth) return cmd_synth(global, synth_opts, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UntrainedModel& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  err << "error: no command given\n";
  return kExitUsage;
}

}  // namespace hsc::cli
