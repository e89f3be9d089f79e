// Experiment orchestration: configuration, the growth and distance
// experiments, and deterministic report emission.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cxg/analytics.hpp"
#include "cxg/annotate.hpp"
#include "cxg/corpus.hpp"
#include "cxg/growthlaw.hpp"
#include "cxg/induction.hpp"
#include "cxg/stats.hpp"

namespace cxg {

inline constexpr double kReportCredibility = 0.99;

struct CorpusSpec {
  std::string id;
  std::string register_id;  // defaults to id
  std::string path;
  CorpusFormat format = CorpusFormat::kPlainLines;
  Condition condition = Condition::kBackground;
  PartitionMode mode = PartitionMode::kAggregate;
  std::optional<std::int64_t> per_author_word_cap;
  std::optional<std::int64_t> per_venue_doc_cap;
};

struct ExperimentConfig {
  std::vector<CorpusSpec> corpora;
  std::int64_t increment_size = 100000;
  int n_increments = 20;
  int n_orderings = 100;
  int n_pairs = 200;
  InductionConfig induction;
  std::string embeddings_path;     // empty = no semantic level
  std::string tagger = "builtin";  // "builtin" | "pretagged" | lexicon path
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  int jobs = 1;  // runtime knob; not part of the config snapshot

  static ExperimentConfig from_json_file(const std::string& path);
  std::string canonical_json() const;
  void validate() const;
};

// Shared annotation models for one run.
struct RunModels {
  TagLexicon lexicon;
  DomainModel domains;
  bool has_domains = false;
};

struct InducedCorpus {
  CorpusSpec spec;
  std::vector<Increment> increments;
  std::vector<Grammar> grammars;
  std::vector<TypeSet> grammar_sets;
  std::vector<TypeSet> lexicon_sets;
};

RunModels prepare_models(const ExperimentConfig& config);

// load -> partition -> induce (one grammar per increment).
InducedCorpus induce_corpus(const ExperimentConfig& config, const CorpusSpec& spec,
                            const RunModels& models);

struct GrowthFitRow {
  std::string corpus_id;
  Condition condition = Condition::kBackground;
  CurveKind kind = CurveKind::kLexicon;
  bool fitted = false;  // false when the run has fewer than 3 increments
  FitResult mean_fit;   // fit of the mean curve
  double alpha_sample_mean = 0.0;  // over per-ordering fits
  double alpha_sample_low = 0.0;   // empirical 2.5% / 97.5% quantiles
  double alpha_sample_high = 0.0;
  double max_types = 0.0;  // final point of the mean curve
};

struct AlphaSampleRow {
  std::string corpus_id;
  CurveKind kind;
  std::size_t ordering;
  double alpha;
};

struct WelchRow {
  std::string comparison;
  CurveKind kind;
  TestResult result;
};

struct GrowthReport {
  std::vector<GrowthCurve> mean_curves;  // one per (corpus, kind)
  std::vector<GrowthFitRow> fits;
  std::vector<AlphaSampleRow> alpha_samples;
  std::vector<WelchRow> welch;
};

struct EstimateRow {
  std::string corpus_id;
  BayesEstimate estimate;  // raw [0, 1] scale; x100 applied at the report layer
};

struct DistanceReport {
  std::vector<DistanceSample> samples;
  std::vector<EstimateRow> estimates;
};

GrowthReport growth_report_from(const std::vector<InducedCorpus>& corpora,
                                const ExperimentConfig& config);
DistanceReport distance_report_from(const std::vector<InducedCorpus>& corpora,
                                    const ExperimentConfig& config);

struct RunOutputs {
  ExperimentConfig config;
  RunModels models;
  std::vector<InducedCorpus> corpora;
  std::optional<GrowthReport> growth;
  std::optional<DistanceReport> distance;
};

GrowthReport run_growth_experiment(const ExperimentConfig& config);
DistanceReport run_distance_experiment(const ExperimentConfig& config);
RunOutputs run_full(const ExperimentConfig& config);

// Writes config snapshot, grammars, report CSV/JSON files, and a manifest
// with the seed and per-file SHA-256 hashes. Identical (config, seed) runs
// produce byte-identical files. Returns the manifest path.
std::string emit_report(const RunOutputs& outputs, const std::string& output_dir);

// Exposed for the CLI `fit` subcommand: fit every (condition, kind) group of
// a curves CSV.
std::vector<std::pair<std::string, FitResult>> fit_curves_csv(const std::string& path);

std::string sha256_file(const std::string& path);

}  // namespace cxg
