#include "cxg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "cxg/errors.hpp"
#include "cxg/rng.hpp"

namespace fs = std::filesystem;

namespace cxg {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string stage_label(const std::string& stage, const std::string& what) {
  return "[stage " + stage + "] " + what;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config: " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("malformed config JSON: " + path);

  ExperimentConfig cfg;
  cfg.increment_size = j.value("increment_size", cfg.increment_size);
  cfg.n_increments = j.value("n_increments", cfg.n_increments);
  cfg.n_orderings = j.value("n_orderings", cfg.n_orderings);
  cfg.n_pairs = j.value("n_pairs", cfg.n_pairs);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.output_dir = j.value("output_dir", cfg.output_dir);
  cfg.embeddings_path = j.value("embeddings", std::string{});
  cfg.tagger = j.value("tagger", cfg.tagger);

  if (j.contains("induction")) {
    const auto& ji = j["induction"];
    if (ji.contains("threshold_grid")) {
      cfg.induction.threshold_grid = ji["threshold_grid"].get<std::vector<double>>();
    }
    cfg.induction.beam_width = ji.value("beam_width", cfg.induction.beam_width);
    cfg.induction.max_len = ji.value("max_len", cfg.induction.max_len);
    cfg.induction.min_count = ji.value("min_count", cfg.induction.min_count);
    if (ji.value("direction", std::string("LR")) == "RL") {
      cfg.induction.direction = Direction::RL;
    }
  }

  if (!j.contains("corpora") || !j["corpora"].is_array() || j["corpora"].empty()) {
    throw ConfigError("config needs a nonempty 'corpora' array");
  }
  const fs::path base = fs::path(path).parent_path();
  for (const auto& jc : j["corpora"]) {
    CorpusSpec spec;
    spec.id = jc.value("id", std::string{});
    if (spec.id.empty()) throw ConfigError("corpus entry without id");
    spec.register_id = jc.value("register", spec.id);
    spec.path = jc.value("path", std::string{});
    if (spec.path.empty()) throw ConfigError("corpus '" + spec.id + "' has no path");
    if (!fs::path(spec.path).is_absolute() && !base.empty()) {
      spec.path = (base / spec.path).string();
    }
    const auto fmt = corpus_format_from_string(jc.value("format", std::string("plain_lines")));
    if (!fmt) throw ConfigError("corpus '" + spec.id + "': unknown format");
    spec.format = *fmt;
    const auto cond = condition_from_string(jc.value("condition", std::string("background")));
    if (!cond) throw ConfigError("corpus '" + spec.id + "': unknown condition");
    spec.condition = *cond;
    const std::string mode = jc.value("mode", std::string("aggregate"));
    if (mode == "by_individual") {
      spec.mode = PartitionMode::kByIndividual;
    } else if (mode == "aggregate") {
      spec.mode = PartitionMode::kAggregate;
    } else {
      throw ConfigError("corpus '" + spec.id + "': unknown mode '" + mode + "'");
    }
    if (jc.contains("per_author_word_cap") && !jc["per_author_word_cap"].is_null()) {
      spec.per_author_word_cap = jc["per_author_word_cap"].get<std::int64_t>();
    }
    if (jc.contains("per_venue_doc_cap") && !jc["per_venue_doc_cap"].is_null()) {
      spec.per_venue_doc_cap = jc["per_venue_doc_cap"].get<std::int64_t>();
    }
    cfg.corpora.push_back(std::move(spec));
  }

  // Embedding / lexicon paths resolve against the config location too.
  if (!cfg.embeddings_path.empty() && !fs::path(cfg.embeddings_path).is_absolute() &&
      !base.empty()) {
    cfg.embeddings_path = (base / cfg.embeddings_path).string();
  }
  if (cfg.tagger != "builtin" && cfg.tagger != "pretagged" &&
      !fs::path(cfg.tagger).is_absolute() && !base.empty()) {
    cfg.tagger = (base / cfg.tagger).string();
  }
  return cfg;
}

void ExperimentConfig::validate() const {
  if (corpora.empty()) throw ConfigError("no corpora configured");
  if (increment_size < 1) throw ConfigError("increment_size must be >= 1");
  if (n_increments < 1) throw ConfigError("n_increments must be >= 1");
  if (n_orderings < 1) throw ConfigError("n_orderings must be >= 1");
  if (n_pairs < 1) throw ConfigError("n_pairs must be >= 1");
  if (induction.threshold_grid.empty()) throw ConfigError("empty threshold grid");
  for (double t : induction.threshold_grid) {
    if (t < -1.0 || t > 1.0) throw ConfigError("threshold grid values must lie in [-1, 1]");
  }
  if (induction.beam_width < 1) throw ConfigError("beam_width must be >= 1");
  if (induction.max_len < 3) throw ConfigError("max_len must be >= 3");

  std::unordered_set<std::string> ids;
  for (const auto& spec : corpora) {
    if (!ids.insert(spec.id).second) throw ConfigError("duplicate corpus id: " + spec.id);
    if (!fs::exists(spec.path)) {
      throw ConfigError("corpus '" + spec.id + "': path does not exist: " + spec.path);
    }
    if (tagger == "pretagged" && spec.format != CorpusFormat::kTaggedConlluLike) {
      throw ConfigError("corpus '" + spec.id + "': tagger 'pretagged' requires tagged input");
    }
  }
  if (!embeddings_path.empty() && !fs::exists(embeddings_path)) {
    throw ConfigError("embeddings path does not exist: " + embeddings_path);
  }
  if (tagger != "builtin" && tagger != "pretagged" && !fs::exists(tagger)) {
    throw ConfigError("tagger lexicon path does not exist: " + tagger);
  }
}

std::string ExperimentConfig::canonical_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["increment_size"] = increment_size;
  j["n_increments"] = n_increments;
  j["n_orderings"] = n_orderings;
  j["n_pairs"] = n_pairs;
  nlohmann::ordered_json ji;
  ji["threshold_grid"] = induction.threshold_grid;
  ji["beam_width"] = induction.beam_width;
  ji["max_len"] = induction.max_len;
  ji["min_count"] = induction.min_count;
  ji["direction"] = induction.direction == Direction::LR ? "LR" : "RL";
  j["induction"] = std::move(ji);
  j["embeddings"] = embeddings_path;
  j["tagger"] = tagger;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& spec : corpora) {
    nlohmann::ordered_json jc;
    jc["id"] = spec.id;
    jc["register"] = spec.register_id;
    jc["path"] = spec.path;
    jc["format"] = to_string(spec.format);
    jc["condition"] = to_string(spec.condition);
    jc["mode"] = spec.mode == PartitionMode::kByIndividual ? "by_individual" : "aggregate";
    if (spec.per_author_word_cap) jc["per_author_word_cap"] = *spec.per_author_word_cap;
    if (spec.per_venue_doc_cap) jc["per_venue_doc_cap"] = *spec.per_venue_doc_cap;
    arr.push_back(std::move(jc));
  }
  j["corpora"] = std::move(arr);
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Models and induction
// ---------------------------------------------------------------------------

RunModels prepare_models(const ExperimentConfig& config) {
  RunModels models;
  if (config.tagger == "builtin") {
    models.lexicon = TagLexicon::with_default_rules();
  } else if (config.tagger != "pretagged") {
    models.lexicon = TagLexicon::from_file(config.tagger);
  }

  if (!config.embeddings_path.empty()) {
    const EmbeddingTable emb = load_embeddings(config.embeddings_path);
    // Union vocabulary over every corpus in the run: one shared model.
    std::set<std::string> vocab;
    for (const auto& spec : config.corpora) {
      const auto docs = load_corpus(spec.path, spec.format);
      for (const auto& d : docs) {
        for (const auto& t : d.word_tokens()) vocab.insert(t);
      }
    }
    std::vector<std::string> vocab_list(vocab.begin(), vocab.end());
    models.domains = fit_domains(emb, vocab_list, derive_seed(config.seed, "domains"));
    models.has_domains = true;
  }
  return models;
}

InducedCorpus induce_corpus(const ExperimentConfig& config, const CorpusSpec& spec,
                            const RunModels& models) {
  InducedCorpus out;
  out.spec = spec;

  std::vector<Document> docs;
  try {
    docs = load_corpus(spec.path, spec.format);
  } catch (const std::exception& e) {
    throw DataError(stage_label("load", "corpus " + spec.id + ": " + e.what()));
  }

  PartitionPolicy policy;
  policy.mode = spec.mode;
  policy.increment_size = config.increment_size;
  policy.per_author_word_cap = spec.per_author_word_cap;
  policy.per_venue_doc_cap = spec.per_venue_doc_cap;

  PartitionResult parts;
  try {
    parts = partition(docs, policy, spec.condition, derive_seed(config.seed, "partition:" + spec.id));
  } catch (const std::exception& e) {
    throw DataError(stage_label("partition", "corpus " + spec.id + ": " + e.what()));
  }
  if (static_cast<int>(parts.increments.size()) < config.n_increments) {
    throw DataError(stage_label(
        "partition", "corpus " + spec.id + ": insufficient data: " +
                         std::to_string(parts.increments.size()) + " increments available, " +
                         std::to_string(config.n_increments) + " requested (shortfall " +
                         std::to_string(config.n_increments -
                                        static_cast<int>(parts.increments.size())) +
                         ")"));
  }
  parts.increments.resize(config.n_increments);
  out.increments = std::move(parts.increments);

  out.grammars.resize(out.increments.size());
  auto induce_one = [&](std::size_t k) {
    out.grammars[k] = induce(out.increments[k], models.lexicon, models.domains, config.induction);
  };
  const int jobs = std::max(1, config.jobs);
  if (jobs == 1 || out.increments.size() < 2) {
    for (std::size_t k = 0; k < out.increments.size(); ++k) induce_one(k);
  } else {
    std::vector<std::future<void>> futs;
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < jobs; ++w) {
      futs.push_back(std::async(std::launch::async, [&]() {
        for (;;) {
          const std::size_t k = next.fetch_add(1);
          if (k >= out.increments.size()) return;
          induce_one(k);
        }
      }));
    }
    for (auto& f : futs) f.get();
  }

  for (std::size_t k = 0; k < out.increments.size(); ++k) {
    TypeSet gset;
    for (const auto& c : out.grammars[k].constructions) gset.insert(c.canonical());
    out.grammar_sets.push_back(std::move(gset));
    TypeSet lset(out.increments[k].tokens.begin(), out.increments[k].tokens.end());
    out.lexicon_sets.push_back(std::move(lset));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Growth experiment
// ---------------------------------------------------------------------------

namespace {

double quantile_of_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double idx = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(idx));
  const double frac = idx - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

GrowthReport growth_report_from(const std::vector<InducedCorpus>& corpora,
                                const ExperimentConfig& config) {
  GrowthReport report;
  std::map<std::pair<std::string, CurveKind>, std::vector<double>> alpha_by_key;

  for (const auto& corpus : corpora) {
    const auto orderings =
        sample_orderings(corpus.increments.size(), config.n_orderings,
                         derive_seed(config.seed, "orderings:" + corpus.spec.id));

    for (CurveKind kind : {CurveKind::kLexicon, CurveKind::kGrammar}) {
      const auto& sets = kind == CurveKind::kLexicon ? corpus.lexicon_sets : corpus.grammar_sets;

      std::vector<GrowthCurve> curves;
      curves.reserve(orderings.size());
      std::vector<double> alphas;
      for (std::size_t o = 0; o < orderings.size(); ++o) {
        std::vector<TypeSet> permuted;
        permuted.reserve(sets.size());
        for (auto idx : orderings[o]) permuted.push_back(sets[idx]);
        GrowthCurve curve = cumulative_union(permuted, config.increment_size);
        curve.kind = kind;
        curve.condition = corpus.spec.id;
        if (curve.points.size() >= 3) {
          const double alpha = fit_growth(curve).alpha;
          alphas.push_back(alpha);
          report.alpha_samples.push_back(AlphaSampleRow{corpus.spec.id, kind, o, alpha});
        }
        curves.push_back(std::move(curve));
      }

      GrowthCurve mean = mean_curve(curves);
      mean.kind = kind;
      mean.condition = corpus.spec.id;

      GrowthFitRow row;
      row.corpus_id = corpus.spec.id;
      row.condition = corpus.spec.condition;
      row.kind = kind;
      row.max_types = mean.points.back().second;
      if (mean.points.size() >= 3) {
        row.fitted = true;
        row.mean_fit = fit_growth(mean);
        std::vector<double> sorted = alphas;
        std::sort(sorted.begin(), sorted.end());
        double sum = 0.0;
        for (double a : sorted) sum += a;
        row.alpha_sample_mean = sum / static_cast<double>(sorted.size());
        row.alpha_sample_low = quantile_of_sorted(sorted, 0.025);
        row.alpha_sample_high = quantile_of_sorted(sorted, 0.975);
        alpha_by_key[{corpus.spec.id, kind}] = std::move(alphas);
      }
      report.fits.push_back(std::move(row));
      report.mean_curves.push_back(std::move(mean));
    }
  }

  // Ordering-robustness check: split each corpus's per-ordering alphas into
  // seeded halves and test them against each other.
  for (const auto& [key, alphas] : alpha_by_key) {
    if (alphas.size() < 4) continue;
    std::vector<double> shuffled = alphas;
    Rng rng(derive_seed(config.seed, "welch:" + key.first + ":" + to_string(key.second)));
    rng.shuffle(shuffled);
    const std::size_t half = shuffled.size() / 2;
    std::vector<double> a(shuffled.begin(), shuffled.begin() + half);
    std::vector<double> b(shuffled.begin() + half, shuffled.end());
    report.welch.push_back(WelchRow{key.first + ":split-half", key.second, welch_t_test(a, b)});
  }

  // Production vs perception within each register.
  std::map<std::string, std::vector<const InducedCorpus*>> by_register;
  for (const auto& corpus : corpora) by_register[corpus.spec.register_id].push_back(&corpus);
  for (const auto& [reg, members] : by_register) {
    for (const auto* prod : members) {
      if (prod->spec.condition != Condition::kProduction) continue;
      for (const auto* perc : members) {
        if (perc->spec.condition != Condition::kPerception) continue;
        for (CurveKind kind : {CurveKind::kLexicon, CurveKind::kGrammar}) {
          auto ia = alpha_by_key.find({prod->spec.id, kind});
          auto ib = alpha_by_key.find({perc->spec.id, kind});
          if (ia == alpha_by_key.end() || ib == alpha_by_key.end()) continue;
          if (ia->second.size() < 2 || ib->second.size() < 2) continue;
          report.welch.push_back(WelchRow{reg + ":production-vs-perception", kind,
                                          welch_t_test(ia->second, ib->second)});
        }
      }
    }
  }
  return report;
}

DistanceReport distance_report_from(const std::vector<InducedCorpus>& corpora,
                                    const ExperimentConfig& config) {
  DistanceReport report;
  for (const auto& corpus : corpora) {
    if (corpus.grammar_sets.size() < 2) {
      throw DataError(stage_label("distance", "corpus " + corpus.spec.id +
                                                  ": needs >= 2 increments for pair sampling"));
    }
    auto samples = sample_pairs(corpus.grammar_sets, config.n_pairs,
                                derive_seed(config.seed, "pairs:" + corpus.spec.id));
    std::vector<double> distances;
    distances.reserve(samples.size());
    for (auto& s : samples) {
      s.condition = corpus.spec.id;
      s.register_id = corpus.spec.register_id;
      distances.push_back(s.distance);
      report.samples.push_back(std::move(s));
    }
    EstimateRow row;
    row.corpus_id = corpus.spec.id;
    row.estimate = bayes_normal_estimate(distances, kReportCredibility);
    report.estimates.push_back(std::move(row));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

namespace {

std::vector<InducedCorpus> induce_all(const ExperimentConfig& config, const RunModels& models) {
  std::vector<InducedCorpus> out;
  out.reserve(config.corpora.size());
  for (const auto& spec : config.corpora) out.push_back(induce_corpus(config, spec, models));
  return out;
}

}  // namespace

GrowthReport run_growth_experiment(const ExperimentConfig& config) {
  config.validate();
  const RunModels models = prepare_models(config);
  return growth_report_from(induce_all(config, models), config);
}

DistanceReport run_distance_experiment(const ExperimentConfig& config) {
  config.validate();
  const RunModels models = prepare_models(config);
  return distance_report_from(induce_all(config, models), config);
}

RunOutputs run_full(const ExperimentConfig& config) {
  config.validate();
  RunOutputs out;
  out.config = config;
  out.models = prepare_models(config);
  out.corpora = induce_all(config, out.models);
  out.growth = growth_report_from(out.corpora, config);
  out.distance = distance_report_from(out.corpora, config);
  return out;
}

// ---------------------------------------------------------------------------
// Report emission
// ---------------------------------------------------------------------------

namespace {

std::string sha256_string(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

// All report files are rendered in memory first; nothing touches disk until
// every byte is known.
class ReportWriter {
 public:
  void add(const std::string& name, std::string content) {
    files_.emplace_back(name, std::move(content));
  }

  std::string flush(const fs::path& dir, std::uint64_t seed, const std::string& config_hash) {
    std::sort(files_.begin(), files_.end());
    nlohmann::ordered_json manifest;
    manifest["seed"] = seed;
    manifest["config_sha256"] = config_hash;
    nlohmann::ordered_json jf = nlohmann::ordered_json::object();
    for (const auto& [name, content] : files_) jf[name] = sha256_string(content);
    manifest["files"] = std::move(jf);
    files_.emplace_back("manifest.json", manifest.dump(2) + "\n");

    std::vector<fs::path> written;
    try {
      for (const auto& [name, content] : files_) {
        const fs::path p = dir / name;
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        std::ofstream out(p, std::ios::binary);
        if (!out) throw DataError("cannot write: " + p.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw DataError("short write: " + p.string());
        written.push_back(p);
      }
    } catch (...) {
      for (const auto& p : written) {
        std::error_code ec;
        fs::remove(p, ec);
      }
      throw;
    }
    return (dir / "manifest.json").string();
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string render_curves_csv(const GrowthReport& growth) {
  std::string s = "condition,kind,tokens,types\n";
  for (const auto& curve : growth.mean_curves) {
    for (const auto& [tokens, types] : curve.points) {
      s += curve.condition + ',' + to_string(curve.kind) + ',' + std::to_string(tokens) + ',' +
           fmt_double(types) + '\n';
    }
  }
  return s;
}

std::string render_fits_csv(const GrowthReport& growth) {
  std::string s = "condition,kind,alpha,ci_low,ci_high,r2,max_types\n";
  for (const auto& row : growth.fits) {
    s += row.corpus_id + ',' + to_string(row.kind) + ',';
    if (row.fitted) {
      s += fmt_double(row.mean_fit.alpha) + ',' + fmt_double(row.mean_fit.ci_low) + ',' +
           fmt_double(row.mean_fit.ci_high) + ',' + fmt_double(row.mean_fit.r2);
    } else {
      s += "NA,NA,NA,NA";
    }
    s += ',' + fmt_double(row.max_types) + '\n';
  }
  return s;
}

std::string render_fits_json(const GrowthReport& growth) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : growth.fits) {
    nlohmann::ordered_json r;
    r["condition"] = row.corpus_id;
    r["condition_tag"] = to_string(row.condition);
    r["kind"] = to_string(row.kind);
    r["fitted"] = row.fitted;
    if (row.fitted) {
      // Two readings of the interval: the fit of the mean curve, and the
      // empirical spread of the per-ordering fits.
      r["alpha"] = row.mean_fit.alpha;
      r["intercept"] = row.mean_fit.intercept;
      r["ci_low"] = row.mean_fit.ci_low;
      r["ci_high"] = row.mean_fit.ci_high;
      r["r2"] = row.mean_fit.r2;
      r["n_points"] = row.mean_fit.n_points;
      r["ordering_alpha_mean"] = row.alpha_sample_mean;
      r["ordering_alpha_q025"] = row.alpha_sample_low;
      r["ordering_alpha_q975"] = row.alpha_sample_high;
    }
    r["max_types"] = row.max_types;
    arr.push_back(std::move(r));
  }
  return arr.dump(2) + "\n";
}

std::string render_alpha_samples_csv(const GrowthReport& growth) {
  std::string s = "condition,kind,ordering,alpha\n";
  for (const auto& row : growth.alpha_samples) {
    s += row.corpus_id + ',' + to_string(row.kind) + ',' + std::to_string(row.ordering) + ',' +
         fmt_double(row.alpha) + '\n';
  }
  return s;
}

std::string render_welch_csv(const GrowthReport& growth) {
  std::string s = "comparison,kind,t,df,p\n";
  for (const auto& row : growth.welch) {
    s += row.comparison + ',' + to_string(row.kind) + ',' + fmt_double(row.result.t) + ',' +
         fmt_double(row.result.df) + ',' + fmt_double(row.result.p) + '\n';
  }
  return s;
}

std::string render_distances_csv(const DistanceReport& distance) {
  std::string s = "condition,register,grammar_i,grammar_j,jaccard\n";
  for (const auto& d : distance.samples) {
    s += d.condition + ',' + d.register_id + ',' + std::to_string(d.i) + ',' +
         std::to_string(d.j) + ',' + fmt_double(d.distance) + '\n';
  }
  return s;
}

std::string render_estimates_csv(const DistanceReport& distance) {
  // Table-style rows: every statistic scaled x100 for readability.
  std::string s = "condition,mean_x100,var_x100,mean_ci_low,mean_ci_high,var_ci_low,var_ci_high\n";
  for (const auto& row : distance.estimates) {
    const auto& e = row.estimate;
    s += row.corpus_id + ',' + fmt_double(100.0 * e.mean) + ',' + fmt_double(100.0 * e.variance) +
         ',' + fmt_double(100.0 * e.mean_low) + ',' + fmt_double(100.0 * e.mean_high) + ',' +
         fmt_double(100.0 * e.variance_low) + ',' + fmt_double(100.0 * e.variance_high) + '\n';
  }
  return s;
}

}  // namespace

std::string emit_report(const RunOutputs& outputs, const std::string& output_dir) {
  const fs::path dir(output_dir);
  if (!fs::exists(dir)) {
    std::error_code ec;
    fs::create_directory(dir, ec);  // parent must exist
    if (ec || !fs::exists(dir)) {
      throw ConfigError("cannot create output directory: " + output_dir);
    }
  }
  // Probe writability before any rendering.
  {
    const fs::path probe = dir / ".write-probe";
    std::ofstream out(probe, std::ios::binary);
    if (!out) throw ConfigError("output directory is not writable: " + output_dir);
    out.close();
    fs::remove(probe);
  }

  ReportWriter writer;
  const std::string config_json = outputs.config.canonical_json();
  writer.add("config.json", config_json);

  for (const auto& corpus : outputs.corpora) {
    for (std::size_t k = 0; k < corpus.grammars.size(); ++k) {
      writer.add("grammars/grammar_" + corpus.spec.id + "_" + std::to_string(k) + ".json",
                 corpus.grammars[k].to_json(static_cast<std::int64_t>(outputs.config.seed)));
    }
  }
  if (outputs.models.has_domains) {
    writer.add("domains.json", outputs.models.domains.to_json());
  }
  if (outputs.growth) {
    writer.add("curves.csv", render_curves_csv(*outputs.growth));
    writer.add("fits.csv", render_fits_csv(*outputs.growth));
    writer.add("fits.json", render_fits_json(*outputs.growth));
    writer.add("alpha_samples.csv", render_alpha_samples_csv(*outputs.growth));
    writer.add("welch.csv", render_welch_csv(*outputs.growth));
  }
  if (outputs.distance) {
    writer.add("distances.csv", render_distances_csv(*outputs.distance));
    writer.add("estimates.csv", render_estimates_csv(*outputs.distance));
  }
  return writer.flush(dir, outputs.config.seed, sha256_string(config_json));
}

// ---------------------------------------------------------------------------
// fit subcommand support
// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, FitResult>> fit_curves_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read curves file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty curves file: " + path);

  std::map<std::string, GrowthCurve> groups;
  std::vector<std::string> order;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string condition, kind, tokens, types;
    if (!std::getline(ss, condition, ',') || !std::getline(ss, kind, ',') ||
        !std::getline(ss, tokens, ',') || !std::getline(ss, types, ',')) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected condition,kind,tokens,types");
    }
    const std::string key = condition + "," + kind;
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) order.push_back(key);
    try {
      it->second.points.emplace_back(std::stoll(tokens), std::stod(types));
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(line_no) + ": bad numeric value");
    }
  }
  std::vector<std::pair<std::string, FitResult>> out;
  for (const auto& key : order) out.emplace_back(key, fit_growth(groups.at(key)));
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_string(ss.str());
}

}  // namespace cxg
