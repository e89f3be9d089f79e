// Command-line driver: partition, annotate, induce, growth, distance, fit,
// and the full pipeline (run).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cxg/errors.hpp"
#include "cxg/harness.hpp"
#include "cxg/rng.hpp"

namespace fs = std::filesystem;
using namespace cxg;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;
  int jobs = 1;
};

ExperimentConfig load_config(const GlobalOpts& opts) {
  ExperimentConfig cfg = ExperimentConfig::from_json_file(opts.config_path);
  if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  cfg.jobs = opts.jobs;
  cfg.validate();
  return cfg;
}

void ensure_out_dir(const std::string& dir) {
  if (fs::exists(dir)) return;
  std::error_code ec;
  fs::create_directory(dir, ec);
  if (ec || !fs::exists(dir)) throw ConfigError("cannot create output directory: " + dir);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write: " + path);
  out << content;
}

int cmd_partition(const GlobalOpts& opts) {
  const ExperimentConfig cfg = load_config(opts);
  ensure_out_dir(cfg.output_dir);
  for (const auto& spec : cfg.corpora) {
    const auto docs = load_corpus(spec.path, spec.format);
    PartitionPolicy policy{spec.mode, spec.per_author_word_cap, spec.per_venue_doc_cap,
                           cfg.increment_size};
    const auto parts =
        partition(docs, policy, spec.condition, derive_seed(cfg.seed, "partition:" + spec.id));
    std::string out;
    for (const auto& inc : parts.increments) {
      nlohmann::ordered_json j;
      j["index"] = inc.index;
      j["condition"] = to_string(inc.condition);
      j["n_tokens"] = inc.tokens.size();
      j["source_docs"] = inc.source_docs();
      j["tokens"] = inc.tokens;
      if (inc.pretagged()) {
        std::vector<std::string> tags;
        tags.reserve(inc.tags.size());
        for (auto t : inc.tags) tags.emplace_back(to_string(t));
        j["tags"] = std::move(tags);
      }
      out += j.dump() + "\n";
    }
    write_file(cfg.output_dir + "/increments_" + spec.id + ".jsonl", out);
    std::cerr << spec.id << ": " << parts.increments.size() << " increments, "
              << parts.discarded_tokens << " tokens discarded\n";
  }
  return kExitOk;
}

int cmd_annotate(const GlobalOpts& opts) {
  const ExperimentConfig cfg = load_config(opts);
  ensure_out_dir(cfg.output_dir);
  const RunModels models = prepare_models(cfg);
  if (models.has_domains) {
    write_file(cfg.output_dir + "/domains.json", models.domains.to_json());
    if (models.domains.k_clamped) std::cerr << "warning: cluster count clamped\n";
  }
  for (const auto& spec : cfg.corpora) {
    const auto docs = load_corpus(spec.path, spec.format);
    PartitionPolicy policy{spec.mode, spec.per_author_word_cap, spec.per_venue_doc_cap,
                           cfg.increment_size};
    const auto parts =
        partition(docs, policy, spec.condition, derive_seed(cfg.seed, "partition:" + spec.id));
    for (const auto& inc : parts.increments) {
      const auto annotated = annotate_increment(inc, models.lexicon, models.domains);
      std::string out;
      std::size_t seg = 0;
      for (std::size_t i = 0; i < annotated.tokens.size(); ++i) {
        if (seg < annotated.segments.size() && annotated.segments[seg].first == i) {
          out += "# doc = " + inc.spans[seg].doc_id + "\n";
          ++seg;
        }
        const auto& t = annotated.tokens[i];
        out += t.lex;
        out += '\t';
        out += to_string(t.pos);
        out += '\t';
        out += t.sem == kNoDomain ? "_" : std::to_string(t.sem);
        out += '\n';
      }
      write_file(cfg.output_dir + "/annotated_" + spec.id + "_" + std::to_string(inc.index) + ".tsv",
                 out);
    }
  }
  return kExitOk;
}

int cmd_induce(const GlobalOpts& opts, bool dump_assoc) {
  const ExperimentConfig cfg = load_config(opts);
  ensure_out_dir(cfg.output_dir);
  const RunModels models = prepare_models(cfg);
  for (const auto& spec : cfg.corpora) {
    const InducedCorpus corpus = induce_corpus(cfg, spec, models);
    for (std::size_t k = 0; k < corpus.grammars.size(); ++k) {
      write_file(cfg.output_dir + "/grammar_" + spec.id + "_" + std::to_string(k) + ".json",
                 corpus.grammars[k].to_json(static_cast<std::int64_t>(cfg.seed)));
      if (dump_assoc) {
        const auto annotated = annotate_increment(corpus.increments[k], models.lexicon, models.domains);
        dump_association_csv(count_pairs(annotated),
                             cfg.output_dir + "/assoc_" + spec.id + "_" + std::to_string(k) + ".csv");
      }
      std::cerr << spec.id << "[" << k << "]: " << corpus.grammars[k].constructions.size()
                << " constructions at threshold " << corpus.grammars[k].threshold << "\n";
    }
  }
  return kExitOk;
}

int cmd_growth(const GlobalOpts& opts) {
  ExperimentConfig cfg = load_config(opts);
  RunOutputs outputs;
  outputs.config = cfg;
  outputs.models = prepare_models(cfg);
  for (const auto& spec : cfg.corpora) {
    outputs.corpora.push_back(induce_corpus(cfg, spec, outputs.models));
  }
  outputs.growth = growth_report_from(outputs.corpora, cfg);
  const std::string manifest = emit_report(outputs, cfg.output_dir);
  std::cerr << "wrote " << manifest << "\n";
  return kExitOk;
}

int cmd_distance(const GlobalOpts& opts) {
  ExperimentConfig cfg = load_config(opts);
  RunOutputs outputs;
  outputs.config = cfg;
  outputs.models = prepare_models(cfg);
  for (const auto& spec : cfg.corpora) {
    outputs.corpora.push_back(induce_corpus(cfg, spec, outputs.models));
  }
  outputs.distance = distance_report_from(outputs.corpora, cfg);
  const std::string manifest = emit_report(outputs, cfg.output_dir);
  std::cerr << "wrote " << manifest << "\n";
  return kExitOk;
}

int cmd_run(const GlobalOpts& opts) {
  ExperimentConfig cfg = load_config(opts);
  const RunOutputs outputs = run_full(cfg);
  const std::string manifest = emit_report(outputs, cfg.output_dir);
  std::cerr << "wrote " << manifest << "\n";
  return kExitOk;
}

int cmd_fit(const std::string& curves_path, const std::string& out_path) {
  const auto fits = fit_curves_csv(curves_path);
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& [key, fit] : fits) {
    nlohmann::ordered_json r;
    r["group"] = key;
    r["alpha"] = fit.alpha;
    r["intercept"] = fit.intercept;
    r["ci_low"] = fit.ci_low;
    r["ci_high"] = fit.ci_high;
    r["r2"] = fit.r2;
    r["n_points"] = fit.n_points;
    arr.push_back(std::move(r));
  }
  const std::string body = arr.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << body;
  } else {
    write_file(out_path, body);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Construction-grammar growth and convergence experiments"};
  app.require_subcommand(1);

  GlobalOpts opts;
  std::string curves_path;
  std::string fit_out;
  bool dump_assoc = false;

  auto add_common = [&](CLI::App* sub, bool needs_config = true) {
    auto* c = sub->add_option("--config", opts.config_path, "experiment config JSON");
    if (needs_config) c->required();
    sub->add_option("--seed", opts.seed, "override config seed");
    sub->add_option("--out", opts.out_dir, "override output directory");
    sub->add_option("--jobs", opts.jobs, "worker threads for induction");
  };

  add_common(app.add_subcommand("partition", "partition corpora into increments"));
  add_common(app.add_subcommand("annotate", "partition and annotate increments"));
  auto* induce_cmd = app.add_subcommand("induce", "induce one grammar per increment");
  add_common(induce_cmd);
  induce_cmd->add_flag("--dump-assoc", dump_assoc, "also dump association tables");
  add_common(app.add_subcommand("growth", "growth-curve experiment"));
  add_common(app.add_subcommand("distance", "grammar-distance experiment"));
  add_common(app.add_subcommand("run", "full pipeline: growth + distance"));
  auto* fit_cmd = app.add_subcommand("fit", "fit a growth-curve CSV");
  fit_cmd->add_option("--in", curves_path, "curves CSV (condition,kind,tokens,types)")->required();
  fit_cmd->add_option("--out", fit_out, "write fit JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (app.got_subcommand("partition")) return cmd_partition(opts);
    if (app.got_subcommand("annotate")) return cmd_annotate(opts);
    if (app.got_subcommand("induce")) return cmd_induce(opts, dump_assoc);
    if (app.got_subcommand("growth")) return cmd_growth(opts);
    if (app.got_subcommand("distance")) return cmd_distance(opts);
    if (app.got_subcommand("run")) return cmd_run(opts);
    if (app.got_subcommand("fit")) return cmd_fit(curves_path, fit_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitConfig;
}
