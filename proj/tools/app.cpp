#include "app.hpp"

#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <span>
#include <sstream>

#include <stance/analysis.hpp>
#include <stance/corpus.hpp>
#include <stance/errors.hpp>
#include <stance/evaluator.hpp>
#include <stance/hashing.hpp>
#include <stance/orchestrator.hpp>
#include <stance/parser.hpp>

namespace stance::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void require_file(const fs::path& path, const char* what) {
  if (!fs::is_regular_file(path)) throw ConfigError(std::string(what) + " not found: " + path.string());
}

class LineWriter {
 public:
  explicit LineWriter(const fs::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw ConfigError("cannot write " + path.string());
  }
  void write(const json& doc) { out_ << doc.dump() << '\n'; }

 private:
  std::ofstream out_;
};

std::vector<EvalRow> read_all_results(const std::vector<fs::path>& files) {
  if (files.empty()) throw ConfigError("no results files given");
  std::vector<EvalRow> rows;
  for (const auto& f : files) {
    require_file(f, "results file");
    auto part = read_results(f);
    rows.insert(rows.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  if (rows.empty()) throw EmptyEvaluation();
  return rows;
}

// Sorted provenance values found in a set of rows.
json provenance(std::span<const EvalRow> rows) {
  std::set<std::string> hashes;
  std::set<std::uint64_t> seeds;
  for (const auto& r : rows) {
    hashes.insert(r.config_hash);
    seeds.insert(r.seed);
  }
  return {{"config_hashes", hashes}, {"seeds", seeds}};
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << doc.dump(2) << '\n';
  if (!out) throw ConfigError("cannot write " + path.string());
}

std::string templates_fingerprint(const TemplateLibrary& lib, PromptScheme scheme) {
  std::string all;
  for (const auto& s : lib.stages(scheme)) all += s.source + '\0' + s.produces + '\0';
  return sha256_hex(all);
}

}  // namespace

RunOutcome cmd_run(const RunConfig& config) {
  RunOutcome outcome;
  try {
    // Everything that can be wrong with the inputs is checked before any output is written.
    require_file(config.dataset, "dataset");
    require_file(config.dataset_config, "dataset config");
    const DatasetConfig dataset = load_dataset_config(config.dataset_config);
    const auto records = load_dataset(config.dataset, dataset);
    const StanceVocab vocab = config.vocab ? StanceVocab::load(*config.vocab) : StanceVocab::defaults();
    if (const auto missing = vocab.uncovered(dataset.stance_options); !missing.empty()) {
      throw ConfigError("stance vocab does not cover option \"" + missing.front() + "\"");
    }
    const TemplateLibrary templates =
        config.templates ? TemplateLibrary::load(*config.templates) : TemplateLibrary::builtin();

    std::vector<Exemplar> exemplars;
    if (config.scheme == PromptScheme::FewShot) {
      exemplars = select_exemplars(dataset, config.shots, config.seed, records);
    }
    const StagePlan plan = build_plan(config.scheme, dataset, exemplars, templates);

    BackendConfig backend = config.backend;
    std::string mock_text;
    std::shared_ptr<Transport> transport;
    if (config.mock_script) {
      mock_text = read_file(*config.mock_script);
      json script;
      try {
        script = json::parse(mock_text);
      } catch (const json::exception& e) {
        throw ConfigError("mock script: " + std::string(e.what()));
      }
      std::map<std::string, std::string> gold;
      for (const auto& r : records) gold.emplace(r.id, gold_option_word(r, dataset));
      if (backend.endpoint_url.empty()) backend.endpoint_url = "mock://local";
      transport = std::make_shared<MockTransport>(backend.api_style, script, std::move(gold));
    } else {
      if (backend.endpoint_url.empty()) throw ConfigError("--endpoint or --mock is required");
      transport = std::make_shared<HttpTransport>(backend);
    }
    if (backend.model_name.empty()) throw ConfigError("--model is required");

    std::string exemplar_text;
    for (const auto& ex : exemplars) exemplar_text += ex.target + '\0' + ex.statement + '\0' + ex.stance_word + '\0';
    json dataset_doc = to_json(dataset);
    dataset_doc.erase("exemplar_file");
    const json fingerprint{{"dataset_sha256", sha256_hex(read_file(config.dataset))},
                           {"dataset_config", dataset_doc},
                           {"scheme", scheme_name(config.scheme)},
                           {"endpoint", backend.endpoint_url},
                           {"model", backend.model_name},
                           {"api_style", to_string(backend.api_style)},
                           {"max_tokens", backend.max_tokens},
                           {"seed", config.seed},
                           {"vocab", vocab.to_json()},
                           {"templates_sha256", templates_fingerprint(templates, config.scheme)},
                           {"exemplars_sha256", sha256_hex(exemplar_text)},
                           {"mock_sha256", config.mock_script ? sha256_hex(mock_text) : ""}};
    outcome.config_hash = sha256_hex(fingerprint.dump());

    auto cache = config.cache_dir ? std::make_shared<ResponseCache>(*config.cache_dir)
                                  : std::make_shared<ResponseCache>();
    CompletionClient client(backend, transport, cache);

    fs::create_directories(config.out_dir);
    const auto transcripts = run_experiment(records, plan, client);

    LineWriter transcript_log(config.out_dir / "transcripts.jsonl");
    LineWriter results_log(config.out_dir / "results.jsonl");
    std::size_t unavailable = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& rec = records[i];
      const auto& t = transcripts[i];

      json t_doc = transcript_to_json(t, backend.model_name);
      t_doc["config_hash"] = outcome.config_hash;
      t_doc["seed"] = config.seed;
      transcript_log.write(t_doc);

      EvalRow row;
      row.record_id = rec.id;
      row.dataset = dataset.name;
      row.model = backend.model_name;
      row.scheme = std::string(scheme_name(config.scheme));
      row.gold = rec.canonical_gold;
      row.config_hash = outcome.config_hash;
      row.seed = config.seed;
      if (t.complete()) {
        const auto parsed = parse(t.final_completion, vocab);
        row.pred = parsed.label;
        row.validity = parsed.validity;
        row.word_count = parsed.word_count;
        row.non_stance_word_count = parsed.non_stance_word_count;
      } else {
        // Aborted chains count as invalid outputs so denominators match the record count.
        row.aborted = true;
        ++outcome.aborted;
        if (t.aborted->failure.kind == BackendFailure::Kind::Unavailable) ++unavailable;
      }
      results_log.write(to_json(row));
    }

    outcome.records = records.size();
    outcome.requests_sent = transport->requests_sent();
    if (!records.empty() && unavailable == records.size()) {
      outcome.exit_code = kExitBackendUnavailable;
      outcome.message = "backend unavailable for every record";
    }
  } catch (const StanceError& e) {
    outcome.exit_code = kExitConfigError;
    outcome.message = e.what();
  } catch (const fs::filesystem_error& e) {
    outcome.exit_code = kExitConfigError;
    outcome.message = e.what();
  }
  return outcome;
}

int cmd_eval(const std::vector<fs::path>& results, const fs::path& out_dir, std::ostream& err) {
  try {
    const auto rows = read_all_results(results);
    const auto reports = build_reports(rows);

    json docs = json::array();
    for (const auto& report : reports) {
      std::vector<EvalRow> group;
      for (const auto& r : rows) {
        if (r.dataset == report.dataset && r.model == report.model && r.scheme == report.scheme) group.push_back(r);
      }
      json doc = to_json(report);
      doc["provenance"] = provenance(group);
      docs.push_back(std::move(doc));
    }
    fs::create_directories(out_dir);
    write_json(out_dir / "report.json", {{"reports", std::move(docs)}, {"provenance", provenance(rows)}});
    emit_matrix(reports, out_dir);
    return kExitOk;
  } catch (const StanceError& e) {
    err << "eval: " << e.what() << '\n';
    return kExitConfigError;
  }
}

int cmd_analyze(const AnalyzeConfig& config, std::ostream& err) {
  try {
    const auto rows = read_all_results(config.results);
    AnalysisOptions options;
    options.tree = config.tree;
    options.split_seed = config.seed;
    json doc = analyze_rows(rows, options);
    doc["provenance"] = provenance(rows);
    fs::create_directories(config.out_dir);
    write_json(config.out_dir / "analysis.json", doc);
    return kExitOk;
  } catch (const StanceError& e) {
    err << "analyze: " << e.what() << '\n';
    return kExitConfigError;
  }
}

int cmd_export_prompts(const ExportConfig& config, std::ostream& err) {
  try {
    require_file(config.dataset, "dataset");
    require_file(config.dataset_config, "dataset config");
    const DatasetConfig dataset = load_dataset_config(config.dataset_config);
    const auto records = load_dataset(config.dataset, dataset);
    const TemplateLibrary templates =
        config.templates ? TemplateLibrary::load(*config.templates) : TemplateLibrary::builtin();
    const StagePlan plan = build_plan(PromptScheme::ContextAnalyze, dataset, {}, templates);

    if (config.out.has_parent_path()) fs::create_directories(config.out.parent_path());
    LineWriter out(config.out);
    for (const auto& rec : records) {
      const auto prompt = render_stage(plan, 0, record_bindings(rec), rec.id);
      out.write({{"record_id", rec.id},
                 {"dataset", dataset.name},
                 {"scheme", scheme_name(PromptScheme::ContextAnalyze)},
                 {"prompt", prompt.text},
                 {"raw_label", rec.raw_label},
                 {"target_word", gold_option_word(rec, dataset)},
                 {"canonical_gold", to_string(rec.canonical_gold)}});
    }
    return kExitOk;
  } catch (const StanceError& e) {
    err << "export-prompts: " << e.what() << '\n';
    return kExitConfigError;
  }
}

}  // namespace stance::app
