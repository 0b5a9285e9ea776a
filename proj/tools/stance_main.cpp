#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "app.hpp"

namespace fs = std::filesystem;
using namespace stance;

int main(int argc, char** argv) {
  CLI::App cli{"Prompt-scheme stance classification harness"};
  cli.require_subcommand(1);

  app::RunConfig run;
  std::string scheme_arg, style_arg = "chat";
  double timeout_s = 120;
  std::string mock_arg, cache_arg, vocab_arg, templates_arg;
  auto* run_cmd = cli.add_subcommand("run", "Run one (dataset, scheme, model) experiment");
  run_cmd->add_option("--dataset", run.dataset, "Records JSONL")->required();
  run_cmd->add_option("--dataset-config", run.dataset_config, "Dataset config JSON")->required();
  run_cmd->add_option("--scheme", scheme_arg, "Prompt scheme")->required();
  run_cmd->add_option("--endpoint", run.backend.endpoint_url, "OpenAI-compatible base URL");
  run_cmd->add_option("--model", run.backend.model_name, "Model name")->required();
  run_cmd->add_option("--api-style", style_arg, "chat or completion")->capture_default_str();
  run_cmd->add_option("--parallel", run.backend.parallelism, "Concurrent records")->capture_default_str()
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--cache-dir", cache_arg, "Persistent response cache");
  run_cmd->add_option("--out-dir", run.out_dir, "Output directory")->required();
  run_cmd->add_option("--seed", run.seed, "Seed for exemplar sampling")->capture_default_str();
  run_cmd->add_option("--mock", mock_arg, "Serve completions from a mock script instead of HTTP");
  run_cmd->add_option("--vocab", vocab_arg, "Stance vocabulary JSON");
  run_cmd->add_option("--templates", templates_arg, "Template directory overriding the built-in set");
  run_cmd->add_option("--max-tokens", run.backend.max_tokens, "Completion token cap")->capture_default_str();
  run_cmd->add_option("--retries", run.backend.max_retries, "Retries for transient errors")->capture_default_str();
  run_cmd->add_option("--timeout", timeout_s, "Per-request timeout in seconds")->capture_default_str();
  run_cmd->add_option("--shots", run.shots, "Few-shot exemplar count")->capture_default_str();

  std::vector<fs::path> eval_inputs;
  fs::path eval_out;
  auto* eval_cmd = cli.add_subcommand("eval", "Score results files and emit matrices");
  eval_cmd->add_option("results", eval_inputs, "results.jsonl files")->required();
  eval_cmd->add_option("--out-dir", eval_out, "Output directory")->required();

  app::AnalyzeConfig analyze;
  auto* analyze_cmd = cli.add_subcommand("analyze", "Output-length correlation and decision tree");
  analyze_cmd->add_option("results", analyze.results, "results.jsonl files")->required();
  analyze_cmd->add_option("--out-dir", analyze.out_dir, "Output directory")->required();
  analyze_cmd->add_option("--seed", analyze.seed, "Train/test split seed")->capture_default_str();
  analyze_cmd->add_option("--max-depth", analyze.tree.max_depth, "Tree depth limit")->capture_default_str();
  analyze_cmd->add_option("--min-samples-leaf", analyze.tree.min_samples_leaf, "Minimum rows per leaf")
      ->capture_default_str();

  app::ExportConfig exp;
  std::string exp_templates;
  auto* export_cmd = cli.add_subcommand("export-prompts", "Context-Analyze prompts for adapter training");
  export_cmd->add_option("--dataset", exp.dataset, "Records JSONL")->required();
  export_cmd->add_option("--dataset-config", exp.dataset_config, "Dataset config JSON")->required();
  export_cmd->add_option("--out", exp.out, "Output JSONL")->required();
  export_cmd->add_option("--templates", exp_templates, "Template directory overriding the built-in set");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.exit(e);
    return app::kExitConfigError;
  }

  if (*run_cmd) {
    const auto scheme = parse_scheme(scheme_arg);
    if (!scheme) {
      std::cerr << "run: unknown scheme " << scheme_arg << '\n';
      return app::kExitConfigError;
    }
    const auto style = parse_api_style(style_arg);
    if (!style) {
      std::cerr << "run: unknown api style " << style_arg << '\n';
      return app::kExitConfigError;
    }
    run.scheme = *scheme;
    run.backend.api_style = *style;
    run.backend.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000));
    if (!mock_arg.empty()) run.mock_script = mock_arg;
    if (!cache_arg.empty()) run.cache_dir = cache_arg;
    if (!vocab_arg.empty()) run.vocab = vocab_arg;
    if (!templates_arg.empty()) run.templates = templates_arg;

    const auto outcome = app::cmd_run(run);
    if (!outcome.message.empty()) std::cerr << "run: " << outcome.message << '\n';
    if (outcome.exit_code != app::kExitConfigError) {
      std::cerr << "records " << outcome.records << ", aborted " << outcome.aborted << ", requests "
                << outcome.requests_sent << ", config " << outcome.config_hash.substr(0, 12) << '\n';
    }
    return outcome.exit_code;
  }
  if (*eval_cmd) return app::cmd_eval(eval_inputs, eval_out, std::cerr);
  if (*analyze_cmd) return app::cmd_analyze(analyze, std::cerr);
  if (!exp_templates.empty()) exp.templates = exp_templates;
  return app::cmd_export_prompts(exp, std::cerr);
}
