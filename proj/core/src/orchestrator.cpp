#include "stance/orchestrator.hpp"

#include "stance/parallel.hpp"

namespace stance {

ChainTranscript execute(const StagePlan& plan, const StanceRecord& record, CompletionClient& client) {
  ChainTranscript transcript;
  transcript.record_id = record.id;
  transcript.scheme = plan.scheme;
  transcript.stages.reserve(plan.stages.size());

  Bindings bindings = record_bindings(record);
  for (std::size_t k = 0; k < plan.stages.size(); ++k) {
    RenderedPrompt prompt = render_stage(plan, k, bindings, record.id);
    Completion completion;
    try {
      completion = client.complete(prompt);
    } catch (...) {
      transcript.aborted = ChainTranscript::Abort{k, classify_failure(std::current_exception())};
      return transcript;
    }
    // Later stages see the raw completion, untrimmed.
    bindings.insert_or_assign(plan.stages[k].produces, completion.text);
    transcript.stages.push_back({std::move(prompt.text), std::move(completion.text)});
  }
  if (!transcript.stages.empty()) transcript.final_completion = transcript.stages.back().completion;
  return transcript;
}

std::vector<ChainTranscript> run_experiment(std::span<const StanceRecord> records, const StagePlan& plan,
                                            CompletionClient& client) {
  std::vector<ChainTranscript> transcripts(records.size());
  parallel_for_index(records.size(), client.config().parallelism,
                     [&](std::size_t i) { transcripts[i] = execute(plan, records[i], client); });
  return transcripts;
}

nlohmann::json transcript_to_json(const ChainTranscript& transcript, const std::string& model) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : transcript.stages) stages.push_back({{"prompt", s.prompt}, {"completion", s.completion}});
  nlohmann::json doc{{"record_id", transcript.record_id},
                     {"scheme", scheme_name(transcript.scheme)},
                     {"model", model},
                     {"stages", std::move(stages)},
                     {"status", transcript.complete() ? "complete" : "aborted"}};
  if (transcript.aborted) {
    doc["aborted_stage"] = transcript.aborted->stage_index;
    doc["error_kind"] = to_string(transcript.aborted->failure.kind);
    doc["error"] = transcript.aborted->failure.message;
  }
  return doc;
}

}  // namespace stance
