#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stance/backend.hpp"
#include "stance/corpus.hpp"
#include "stance/prompting.hpp"

namespace stance {

struct StageExchange {
  std::string prompt;
  std::string completion;
  friend bool operator==(const StageExchange&, const StageExchange&) = default;
};

/// What happened when a plan was run for one record.
///
/// A complete transcript has one exchange per plan stage. An aborted one
/// holds the stages that finished before the failure, the failing stage
/// index and the failure.
struct ChainTranscript {
  std::string record_id;
  PromptScheme scheme = PromptScheme::TaskOnly;
  std::vector<StageExchange> stages;
  std::string final_completion;

  struct Abort {
    std::size_t stage_index = 0;
    BackendFailure failure;
  };
  std::optional<Abort> aborted;

  bool complete() const noexcept { return !aborted.has_value(); }
};

/// Runs the stages strictly in order; each stage's raw completion becomes the
/// binding it produces. Backend failures yield an aborted transcript, never an
/// exception.
ChainTranscript execute(const StagePlan& plan, const StanceRecord& record,
                        CompletionClient& client);

/// One transcript per record, in record order. Records run concurrently on
/// up to client.config().parallelism workers.
std::vector<ChainTranscript> run_experiment(std::span<const StanceRecord> records,
                                            const StagePlan& plan, CompletionClient& client);

/// Transcript log line: {"record_id","scheme","model","stages":[...],"status",...}.
nlohmann::json transcript_to_json(const ChainTranscript& transcript, const std::string& model);

}  // namespace stance
