#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stance/corpus.hpp"

namespace stance {

enum class PromptScheme : unsigned char {
  TaskOnly,
  TaskDefinition,
  ContextAnalyze,
  ContextQuestion,
  FewShot,
  ZeroShotCoT,
  CoDA,
};

inline constexpr std::array<PromptScheme, 7> kAllSchemes{
    PromptScheme::TaskOnly,       PromptScheme::TaskDefinition, PromptScheme::ContextAnalyze,
    PromptScheme::ContextQuestion, PromptScheme::FewShot,       PromptScheme::ZeroShotCoT,
    PromptScheme::CoDA};

/// snake_case name, also the template directory name ("zero_shot_cot").
std::string_view scheme_name(PromptScheme scheme) noexcept;
/// Accepts the snake_case name or the CamelCase enumerator spelling.
std::optional<PromptScheme> parse_scheme(std::string_view name) noexcept;
std::size_t expected_stage_count(PromptScheme scheme) noexcept;

/// Name -> text for instance-level placeholders.
using Bindings = std::map<std::string, std::string, std::less<>>;

/// Prompt text split into literal runs and placeholders.
///
/// `{name}` is an instance placeholder, filled per record by render().
/// `[name]` is a dataset placeholder, filled once by bind_dataset(). Names are
/// [a-z_]+; any other brace or bracket is literal text. Substituted values are
/// stored as literals and never re-scanned.
class PromptTemplate {
 public:
  enum class Kind : unsigned char { Literal, Instance, Dataset };
  struct Segment {
    Kind kind;
    std::string value;  // literal text or placeholder name
    friend bool operator==(const Segment&, const Segment&) = default;
  };

  PromptTemplate() = default;
  static PromptTemplate parse(std::string_view source);

  std::set<std::string> instance_placeholders() const;
  std::set<std::string> dataset_placeholders() const;

  /// Replaces dataset placeholders; throws UnboundPlaceholder for any missing.
  PromptTemplate bind_dataset(const Bindings& values) const;

  /// Full substitution of instance placeholders. Dataset placeholders must
  /// already be bound.
  std::string render(const Bindings& values) const;

  /// Source form, with placeholders written back in their bracket syntax.
  std::string source() const;

  const std::vector<Segment>& segments() const noexcept { return segments_; }

  friend bool operator==(const PromptTemplate&, const PromptTemplate&) = default;

 private:
  std::vector<Segment> segments_;
};

struct Stage {
  PromptTemplate prompt;
  std::string produces;
  std::vector<std::string> consumes;
};

/// Ordered prompts for one scheme and dataset. The last stage's completion
/// is the one handed to the parser.
struct StagePlan {
  PromptScheme scheme = PromptScheme::TaskOnly;
  std::vector<Stage> stages;
};

struct RenderedPrompt {
  std::string text;
  PromptScheme scheme = PromptScheme::TaskOnly;
  std::size_t stage_index = 0;
  std::string record_id;
};

/// Bindings every record supplies: statement and event (the record target).
inline constexpr std::array<std::string_view, 2> kRecordBindings{"statement", "event"};

/// Stage templates plus the produces/consumes manifest, per scheme.
class TemplateLibrary {
 public:
  struct StageAsset {
    std::string source;
    std::string produces;
    std::vector<std::string> consumes;
  };

  /// Assets compiled into the library.
  static const TemplateLibrary& builtin();
  /// templates/<scheme>/<i>.txt plus templates/manifest.json.
  static TemplateLibrary load(const std::filesystem::path& dir);

  const std::vector<StageAsset>& stages(PromptScheme scheme) const;

 private:
  std::map<PromptScheme, std::vector<StageAsset>> schemes_;

  template <typename ReadFile>
  static TemplateLibrary from_manifest(std::string_view manifest_text, ReadFile&& read);
};

/// Dataset-level bindings derived from a config (and exemplars for few-shot).
Bindings dataset_bindings(const DatasetConfig& config, std::span<const Exemplar> exemplars);

/// Throws MissingExemplars for FewShot without exemplars, ConfigError when the
/// manifest's dependency declarations are inconsistent with the templates.
StagePlan build_plan(PromptScheme scheme, const DatasetConfig& config,
                     std::span<const Exemplar> exemplars = {},
                     const TemplateLibrary& library = TemplateLibrary::builtin());

/// Structural check: stage k consumes only record bindings and names produced
/// by stages before k, and every placeholder is declared. Throws ConfigError.
void validate_plan(const StagePlan& plan);

RenderedPrompt render_stage(const StagePlan& plan, std::size_t stage_index,
                            const Bindings& bindings, std::string record_id = {});

/// Blank-line-separated "<label>: target", "statement: ...", "stance: ..."
/// blocks, one per exemplar, in order.
std::string render_fewshot_block(std::span<const Exemplar> exemplars,
                                 std::string_view target_label = "entity");

Bindings record_bindings(const StanceRecord& record);

}  // namespace stance
