#include "stance/prompting.hpp"

#include <algorithm>

#include "stance/errors.hpp"

namespace stance {

namespace {

constexpr std::array<std::string_view, 7> kSchemeNames{
    "task_only", "task_definition", "context_analyze", "context_question",
    "few_shot",  "zero_shot_cot",   "coda"};
constexpr std::array<std::string_view, 7> kSchemeEnumNames{
    "TaskOnly", "TaskDefinition", "ContextAnalyze", "ContextQuestion",
    "FewShot",  "ZeroShotCoT",    "CoDA"};

bool is_name_char(char c) noexcept { return (c >= 'a' && c <= 'z') || c == '_'; }

// Length of a placeholder starting at s[0] ('{' or '['), or 0 if none.
std::size_t placeholder_length(std::string_view s) noexcept {
  const char close = s.front() == '{' ? '}' : ']';
  std::size_t i = 1;
  while (i < s.size() && is_name_char(s[i])) ++i;
  if (i == 1 || i >= s.size() || s[i] != close) return 0;
  return i + 1;
}

void append_literal(std::vector<PromptTemplate::Segment>& out, std::string_view text) {
  if (text.empty()) return;
  if (!out.empty() && out.back().kind == PromptTemplate::Kind::Literal) {
    out.back().value.append(text);
  } else {
    out.push_back({PromptTemplate::Kind::Literal, std::string(text)});
  }
}

std::string join_options(const std::array<std::string, 4>& options, bool quoted) {
  auto word = [&](std::size_t i) { return quoted ? "\"" + options[i] + "\"" : options[i]; };
  return word(0) + ", " + word(1) + ", " + word(2) + ", or " + word(3);
}

}  // namespace

std::string_view scheme_name(PromptScheme scheme) noexcept {
  return kSchemeNames[static_cast<std::size_t>(scheme)];
}

std::optional<PromptScheme> parse_scheme(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kAllSchemes.size(); ++i) {
    if (name == kSchemeNames[i] || name == kSchemeEnumNames[i]) return kAllSchemes[i];
  }
  return std::nullopt;
}

std::size_t expected_stage_count(PromptScheme scheme) noexcept {
  switch (scheme) {
    case PromptScheme::ZeroShotCoT: return 2;
    case PromptScheme::CoDA: return 6;
    default: return 1;
  }
}

// --- PromptTemplate ---------------------------------------------------------

PromptTemplate PromptTemplate::parse(std::string_view source) {
  PromptTemplate t;
  std::size_t literal_start = 0;
  std::size_t i = 0;
  while (i < source.size()) {
    const char c = source[i];
    if (c == '{' || c == '[') {
      if (const std::size_t len = placeholder_length(source.substr(i)); len > 0) {
        append_literal(t.segments_, source.substr(literal_start, i - literal_start));
        t.segments_.push_back({c == '{' ? Kind::Instance : Kind::Dataset,
                               std::string(source.substr(i + 1, len - 2))});
        i += len;
        literal_start = i;
        continue;
      }
    }
    ++i;
  }
  append_literal(t.segments_, source.substr(literal_start));
  return t;
}

std::set<std::string> PromptTemplate::instance_placeholders() const {
  std::set<std::string> names;
  for (const auto& s : segments_) {
    if (s.kind == Kind::Instance) names.insert(s.value);
  }
  return names;
}

std::set<std::string> PromptTemplate::dataset_placeholders() const {
  std::set<std::string> names;
  for (const auto& s : segments_) {
    if (s.kind == Kind::Dataset) names.insert(s.value);
  }
  return names;
}

PromptTemplate PromptTemplate::bind_dataset(const Bindings& values) const {
  PromptTemplate out;
  for (const auto& s : segments_) {
    if (s.kind == Kind::Dataset) {
      const auto it = values.find(s.value);
      if (it == values.end()) throw UnboundPlaceholder(s.value);
      append_literal(out.segments_, it->second);
    } else if (s.kind == Kind::Literal) {
      append_literal(out.segments_, s.value);
    } else {
      out.segments_.push_back(s);
    }
  }
  return out;
}

std::string PromptTemplate::render(const Bindings& values) const {
  std::string out;
  for (const auto& s : segments_) {
    switch (s.kind) {
      case Kind::Literal: out += s.value; break;
      case Kind::Dataset: throw UnboundPlaceholder(s.value);
      case Kind::Instance: {
        const auto it = values.find(s.value);
        if (it == values.end()) throw UnboundPlaceholder(s.value);
        out += it->second;
        break;
      }
    }
  }
  return out;
}

std::string PromptTemplate::source() const {
  std::string out;
  for (const auto& s : segments_) {
    switch (s.kind) {
      case Kind::Literal: out += s.value; break;
      case Kind::Instance: out += "{" + s.value + "}"; break;
      case Kind::Dataset: out += "[" + s.value + "]"; break;
    }
  }
  return out;
}

// --- plans ------------------------------------------------------------------

Bindings dataset_bindings(const DatasetConfig& config, std::span<const Exemplar> exemplars) {
  Bindings b{{"target_kind", config.target_kind},
             {"target_kind_plural", config.target_kind_plural},
             {"options_quoted", join_options(config.stance_options, true)},
             {"options_list", join_options(config.stance_options, false)}};
  if (!exemplars.empty()) b["fewshot_block"] = render_fewshot_block(exemplars, config.target_kind);
  return b;
}

StagePlan build_plan(PromptScheme scheme, const DatasetConfig& config, std::span<const Exemplar> exemplars,
                     const TemplateLibrary& library) {
  if (scheme == PromptScheme::FewShot && exemplars.empty()) throw MissingExemplars();

  const auto& assets = library.stages(scheme);
  if (assets.size() != expected_stage_count(scheme)) {
    throw ConfigError(std::string(scheme_name(scheme)) + ": expected " +
                      std::to_string(expected_stage_count(scheme)) + " stage templates, found " +
                      std::to_string(assets.size()));
  }

  const Bindings dataset = dataset_bindings(config, exemplars);
  StagePlan plan;
  plan.scheme = scheme;
  for (const auto& asset : assets) {
    plan.stages.push_back(
        {PromptTemplate::parse(asset.source).bind_dataset(dataset), asset.produces, asset.consumes});
  }
  validate_plan(plan);
  return plan;
}

void validate_plan(const StagePlan& plan) {
  std::set<std::string> available(kRecordBindings.begin(), kRecordBindings.end());
  for (std::size_t k = 0; k < plan.stages.size(); ++k) {
    const auto& stage = plan.stages[k];
    const std::string where = std::string(scheme_name(plan.scheme)) + " stage " + std::to_string(k);
    if (!stage.prompt.dataset_placeholders().empty()) {
      throw ConfigError(where + ": unbound dataset placeholder [" + *stage.prompt.dataset_placeholders().begin() +
                        "]");
    }
    const std::set<std::string> declared(stage.consumes.begin(), stage.consumes.end());
    if (declared != stage.prompt.instance_placeholders()) {
      throw ConfigError(where + ": declared consumes do not match the template placeholders");
    }
    for (const auto& name : declared) {
      if (!available.contains(name)) throw ConfigError(where + ": consumes \"" + name + "\" before it is produced");
    }
    if (stage.produces.empty() || available.contains(stage.produces)) {
      throw ConfigError(where + ": produces an empty or already bound name \"" + stage.produces + "\"");
    }
    available.insert(stage.produces);
  }
}

RenderedPrompt render_stage(const StagePlan& plan, std::size_t stage_index, const Bindings& bindings,
                            std::string record_id) {
  if (stage_index >= plan.stages.size()) throw UnknownStage(stage_index);
  return {plan.stages[stage_index].prompt.render(bindings), plan.scheme, stage_index, std::move(record_id)};
}

std::string render_fewshot_block(std::span<const Exemplar> exemplars, std::string_view target_label) {
  std::string out;
  for (const auto& ex : exemplars) {
    if (!out.empty()) out += "\n\n";
    out.append(target_label).append(": ").append(ex.target);
    out.append("\n\nstatement: ").append(ex.statement);
    out.append("\n\nstance: ").append(ex.stance_word);
  }
  return out;
}

Bindings record_bindings(const StanceRecord& record) {
  return {{"statement", record.statement}, {"event", record.target}};
}

}  // namespace stance
