#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dore/relations.hpp"

namespace dore {

/// joint renders one prompt covering all relation types; per_type renders one
/// prompt per type (or a single type on request).
enum class PromptMode { per_type, joint };

const char* prompt_mode_name(PromptMode mode);
std::optional<PromptMode> prompt_mode_from_name(std::string_view name);

/// One-shot example embedded in the prompt: a dialogue, its term inventory and
/// its relations in bracket form. Every relation must use listed terms.
struct Exemplar {
  std::string dialogue;
  std::vector<std::string> terms;
  std::vector<RelationTriplet> relations;

  void validate() const;
};

/// Template text with the placeholders {instruction}, {exemplar}, {dialogue},
/// {terms} and {relation_definitions}, each required exactly once. Other
/// brace expressions pass through verbatim.
struct PromptTemplate {
  std::string text;
  PromptMode mode = PromptMode::joint;

  static PromptTemplate from_text(std::string text, PromptMode mode);
  static PromptTemplate from_file(const std::string& path, PromptMode mode);
  /// The default template shipped with the tool.
  static PromptTemplate built_in(PromptMode mode);
};

/// One definition line per relation type, used for {relation_definitions}.
std::string relation_definition(RelationType type);

/// Fills the template. Pure: identical inputs produce byte-identical prompts.
/// joint mode ignores `only` and returns one prompt; per_type mode returns one
/// prompt for `only` when set, otherwise one per relation type in canonical
/// order. The term list must be non-empty; an exemplar, when given, is
/// validated and its relations are filtered to the prompt's type in per_type
/// mode.
std::vector<std::string> render_prompts(const PromptTemplate& tmpl, const std::string& dialogue,
                                        const std::vector<std::string>& terms,
                                        const Exemplar* exemplar = nullptr,
                                        std::optional<RelationType> only = std::nullopt);

}  // namespace dore
