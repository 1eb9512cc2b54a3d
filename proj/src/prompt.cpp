#include "dore/prompt.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "dore/error.hpp"

namespace dore {

namespace {

constexpr std::string_view kPlaceholders[] = {"instruction", "exemplar", "dialogue", "terms",
                                              "relation_definitions"};

constexpr const char* kDefaultTemplate =
    "{instruction}\n"
    "\n"
    "Relation formats:\n"
    "{relation_definitions}\n"
    "\n"
    "{exemplar}Dialogue:\n"
    "{dialogue}\n"
    "\n"
    "Terms: {terms}\n"
    "\n"
    "Relations:\n";

std::string instruction_for(std::optional<RelationType> type) {
  if (!type) {
    return "List every relation that holds between the given terms. Write each one as a "
           "bracketed triplet [term, relation phrase, term], using only the relation phrases "
           "defined below and only terms from the term list.";
  }
  std::string verb(verbaliser(*type));
  return "List every \"" + verb +
         "\" relation that holds between the given terms. Write each one as a bracketed "
         "triplet [term, " +
         verb + ", term], using only terms from the term list.";
}

std::string join_terms(const std::vector<std::string>& terms) {
  std::string out;
  for (size_t i = 0; i < terms.size(); ++i) {
    if (i) out += "; ";
    out += terms[i];
  }
  return out;
}

std::string definitions_for(std::optional<RelationType> only) {
  if (only) return relation_definition(*only);
  std::string out;
  for (size_t i = 0; i < kAllRelationTypes.size(); ++i) {
    if (i) out += '\n';
    out += relation_definition(kAllRelationTypes[i]);
  }
  return out;
}

std::string render_exemplar(const Exemplar& ex, std::optional<RelationType> only) {
  std::string out = "Example:\n";
  out += ex.dialogue;
  if (!out.empty() && out.back() != '\n') out += '\n';
  out += "Terms: " + join_terms(ex.terms) + "\n";
  out += "Relations:";
  bool any = false;
  for (const auto& r : ex.relations) {
    if (only && r.relation != *only) continue;
    out += ' ';
    out += bracket_form(r);
    any = true;
  }
  if (!any) out += " (none)";
  out += "\n\n";
  return out;
}

// Single-pass substitution: placeholder values are emitted verbatim, never
// rescanned, so braces inside dialogue text cannot trigger a second expansion.
std::string substitute(const std::string& text,
                       const std::vector<std::pair<std::string_view, std::string>>& values) {
  std::string out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '{') {
      out += text[i++];
      continue;
    }
    size_t close = text.find('}', i + 1);
    if (close == std::string::npos) {
      out += text.substr(i);
      break;
    }
    std::string_view name(text.data() + i + 1, close - i - 1);
    auto hit = std::find_if(values.begin(), values.end(),
                            [&](const auto& kv) { return kv.first == name; });
    if (hit == values.end()) {
      out += text.substr(i, close - i + 1);
    } else {
      out += hit->second;
    }
    i = close + 1;
  }
  return out;
}

}  // namespace

const char* prompt_mode_name(PromptMode mode) {
  return mode == PromptMode::per_type ? "per-type" : "joint";
}

std::optional<PromptMode> prompt_mode_from_name(std::string_view name) {
  if (name == "per-type" || name == "per_type") return PromptMode::per_type;
  if (name == "joint") return PromptMode::joint;
  return std::nullopt;
}

void Exemplar::validate() const {
  std::vector<std::string> canon;
  canon.reserve(terms.size());
  for (const auto& t : terms) canon.push_back(canonicalize(t));
  auto listed = [&](const std::string& term) {
    return std::find(canon.begin(), canon.end(), canonicalize(term)) != canon.end();
  };
  for (const auto& r : relations) {
    if (!listed(r.head) || !listed(r.tail))
      fail(ErrorCode::invalid_argument,
           "exemplar relation " + bracket_form(r) + " uses a term missing from its term list");
  }
}

PromptTemplate PromptTemplate::from_text(std::string text, PromptMode mode) {
  for (std::string_view name : kPlaceholders) {
    std::string needle = "{" + std::string(name) + "}";
    size_t first = text.find(needle);
    if (first == std::string::npos)
      fail(ErrorCode::invalid_argument, "template is missing the placeholder " + needle);
    if (text.find(needle, first + 1) != std::string::npos)
      fail(ErrorCode::invalid_argument, "template repeats the placeholder " + needle);
  }
  PromptTemplate tmpl;
  tmpl.text = std::move(text);
  tmpl.mode = mode;
  return tmpl;
}

PromptTemplate PromptTemplate::from_file(const std::string& path, PromptMode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot open template file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_text(buffer.str(), mode);
}

PromptTemplate PromptTemplate::built_in(PromptMode mode) {
  return from_text(kDefaultTemplate, mode);
}

std::string relation_definition(RelationType type) {
  switch (type) {
    case RelationType::domain_slot:
      return "[term1, has slot, term2]: term1 is a domain and term2 is one of its slots.";
    case RelationType::slot_value:
      return "[term1, has value, term2]: term1 is a slot and term2 is one of its values.";
    case RelationType::value_domain:
      return "[term1, has domain, term2]: term1 is a value and term2 is the domain it belongs "
             "to.";
    case RelationType::equivalence:
      return "[term1, refers to same concept as, term2]: term1 and term2 name the same concept.";
  }
  fail(ErrorCode::internal, "unknown relation type");
}

std::vector<std::string> render_prompts(const PromptTemplate& tmpl, const std::string& dialogue,
                                        const std::vector<std::string>& terms,
                                        const Exemplar* exemplar,
                                        std::optional<RelationType> only) {
  if (terms.empty()) fail(ErrorCode::invalid_argument, "cannot render a prompt with no terms");
  if (exemplar) exemplar->validate();

  std::vector<std::optional<RelationType>> targets;
  if (tmpl.mode == PromptMode::joint) {
    targets.push_back(std::nullopt);
  } else if (only) {
    targets.push_back(only);
  } else {
    for (RelationType type : kAllRelationTypes) targets.push_back(type);
  }

  std::vector<std::string> prompts;
  prompts.reserve(targets.size());
  for (std::optional<RelationType> target : targets) {
    std::vector<std::pair<std::string_view, std::string>> values;
    values.emplace_back("instruction", instruction_for(target));
    values.emplace_back("exemplar", exemplar ? render_exemplar(*exemplar, target) : "");
    values.emplace_back("dialogue", dialogue);
    values.emplace_back("terms", join_terms(terms));
    values.emplace_back("relation_definitions", definitions_for(target));
    prompts.push_back(substitute(tmpl.text, values));
  }
  return prompts;
}

}  // namespace dore
