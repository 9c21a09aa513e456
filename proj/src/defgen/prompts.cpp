#include <cmath>
#include <cstdio>

#include "glossrank/defgen.hpp"
#include "glossrank/error.hpp"
#include "glossrank/providers.hpp"
#include "glossrank/text.hpp"

namespace glossrank {

std::string_view to_string(DefinitionSourceMode mode) noexcept {
  switch (mode) {
    case DefinitionSourceMode::kNone: return "none";
    case DefinitionSourceMode::kWn: return "wn";
    case DefinitionSourceMode::kDg: return "dg";
    case DefinitionSourceMode::kCadg: return "cadg";
    case DefinitionSourceMode::kWnPlusCadg: return "wn+cadg";
  }
  return "unknown";
}

std::optional<DefinitionSourceMode> parse_definition_mode(std::string_view s) noexcept {
  if (s == "none") return DefinitionSourceMode::kNone;
  if (s == "wn") return DefinitionSourceMode::kWn;
  if (s == "dg") return DefinitionSourceMode::kDg;
  if (s == "cadg") return DefinitionSourceMode::kCadg;
  if (s == "wn+cadg") return DefinitionSourceMode::kWnPlusCadg;
  return std::nullopt;
}

std::string_view to_string(PromptKind kind) noexcept { return kind == PromptKind::kDg ? "dg" : "cadg"; }

std::optional<PromptKind> parse_prompt_kind(std::string_view s) noexcept {
  if (s == "dg") return PromptKind::kDg;
  if (s == "cadg") return PromptKind::kCadg;
  return std::nullopt;
}

namespace {
char prompt_pos_letter(PartOfSpeech pos) noexcept {
  return pos == PartOfSpeech::kOther ? 'n' : pos_letter(pos);
}
}  // namespace

std::string build_dg_prompt(std::string_view target, PartOfSpeech pos) {
  if (text::trim(target).empty()) throw Error(ErrorCode::kEmptyTarget, "definition prompt needs a target");
  std::string out(target);
  out.append(" (").push_back(prompt_pos_letter(pos));
  out.push_back(')');
  return out;
}

std::string build_cadg_prompt(std::string_view target, PartOfSpeech pos, std::string_view context) {
  if (text::trim(target).empty()) throw Error(ErrorCode::kEmptyTarget, "context-aware prompt needs a target");
  if (text::trim(context).empty()) throw Error(ErrorCode::kEmptyField, "context-aware prompt needs a context");
  std::string out = "Define \"";
  out.append(target).append("\" in ").append(context).append(".\n");
  out.append(build_dg_prompt(target, pos));
  return out;
}

void GenRequest::validate() const {
  if (prompt.empty()) throw Error(ErrorCode::kEmptyField, "generation request has an empty prompt");
  if (n_samples < 1) throw Error(ErrorCode::kInvalidConfig, "n_samples must be >= 1");
  if (!(std::isfinite(temperature) && temperature >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "temperature must be >= 0");
  }
}

std::string fingerprint(const GenRequest& req) {
  std::string material = req.prompt;
  material.push_back('\x1f');
  material.append(std::to_string(req.n_samples));
  material.push_back('\x1f');
  material.append(text::format_double(req.temperature));
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(material)));
  return hex;
}

std::vector<SenseEntry> as_generated_entries(std::string_view target, PartOfSpeech pos,
                                             const std::vector<std::string>& samples) {
  std::vector<SenseEntry> out;
  out.reserve(samples.size());
  for (const std::string& s : samples) out.push_back(make_sense(target, pos, text::single_line(s), SenseSource::kGenerated));
  return out;
}

std::vector<SenseEntry> assemble_definitions(DefinitionSourceMode mode, const std::vector<SenseEntry>& wn_defs,
                                             const std::vector<SenseEntry>& gen_defs) {
  std::vector<SenseEntry> out;
  switch (mode) {
    case DefinitionSourceMode::kNone: return out;
    case DefinitionSourceMode::kWn: out = wn_defs; break;
    case DefinitionSourceMode::kDg:
    case DefinitionSourceMode::kCadg: out = gen_defs; break;
    case DefinitionSourceMode::kWnPlusCadg: out = wn_defs.empty() ? gen_defs : wn_defs; break;
  }
  if (out.empty()) {
    throw Error(ErrorCode::kNoDefinitionsAvailable,
                "no definitions under mode '" + std::string(to_string(mode)) + "'");
  }
  return out;
}

}  // namespace glossrank
