#include "glossrank/sense_inventory.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "glossrank/error.hpp"
#include "glossrank/text.hpp"

namespace glossrank {

char pos_letter(PartOfSpeech pos) noexcept {
  switch (pos) {
    case PartOfSpeech::kNoun: return 'n';
    case PartOfSpeech::kVerb: return 'v';
    case PartOfSpeech::kAdjective: return 'a';
    case PartOfSpeech::kAdverb: return 'r';
    case PartOfSpeech::kOther: return 'x';
  }
  return 'x';
}

std::optional<PartOfSpeech> parse_pos(std::string_view letter) noexcept {
  if (letter == "n") return PartOfSpeech::kNoun;
  if (letter == "v") return PartOfSpeech::kVerb;
  if (letter == "a") return PartOfSpeech::kAdjective;
  if (letter == "r") return PartOfSpeech::kAdverb;
  if (letter == "x") return PartOfSpeech::kOther;
  return std::nullopt;
}

std::string lemma_key(std::string_view target) { return text::normalize_lemma(target); }

SenseEntry make_sense(std::string_view lemma, PartOfSpeech pos, std::string_view definition,
                      SenseSource source) {
  SenseEntry entry{lemma_key(lemma), pos, std::string(text::trim(definition)), source};
  if (entry.lemma.empty()) throw Error(ErrorCode::kMalformedRecord, "blank lemma");
  if (entry.definition.empty()) {
    throw Error(ErrorCode::kMalformedRecord, "blank definition for '" + entry.lemma + "'");
  }
  return entry;
}

AmbiguityClass classify_count(std::size_t count) noexcept {
  if (count == 0) return {AmbiguityLevel::kOov, 0};
  if (count == 1) return {AmbiguityLevel::kTrivial, 1};
  return {AmbiguityLevel::kAmbiguous, count};
}

std::string_view to_string(AmbiguityLevel level) noexcept {
  switch (level) {
    case AmbiguityLevel::kOov: return "oov";
    case AmbiguityLevel::kTrivial: return "trivial";
    case AmbiguityLevel::kAmbiguous: return "ambiguous";
  }
  return "unknown";
}

bool SenseInventory::add(SenseEntry entry) {
  auto& slots = by_lemma_[entry.lemma];
  for (std::size_t idx : slots) {
    const SenseEntry& e = entries_[idx];
    if (e.pos == entry.pos && e.definition == entry.definition) return false;
  }
  slots.push_back(entries_.size());
  entries_.push_back(std::move(entry));
  return true;
}

std::vector<SenseEntry> SenseInventory::lookup(std::string_view target,
                                               std::optional<PartOfSpeech> pos) const {
  std::vector<SenseEntry> out;
  const auto it = by_lemma_.find(lemma_key(target));
  if (it == by_lemma_.end()) return out;
  for (std::size_t idx : it->second) {
    if (!pos || entries_[idx].pos == *pos) out.push_back(entries_[idx]);
  }
  return out;
}

std::size_t SenseInventory::count(std::string_view target) const {
  const auto it = by_lemma_.find(lemma_key(target));
  return it == by_lemma_.end() ? 0 : it->second.size();
}

void SenseInventory::write(std::ostream& out) const {
  for (const SenseEntry& e : entries_) {
    out << e.lemma << '\t' << pos_letter(e.pos) << '\t' << e.definition << '\n';
  }
}

SenseInventory parse_inventory(std::istream& in, std::string_view source_name) {
  SenseInventory inv;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = text::chomp(raw);
    if (text::trim(line).empty() || line.front() == '#') continue;

    const auto where = [&] { return std::string(source_name) + ":" + std::to_string(line_no); };
    const auto fields = text::split(line, '\t');
    if (fields.size() != 3) {
      throw Error(ErrorCode::kMalformedRecord,
                  where() + ": expected 3 tab-separated fields, got " + std::to_string(fields.size()));
    }
    const auto pos = parse_pos(text::trim(fields[1]));
    if (!pos) {
      throw Error(ErrorCode::kMalformedRecord,
                  where() + ": unknown part of speech '" + std::string(fields[1]) + "'");
    }
    if (text::trim(fields[0]).empty()) throw Error(ErrorCode::kMalformedRecord, where() + ": blank lemma");
    if (text::trim(fields[2]).empty()) {
      throw Error(ErrorCode::kMalformedRecord, where() + ": blank definition");
    }
    inv.add(make_sense(fields[0], *pos, fields[2]));
  }
  if (inv.size() == 0) {
    throw Error(ErrorCode::kEmptyInventory, std::string(source_name) + ": no sense records");
  }
  return inv;
}

SenseInventory load_inventory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIOError, "cannot open inventory " + path.string());
  return parse_inventory(in, path.string());
}

}  // namespace glossrank
