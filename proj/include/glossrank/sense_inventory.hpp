#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace glossrank {

enum class PartOfSpeech { kNoun, kVerb, kAdjective, kAdverb, kOther };

/// Inventory file letters: n, v, a, r, x.
char pos_letter(PartOfSpeech pos) noexcept;
std::optional<PartOfSpeech> parse_pos(std::string_view letter) noexcept;

enum class SenseSource { kKnowledgeBase, kGenerated };

struct SenseEntry {
  std::string lemma;  // normalized
  PartOfSpeech pos = PartOfSpeech::kNoun;
  std::string definition;
  SenseSource source = SenseSource::kKnowledgeBase;

  bool operator==(const SenseEntry&) const = default;
};

/// Builds a validated entry: lemma normalized, definition trimmed and non-empty.
/// Throws Error(kMalformedRecord) on a blank lemma or definition.
SenseEntry make_sense(std::string_view lemma, PartOfSpeech pos, std::string_view definition,
                      SenseSource source = SenseSource::kKnowledgeBase);

enum class AmbiguityLevel { kOov, kTrivial, kAmbiguous };

struct AmbiguityClass {
  AmbiguityLevel level;
  std::size_t count;  // |D|
};

AmbiguityClass classify_count(std::size_t count) noexcept;
std::string_view to_string(AmbiguityLevel level) noexcept;

/// WordNet-style sense inventory. Immutable once built; entries keep file
/// order and (lemma, pos, definition) triples are unique.
class SenseInventory {
 public:
  SenseInventory() = default;

  /// Appends an entry; returns false (and drops it) for a duplicate triple.
  bool add(SenseEntry entry);

  /// All senses of the normalized target, optionally restricted to one pos.
  /// An empty result means OOV.
  std::vector<SenseEntry> lookup(std::string_view target,
                                 std::optional<PartOfSpeech> pos = std::nullopt) const;

  /// Pos-agnostic sense count without copying entries.
  std::size_t count(std::string_view target) const;

  AmbiguityClass ambiguity_class(std::string_view target) const { return classify_count(count(target)); }

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t lemma_count() const noexcept { return by_lemma_.size(); }
  const std::vector<SenseEntry>& entries() const noexcept { return entries_; }

  /// Inventory file format, one `lemma<TAB>pos<TAB>definition` per line.
  void write(std::ostream& out) const;

  bool operator==(const SenseInventory& other) const { return entries_ == other.entries_; }

 private:
  std::vector<SenseEntry> entries_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_lemma_;
};

/// Throws Error(kMalformedRecord) naming the 1-based line, Error(kEmptyInventory)
/// when no valid records are found, Error(kIOError) if the file can't be read.
SenseInventory load_inventory(const std::filesystem::path& path);
SenseInventory parse_inventory(std::istream& in, std::string_view source_name = "<stream>");

std::string lemma_key(std::string_view target);

}  // namespace glossrank
