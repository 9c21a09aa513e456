#include <fstream>
#include <istream>
#include <ostream>

#include "glossrank/defgen.hpp"
#include "glossrank/error.hpp"
#include "glossrank/text.hpp"

namespace glossrank {

void GeneratedDefinitions::add(Row row) {
  row.definition = text::single_line(row.definition);
  index_[{row.id, row.kind}].push_back(rows_.size());
  rows_.push_back(std::move(row));
}

std::vector<SenseEntry> GeneratedDefinitions::lookup(std::string_view id, PromptKind kind) const {
  std::vector<SenseEntry> out;
  const auto it = index_.find({std::string(id), kind});
  if (it == index_.end()) return out;
  for (std::size_t idx : it->second) {
    const Row& r = rows_[idx];
    out.push_back(make_sense(r.target, PartOfSpeech::kOther, r.definition, SenseSource::kGenerated));
  }
  return out;
}

SenseInventory GeneratedDefinitions::as_inventory() const {
  SenseInventory inv;
  for (const Row& r : rows_) {
    inv.add(make_sense(r.target, PartOfSpeech::kOther, r.definition, SenseSource::kGenerated));
  }
  return inv;
}

GeneratedDefinitions GeneratedDefinitions::parse(std::istream& in, std::string_view source_name) {
  GeneratedDefinitions defs;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = text::chomp(raw);
    if (text::trim(line).empty() || line.front() == '#') continue;
    const auto fields = text::split(line, '\t');
    const auto kind = fields.size() == 4 ? parse_prompt_kind(fields[1]) : std::nullopt;
    if (!kind || fields[0].empty() || text::trim(fields[2]).empty() || text::trim(fields[3]).empty()) {
      throw Error(ErrorCode::kMalformedLine, std::string(source_name) + ":" + std::to_string(line_no) +
                                                 ": expected 'id\\tdg|cadg\\ttarget\\tdefinition'");
    }
    defs.add(Row{std::string(fields[0]), *kind, std::string(fields[2]), std::string(text::trim(fields[3]))});
  }
  return defs;
}

GeneratedDefinitions GeneratedDefinitions::open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIOError, "cannot open generated definitions " + path.string());
  return parse(in, path.string());
}

void GeneratedDefinitions::write(std::ostream& out) const {
  for (const Row& r : rows_) {
    out << r.id << '\t' << to_string(r.kind) << '\t' << r.target << '\t' << r.definition << '\n';
  }
}

}  // namespace glossrank
