#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "glossrank/error.hpp"
#include "glossrank/eval.hpp"
#include "glossrank/text.hpp"

namespace glossrank {

void VwsdInstance::validate() const {
  if (id.empty() || text::trim(target).empty() || text::trim(context).empty()) {
    throw Error(ErrorCode::kMalformedLine, "instance '" + id + "' needs id, target and context");
  }
  if (candidates.empty()) throw Error(ErrorCode::kMalformedLine, "instance '" + id + "' has no candidates");
  std::unordered_set<std::string> seen;
  for (const auto& c : candidates) {
    if (c.empty()) throw Error(ErrorCode::kMalformedLine, "instance '" + id + "' has an empty candidate");
    if (!seen.insert(c).second) {
      throw Error(ErrorCode::kMalformedLine, "instance '" + id + "' lists candidate '" + c + "' twice");
    }
  }
  if (gold && !seen.contains(*gold)) {
    throw Error(ErrorCode::kGoldNotAmongCandidates, "instance '" + id + "': gold '" + *gold + "'");
  }
}

std::vector<VwsdInstance> parse_dataset(std::istream& data, std::istream* gold, std::string_view source_name) {
  std::vector<VwsdInstance> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(data, raw)) {
    ++line_no;
    const std::string_view line = text::chomp(raw);
    if (text::trim(line).empty() || line.front() == '#') continue;
    const auto fields = text::split(line, '\t');
    if (fields.size() < 4) {
      throw Error(ErrorCode::kMalformedLine, std::string(source_name) + ":" + std::to_string(line_no) +
                                                 ": expected id, target, context and candidates");
    }
    VwsdInstance inst;
    inst.id = std::string(text::trim(fields[0]));
    inst.target = std::string(text::trim(fields[1]));
    inst.context = std::string(text::trim(fields[2]));
    for (std::size_t i = 3; i < fields.size(); ++i) inst.candidates.emplace_back(text::trim(fields[i]));
    try {
      inst.validate();
    } catch (const Error& e) {
      throw Error(e.code(), std::string(source_name) + ":" + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(std::move(inst));
  }

  if (gold != nullptr) {
    std::vector<std::string> golds;
    while (std::getline(*gold, raw)) {
      const auto g = text::trim(text::chomp(raw));
      if (!g.empty()) golds.emplace_back(g);
    }
    if (golds.size() != out.size()) {
      throw Error(ErrorCode::kGoldLengthMismatch, std::to_string(golds.size()) + " gold lines for " +
                                                      std::to_string(out.size()) + " instances");
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i].gold = golds[i];
      out[i].validate();
    }
  }
  return out;
}

void write_dataset(std::ostream& data, std::ostream* gold, std::span<const VwsdInstance> instances) {
  for (const auto& inst : instances) {
    data << inst.id << '\t' << inst.target << '\t' << inst.context;
    for (const auto& c : inst.candidates) data << '\t' << c;
    data << '\n';
    if (gold != nullptr) *gold << inst.gold.value_or("") << '\n';
  }
}

std::vector<VwsdInstance> load_dataset(const std::filesystem::path& data_path,
                                       const std::optional<std::filesystem::path>& gold_path) {
  std::ifstream data(data_path);
  if (!data) throw Error(ErrorCode::kIOError, "cannot open dataset " + data_path.string());
  if (!gold_path) return parse_dataset(data, nullptr, data_path.string());
  std::ifstream gold(*gold_path);
  if (!gold) throw Error(ErrorCode::kIOError, "cannot open gold file " + gold_path->string());
  return parse_dataset(data, &gold, data_path.string());
}

}  // namespace glossrank
