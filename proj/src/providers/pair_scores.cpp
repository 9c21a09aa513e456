#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "glossrank/error.hpp"
#include "glossrank/providers.hpp"
#include "glossrank/text.hpp"

namespace glossrank {

std::string PairScoreTable::join(const std::string& text_key, const std::string& image_key) {
  std::string k;
  k.reserve(text_key.size() + image_key.size() + 1);
  k.append(text_key).push_back('\t');
  k.append(image_key);
  return k;
}

void PairScoreTable::set(const std::string& text_key, const std::string& image_key, double score) {
  auto k = join(text_key, image_key);
  const auto [it, inserted] = scores_.insert_or_assign(k, score);
  if (inserted) order_.push_back(std::move(k));
}

bool PairScoreTable::contains(const std::string& text_key, const std::string& image_key) const {
  return scores_.contains(join(text_key, image_key));
}

double PairScoreTable::pair_score(const std::string& text_key, const std::string& image_key) const {
  const auto it = scores_.find(join(text_key, image_key));
  if (it == scores_.end()) {
    throw Error(ErrorCode::kMissingPair, "no score for text '" + text_key + "' and image '" + image_key + "'");
  }
  return it->second;
}

PairScoreTable PairScoreTable::parse(std::istream& in, std::string_view source_name) {
  std::string raw;
  if (!std::getline(in, raw) || text::trim(text::chomp(raw)) != "#glossrank-pairs v1") {
    throw Error(ErrorCode::kBadHeader, std::string(source_name) + ": expected '#glossrank-pairs v1'");
  }
  PairScoreTable table;
  std::size_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = text::chomp(raw);
    if (text::trim(line).empty() || line.front() == '#') continue;
    const auto fields = text::split(line, '\t');
    double score = 0.0;
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() ||
        !text::parse_double(text::trim(fields[2]), score) || !std::isfinite(score)) {
      throw Error(ErrorCode::kMalformedRecord, std::string(source_name) + ":" + std::to_string(line_no) +
                                                   ": expected '<text_key>\\t<image_key>\\t<score>'");
    }
    table.set(std::string(fields[0]), std::string(fields[1]), score);
  }
  return table;
}

PairScoreTable PairScoreTable::open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIOError, "cannot open pair-score file " + path.string());
  return parse(in, path.string());
}

void PairScoreTable::write(std::ostream& out) const {
  out << "#glossrank-pairs v1\n";
  for (const std::string& k : order_) out << k << '\t' << text::format_double(scores_.at(k)) << '\n';
}

}  // namespace glossrank
