#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "glossrank/error.hpp"
#include "glossrank/providers.hpp"
#include "glossrank/text.hpp"

namespace glossrank {

namespace {

constexpr std::string_view kStoreMagic = "#glossrank-store";

struct StoreHeader {
  std::size_t dim = 0;
  double logit_scale = 0.0;
};

StoreHeader parse_header(std::string_view line, std::string_view source_name) {
  const auto bad = [&](const std::string& why) {
    return Error(ErrorCode::kBadHeader, std::string(source_name) + ": " + why);
  };
  std::vector<std::string_view> tokens;
  for (auto tok : text::split(text::trim(line), ' ')) {
    if (!tok.empty()) tokens.push_back(tok);
  }
  if (tokens.size() != 4 || tokens[0] != kStoreMagic) {
    throw bad("expected '#glossrank-store v1 dim=<d> logit_scale=<s>'");
  }
  if (tokens[1] != "v1") throw bad("unsupported store version '" + std::string(tokens[1]) + "'");

  StoreHeader header;
  bool have_dim = false;
  bool have_scale = false;
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    const auto eq = tokens[i].find('=');
    if (eq == std::string_view::npos) throw bad("malformed field '" + std::string(tokens[i]) + "'");
    const auto name = tokens[i].substr(0, eq);
    const auto value = tokens[i].substr(eq + 1);
    double v = 0.0;
    if (!text::parse_double(value, v)) throw bad("non-numeric " + std::string(name));
    if (name == "dim") {
      if (!(v >= 1.0 && v == std::floor(v) && v < 1e8)) throw bad("dim must be a positive integer");
      header.dim = static_cast<std::size_t>(v);
      have_dim = true;
    } else if (name == "logit_scale") {
      if (!(std::isfinite(v) && v > 0.0)) throw bad("logit_scale must be positive");
      header.logit_scale = v;
      have_scale = true;
    } else {
      throw bad("unknown header field '" + std::string(name) + "'");
    }
  }
  if (!have_dim || !have_scale) throw bad("header needs dim and logit_scale");
  return header;
}

}  // namespace

EmbeddingStore::EmbeddingStore(std::size_t dim, double logit_scale) : dim_(dim), logit_scale_(logit_scale) {
  if (dim_ == 0) throw Error(ErrorCode::kBadHeader, "store dim must be positive");
  if (!(std::isfinite(logit_scale_) && logit_scale_ > 0.0)) {
    throw Error(ErrorCode::kBadHeader, "store logit_scale must be positive");
  }
}

void EmbeddingStore::add(Representation rep) {
  if (rep.dim() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "key '" + rep.key() + "' has dim " +
                                                   std::to_string(rep.dim()) + ", store dim is " +
                                                   std::to_string(dim_));
  }
  auto& index = rep.kind() == RepKind::kText ? text_index_ : image_index_;
  if (index.contains(rep.key())) {
    throw Error(ErrorCode::kBadHeader,
                "duplicate " + std::string(to_string(rep.kind())) + " key '" + rep.key() + "'");
  }
  index.emplace(rep.key(), records_.size());
  records_.push_back(std::move(rep));
}

const Representation& EmbeddingStore::get_text(const std::string& key) const {
  const auto it = text_index_.find(key);
  if (it == text_index_.end()) throw Error(ErrorCode::kMissingKey, "text key '" + key + "'");
  return records_[it->second];
}

const Representation& EmbeddingStore::get_image(const std::string& key) const {
  const auto it = image_index_.find(key);
  if (it == image_index_.end()) throw Error(ErrorCode::kMissingKey, "image key '" + key + "'");
  return records_[it->second];
}

EmbeddingStore EmbeddingStore::parse(std::istream& in, std::string_view source_name) {
  std::string raw;
  if (!std::getline(in, raw)) throw Error(ErrorCode::kBadHeader, std::string(source_name) + ": empty file");
  const StoreHeader header = parse_header(text::chomp(raw), source_name);
  EmbeddingStore store(header.dim, header.logit_scale);

  std::size_t line_no = 1;
  std::vector<double> values;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = text::chomp(raw);
    if (text::trim(line).empty() || line.front() == '#') continue;
    const auto where = [&] { return std::string(source_name) + ":" + std::to_string(line_no); };

    const auto fields = text::split(line, '\t');
    if (fields.size() != 3 || (fields[0] != "T" && fields[0] != "I") || fields[1].empty()) {
      throw Error(ErrorCode::kMalformedRecord, where() + ": expected '<T|I>\\t<key>\\t<values>'");
    }
    const RepKind kind = fields[0] == "T" ? RepKind::kText : RepKind::kImage;
    std::string key(fields[1]);

    values.clear();
    for (auto tok : text::split(fields[2], ' ')) {
      if (tok.empty()) continue;
      double v = 0.0;
      if (!text::parse_double(tok, v) || !std::isfinite(v)) {
        throw Error(ErrorCode::kMalformedRecord, where() + ": bad value '" + std::string(tok) + "'");
      }
      values.push_back(v);
    }
    if (values.size() != header.dim) {
      throw Error(ErrorCode::kDimensionMismatch, where() + ": key '" + key + "' has " +
                                                     std::to_string(values.size()) + " values, dim is " +
                                                     std::to_string(header.dim));
    }
    const double norm = l2_norm(values);
    if (!(std::abs(norm - 1.0) <= kLoadNormTolerance)) {
      throw Error(ErrorCode::kNormOutOfTolerance,
                  where() + ": key '" + key + "' has norm " + text::format_double(norm));
    }
    if (std::abs(norm - 1.0) > Representation::kNormTolerance) {
      for (double& v : values) v /= norm;
    }
    store.add(Representation(std::move(key), kind, values));
  }
  return store;
}

EmbeddingStore EmbeddingStore::open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIOError, "cannot open store " + path.string());
  return parse(in, path.string());
}

void EmbeddingStore::write(std::ostream& out) const {
  out << kStoreMagic << " v1 dim=" << dim_ << " logit_scale=" << text::format_double(logit_scale_) << '\n';
  for (const Representation& rep : records_) {
    out << (rep.kind() == RepKind::kText ? 'T' : 'I') << '\t' << rep.key() << '\t';
    bool first = true;
    for (double v : rep.vec()) {
      if (!first) out << ' ';
      out << text::format_double(v);
      first = false;
    }
    out << '\n';
  }
}

void EmbeddingStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIOError, "cannot write store " + path.string());
  write(out);
  if (!out) throw Error(ErrorCode::kIOError, "write failed for " + path.string());
}

}  // namespace glossrank
