#pragma once
// Sources of representations and matching scores.
//
// Embedding store file (UTF-8, line oriented):
//   #glossrank-store v1 dim=<d> logit_scale=<s>
//   <T|I>\t<key>\t<v1> <v2> ... <vd>
// Pair-score file:
//   #glossrank-pairs v1
//   <text_key>\t<image_key>\t<score>

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "glossrank/representation.hpp"

namespace glossrank {

class EmbeddingStore {
 public:
  /// Vectors further than this from unit norm are rejected on load; closer
  /// ones are renormalized (or kept verbatim within Representation::kNormTolerance).
  static constexpr double kLoadNormTolerance = 1e-4;

  EmbeddingStore(std::size_t dim, double logit_scale);

  static EmbeddingStore open(const std::filesystem::path& path);
  static EmbeddingStore parse(std::istream& in, std::string_view source_name = "<stream>");

  /// Writes header and records in insertion order with shortest round-trip decimals.
  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;

  /// Throws Error(kDimensionMismatch) on a wrong dim and Error(kBadHeader) on
  /// a duplicate (kind, key).
  void add(Representation rep);

  std::size_t dim() const noexcept { return dim_; }
  double logit_scale() const noexcept { return logit_scale_; }
  std::size_t text_count() const noexcept { return text_index_.size(); }
  std::size_t image_count() const noexcept { return image_index_.size(); }

  bool has_text(const std::string& key) const { return text_index_.contains(key); }
  bool has_image(const std::string& key) const { return image_index_.contains(key); }

  /// Throws Error(kMissingKey) naming the key and kind.
  const Representation& get_text(const std::string& key) const;
  const Representation& get_image(const std::string& key) const;

  const std::vector<Representation>& records() const noexcept { return records_; }

 private:
  std::size_t dim_;
  double logit_scale_;
  std::vector<Representation> records_;
  std::unordered_map<std::string, std::size_t> text_index_;
  std::unordered_map<std::string, std::size_t> image_index_;
};

/// Cross-encoder matching scores keyed by (text key, image key).
class PairScoreTable {
 public:
  static PairScoreTable open(const std::filesystem::path& path);
  static PairScoreTable parse(std::istream& in, std::string_view source_name = "<stream>");
  void write(std::ostream& out) const;

  /// Later duplicates overwrite earlier ones.
  void set(const std::string& text_key, const std::string& image_key, double score);

  bool contains(const std::string& text_key, const std::string& image_key) const;

  /// Throws Error(kMissingPair).
  double pair_score(const std::string& text_key, const std::string& image_key) const;

  std::size_t size() const noexcept { return order_.size(); }

 private:
  static std::string join(const std::string& text_key, const std::string& image_key);

  std::unordered_map<std::string, double> scores_;
  std::vector<std::string> order_;
};

// Platform-independent primitives behind the synthetic encoder.

/// FNV-1a, 64-bit.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept;

using PhiloxCounter = std::array<std::uint64_t, 4>;
using PhiloxKey = std::array<std::uint64_t, 2>;

/// Philox4x64 with 10 rounds (Random123).
PhiloxCounter philox4x64_10(PhiloxCounter ctr, PhiloxKey key) noexcept;

/// Deterministic stand-in for an encoder: the same (seed, kind, input)
/// always yields the same unit vector on every platform.
///
///   h   = FNV-1a-64( seed as 8 little-endian bytes || 'T' or 'I' || 0x1f || input )
///   key = {h, seed}
///   block b = Philox4x64-10(counter {b, 0, 0, 0}, key) gives four 64-bit words
///   u   = ((word >> 11) + 0.5) * 2^-53, so u lies strictly inside (0, 1)
///   consecutive pairs (u1, u2) become normals via Box-Muller:
///     r = sqrt(-2 ln u1); z1 = r cos(2 pi u2); z2 = r sin(2 pi u2)
///   the first dim normals are L2-normalized.
class SyntheticEncoder {
 public:
  SyntheticEncoder(std::uint64_t seed, std::size_t dim);

  /// Throws Error(kEmptyInput) for empty input.
  Representation encode(RepKind kind, std::string_view input) const;

  /// The unnormalized standard-normal draws for (kind, input).
  std::vector<double> normals(RepKind kind, std::string_view input) const;

  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t dim() const noexcept { return dim_; }

 private:
  std::uint64_t seed_;
  std::size_t dim_;
};

/// Uniform view of "give me the vector for this key" used by the engine.
class RepresentationProvider {
 public:
  virtual ~RepresentationProvider() = default;
  virtual std::size_t dim() const = 0;
  virtual bool has_text(const std::string& key) const = 0;
  virtual bool has_image(const std::string& key) const = 0;
  virtual Representation text(const std::string& key) const = 0;
  virtual Representation image(const std::string& key) const = 0;
};

class StoreProvider final : public RepresentationProvider {
 public:
  explicit StoreProvider(std::shared_ptr<const EmbeddingStore> store) : store_(std::move(store)) {}
  std::size_t dim() const override { return store_->dim(); }
  bool has_text(const std::string& key) const override { return store_->has_text(key); }
  bool has_image(const std::string& key) const override { return store_->has_image(key); }
  Representation text(const std::string& key) const override { return store_->get_text(key); }
  Representation image(const std::string& key) const override { return store_->get_image(key); }

 private:
  std::shared_ptr<const EmbeddingStore> store_;
};

/// Every key resolves.
class SyntheticProvider final : public RepresentationProvider {
 public:
  explicit SyntheticProvider(SyntheticEncoder encoder) : encoder_(encoder) {}
  std::size_t dim() const override { return encoder_.dim(); }
  bool has_text(const std::string& key) const override { return !key.empty(); }
  bool has_image(const std::string& key) const override { return !key.empty(); }
  Representation text(const std::string& key) const override { return encoder_.encode(RepKind::kText, key); }
  Representation image(const std::string& key) const override {
    return encoder_.encode(RepKind::kImage, key);
  }

 private:
  SyntheticEncoder encoder_;
};

}  // namespace glossrank
