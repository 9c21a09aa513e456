#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace glossrank {

enum class RepKind { kText, kImage };

std::string_view to_string(RepKind kind) noexcept;

/// Unit-norm encoder output for one text key or image id.
class Representation {
 public:
  static constexpr double kNormTolerance = 1e-6;

  /// Throws Error(kNormOutOfTolerance) unless ||vec|| = 1 +- kNormTolerance,
  /// Error(kEmptyInput) for a zero-length vector.
  Representation(std::string key, RepKind kind, std::vector<double> vec);

  const std::string& key() const noexcept { return key_; }
  RepKind kind() const noexcept { return kind_; }
  std::span<const double> vec() const noexcept { return vec_; }
  std::size_t dim() const noexcept { return vec_.size(); }

  bool operator==(const Representation&) const = default;

 private:
  std::string key_;
  RepKind kind_;
  std::vector<double> vec_;
};

/// L2 norm through the active kernel table.
double l2_norm(std::span<const double> v) noexcept;

}  // namespace glossrank
