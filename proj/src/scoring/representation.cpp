#include "glossrank/representation.hpp"

#include <cmath>

#include "glossrank/error.hpp"
#include "glossrank/kernels.hpp"
#include "glossrank/text.hpp"

namespace glossrank {

std::string_view to_string(RepKind kind) noexcept { return kind == RepKind::kText ? "text" : "image"; }

double l2_norm(std::span<const double> v) noexcept { return std::sqrt(kernels::sum_squares(v)); }

Representation::Representation(std::string key, RepKind kind, std::vector<double> vec)
    : key_(std::move(key)), kind_(kind), vec_(std::move(vec)) {
  if (vec_.empty()) throw Error(ErrorCode::kEmptyInput, "empty vector for key '" + key_ + "'");
  const double norm = l2_norm(vec_);
  if (!(std::abs(norm - 1.0) <= kNormTolerance)) {
    throw Error(ErrorCode::kNormOutOfTolerance, std::string(to_string(kind_)) + " key '" + key_ +
                                                    "' has norm " + text::format_double(norm));
  }
}

}  // namespace glossrank
