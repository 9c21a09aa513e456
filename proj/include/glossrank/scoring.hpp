#pragma once
// Probability math for ranking candidate images.
//
// The no-gloss pathway scores each candidate image against the context and
// takes a softmax. The gloss pathway introduces the target's sense
// definitions as a latent variable:
//
//   P(v | c, t) = sum_i P(v | D_i, c, t) * P(D_i | c, t)
//
// where P(D_i | c, t) (C2D) is a softmax over <joint_i, context> and
// P(v | D_i, c, t) (D2I) is a softmax over <image_v, joint_i>, joint_i being
// the representation of "{context} : {definition_i}". Pipeline mode replaces
// the sum with the single row of the argmax definition.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "glossrank/representation.hpp"

namespace glossrank {

enum class ScoringMode { kBaseline, kMarginal, kPipeline };

std::string_view to_string(ScoringMode mode) noexcept;
std::optional<ScoringMode> parse_scoring_mode(std::string_view s) noexcept;

struct ScoreConfig {
  double c2d_scale = 1.0;
  double d2i_scale = 1.0;
  ScoringMode mode = ScoringMode::kMarginal;

  /// Throws Error(kInvalidConfig) for a non-positive or non-finite scale.
  void validate() const;
};

/// Non-negative probabilities over an ordered support, summing to 1.
class Distribution {
 public:
  static constexpr double kSumTolerance = 1e-9;

  /// Validates on construction; throws Error(kInvalidDistribution).
  Distribution(std::vector<double> probs, std::vector<std::string> support);

  /// Support labels "0", "1", ... (used for distributions over definitions).
  static Distribution over_indices(std::vector<double> probs);

  std::span<const double> probs() const noexcept { return probs_; }
  const std::vector<std::string>& support() const noexcept { return support_; }
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const noexcept { return probs_[i]; }

  /// Index of the largest probability; ties go to the lowest index.
  std::size_t argmax() const noexcept;

  bool operator==(const Distribution&) const = default;

 private:
  std::vector<double> probs_;
  std::vector<std::string> support_;
};

std::vector<std::string> index_labels(std::size_t n);

/// probs[i] = exp(scale*(s[i]-max s)) / sum_j exp(scale*(s[j]-max s)).
/// Throws Error(kEmptyInput) / Error(kNonFiniteInput) / Error(kInvalidConfig).
/// An empty support gets index labels.
Distribution softmax(std::span<const double> scores, double scale,
                     std::vector<std::string> support = {});

/// "{context} : {definition}", both passed through verbatim.
std::string build_joint_text(std::string_view context, std::string_view definition);

/// C2D over definitions from the context against each joint-text vector.
Distribution c2d(const Representation& context, std::span<const Representation> joint_reps,
                 const ScoreConfig& cfg);

/// D2I over candidates from one joint-text vector; support = image keys.
Distribution d2i(const Representation& joint, std::span<const Representation> images,
                 const ScoreConfig& cfg);

/// D2I from precomputed (cross-encoder) matching scores.
Distribution d2i_from_scores(std::span<const double> scores, std::vector<std::string> image_keys,
                             const ScoreConfig& cfg);

/// No-gloss posterior: softmax over <image, context> at d2i_scale.
Distribution baseline_posterior(const Representation& context,
                                std::span<const Representation> images, const ScoreConfig& cfg);

/// posterior[v] = sum_i rows[i][v] * c2d[i].
/// Throws Error(kShapeMismatch) / Error(kSupportMismatch).
Distribution marginal_posterior(const Distribution& c2d, std::span<const Distribution> rows);

/// rows[argmax c2d], lowest index on ties.
Distribution pipeline_posterior(const Distribution& c2d, std::span<const Distribution> rows);

struct RankResult {
  std::string instance_id;
  Distribution posterior;
  std::vector<std::size_t> ranking;  // indices into posterior.support(), best first
  std::string prediction;
  std::optional<Distribution> c2d;
  std::optional<int> gold_rank;  // 1-based

  std::vector<std::string> ranked_candidates() const;
};

/// Stable descending sort of the posterior (ties keep candidate order).
/// Throws Error(kGoldNotInSupport) if gold is given but absent.
RankResult rank(const Distribution& posterior, std::optional<std::string_view> gold = std::nullopt,
                std::string instance_id = {});

}  // namespace glossrank
