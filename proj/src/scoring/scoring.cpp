#include "glossrank/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "glossrank/error.hpp"
#include "glossrank/kernels.hpp"
#include "glossrank/text.hpp"

namespace glossrank {

std::string_view to_string(ScoringMode mode) noexcept {
  switch (mode) {
    case ScoringMode::kBaseline: return "baseline";
    case ScoringMode::kMarginal: return "marginal";
    case ScoringMode::kPipeline: return "pipeline";
  }
  return "unknown";
}

std::optional<ScoringMode> parse_scoring_mode(std::string_view s) noexcept {
  if (s == "baseline") return ScoringMode::kBaseline;
  if (s == "marginal") return ScoringMode::kMarginal;
  if (s == "pipeline") return ScoringMode::kPipeline;
  return std::nullopt;
}

namespace {

void check_scale(double scale, std::string_view what) {
  if (!(std::isfinite(scale) && scale > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string(what) + " must be a positive finite number, got " + text::format_double(scale));
  }
}

void check_dims(const Representation& anchor, std::span<const Representation> others) {
  for (const Representation& r : others) {
    if (r.dim() != anchor.dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "'" + r.key() + "' has dim " + std::to_string(r.dim()) +
                                                     ", '" + anchor.key() + "' has dim " +
                                                     std::to_string(anchor.dim()));
    }
  }
}

std::vector<double> dots(const Representation& anchor, std::span<const Representation> others) {
  std::vector<double> out;
  out.reserve(others.size());
  for (const Representation& r : others) out.push_back(kernels::dot(anchor.vec(), r.vec()));
  return out;
}

std::vector<std::string> keys_of(std::span<const Representation> reps) {
  std::vector<std::string> out;
  out.reserve(reps.size());
  for (const Representation& r : reps) out.push_back(r.key());
  return out;
}

}  // namespace

void ScoreConfig::validate() const {
  check_scale(c2d_scale, "c2d scale");
  check_scale(d2i_scale, "d2i scale");
}

Distribution::Distribution(std::vector<double> probs, std::vector<std::string> support)
    : probs_(std::move(probs)), support_(std::move(support)) {
  if (probs_.empty()) throw Error(ErrorCode::kInvalidDistribution, "empty distribution");
  if (probs_.size() != support_.size()) {
    throw Error(ErrorCode::kInvalidDistribution, "support has " + std::to_string(support_.size()) +
                                                     " labels for " + std::to_string(probs_.size()) +
                                                     " probabilities");
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(std::isfinite(p) && p >= 0.0)) {
      throw Error(ErrorCode::kInvalidDistribution, "probability " + text::format_double(p));
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw Error(ErrorCode::kInvalidDistribution, "probabilities sum to " + text::format_double(total));
  }
}

Distribution Distribution::over_indices(std::vector<double> probs) {
  auto labels = index_labels(probs.size());
  return Distribution(std::move(probs), std::move(labels));
}

std::size_t Distribution::argmax() const noexcept {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs_.size(); ++i) {
    if (probs_[i] > probs_[best]) best = i;
  }
  return best;
}

std::vector<std::string> index_labels(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

Distribution softmax(std::span<const double> scores, double scale, std::vector<std::string> support) {
  if (scores.empty()) throw Error(ErrorCode::kEmptyInput, "softmax of an empty score vector");
  for (double s : scores) {
    if (!std::isfinite(s)) throw Error(ErrorCode::kNonFiniteInput, "score " + text::format_double(s));
  }
  check_scale(scale, "softmax scale");

  const double top = kernels::max(scores);
  std::vector<double> probs(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) probs[i] = std::exp(scale * (scores[i] - top));
  // The max element contributes exp(0) = 1, so the sum is >= 1.
  kernels::scale(1.0 / kernels::sum(probs), probs);

  if (support.empty()) support = index_labels(scores.size());
  return Distribution(std::move(probs), std::move(support));
}

std::string build_joint_text(std::string_view context, std::string_view definition) {
  if (text::trim(context).empty()) throw Error(ErrorCode::kEmptyField, "joint text needs a context");
  if (text::trim(definition).empty()) throw Error(ErrorCode::kEmptyField, "joint text needs a definition");
  std::string out;
  out.reserve(context.size() + definition.size() + 3);
  out.append(context).append(" : ").append(definition);
  return out;
}

Distribution c2d(const Representation& context, std::span<const Representation> joint_reps,
                 const ScoreConfig& cfg) {
  if (joint_reps.empty()) throw Error(ErrorCode::kEmptyDefinitions, "c2d needs at least one definition");
  check_dims(context, joint_reps);
  const auto scores = dots(context, joint_reps);
  return softmax(scores, cfg.c2d_scale);
}

Distribution d2i(const Representation& joint, std::span<const Representation> images,
                 const ScoreConfig& cfg) {
  if (images.empty()) throw Error(ErrorCode::kEmptyCandidates, "d2i needs at least one candidate");
  check_dims(joint, images);
  const auto scores = dots(joint, images);
  return softmax(scores, cfg.d2i_scale, keys_of(images));
}

Distribution d2i_from_scores(std::span<const double> scores, std::vector<std::string> image_keys,
                             const ScoreConfig& cfg) {
  if (scores.empty()) throw Error(ErrorCode::kEmptyCandidates, "d2i needs at least one candidate");
  if (scores.size() != image_keys.size()) {
    throw Error(ErrorCode::kShapeMismatch, "score/candidate count mismatch");
  }
  return softmax(scores, cfg.d2i_scale, std::move(image_keys));
}

Distribution baseline_posterior(const Representation& context, std::span<const Representation> images,
                                const ScoreConfig& cfg) {
  return d2i(context, images, cfg);
}

namespace {

void check_rows(const Distribution& c2d, std::span<const Distribution> rows) {
  if (rows.size() != c2d.size()) {
    throw Error(ErrorCode::kShapeMismatch, std::to_string(rows.size()) + " D2I rows for " +
                                               std::to_string(c2d.size()) + " definitions");
  }
  for (const Distribution& row : rows) {
    if (row.support() != rows.front().support()) {
      throw Error(ErrorCode::kSupportMismatch, "D2I rows disagree on the candidate list");
    }
  }
}

}  // namespace

Distribution marginal_posterior(const Distribution& c2d, std::span<const Distribution> rows) {
  check_rows(c2d, rows);
  // Identical rows: the mixture is the row itself.
  if (std::all_of(rows.begin() + 1, rows.end(), [&](const Distribution& r) { return r == rows.front(); })) {
    return rows.front();
  }
  const std::size_t n = rows.front().size();
  std::vector<double> posterior(n, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) kernels::axpy(c2d[i], rows[i].probs(), posterior);
  return Distribution(std::move(posterior), rows.front().support());
}

Distribution pipeline_posterior(const Distribution& c2d, std::span<const Distribution> rows) {
  check_rows(c2d, rows);
  return rows[c2d.argmax()];
}

std::vector<std::string> RankResult::ranked_candidates() const {
  std::vector<std::string> out;
  out.reserve(ranking.size());
  for (std::size_t idx : ranking) out.push_back(posterior.support()[idx]);
  return out;
}

RankResult rank(const Distribution& posterior, std::optional<std::string_view> gold,
                std::string instance_id) {
  std::vector<std::size_t> order(posterior.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return posterior[a] > posterior[b]; });

  std::optional<int> gold_rank;
  if (gold) {
    const auto& support = posterior.support();
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      if (support[order[pos]] == *gold) {
        gold_rank = static_cast<int>(pos + 1);
        break;
      }
    }
    if (!gold_rank) {
      throw Error(ErrorCode::kGoldNotInSupport, "gold '" + std::string(*gold) + "' is not a candidate");
    }
  }
  std::string prediction = posterior.support()[order.front()];
  return RankResult{std::move(instance_id), posterior, std::move(order), std::move(prediction),
                    std::nullopt, gold_rank};
}

}  // namespace glossrank
