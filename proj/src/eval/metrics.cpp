#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "glossrank/error.hpp"
#include "glossrank/eval.hpp"

namespace glossrank {

namespace {

std::vector<int> gold_ranks(std::span<const RankResult> results) {
  std::vector<int> ranks;
  ranks.reserve(results.size());
  for (const RankResult& r : results) {
    if (!r.gold_rank) throw Error(ErrorCode::kMissingGold, "result '" + r.instance_id + "' has no gold rank");
    ranks.push_back(*r.gold_rank);
  }
  return ranks;
}

void check_ranks(std::span<const int> ranks) {
  if (ranks.empty()) throw Error(ErrorCode::kEmptyResults, "no results to score");
  for (int r : ranks) {
    if (r < 1) throw Error(ErrorCode::kMissingGold, "gold rank must be >= 1");
  }
}

}  // namespace

double hits_at_1_from_ranks(std::span<const int> ranks) {
  check_ranks(ranks);
  std::size_t hits = 0;
  for (int r : ranks) hits += r == 1 ? 1 : 0;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double mrr_from_ranks(std::span<const int> ranks) {
  check_ranks(ranks);
  double total = 0.0;
  for (int r : ranks) total += 1.0 / r;
  return 100.0 * total / static_cast<double>(ranks.size());
}

double hits_at_1(std::span<const RankResult> results) { return hits_at_1_from_ranks(gold_ranks(results)); }

double mrr(std::span<const RankResult> results) { return mrr_from_ranks(gold_ranks(results)); }

double student_t_two_sided_p(double t, int df) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  const boost::math::students_t dist(static_cast<double>(df));
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

TTestResult paired_t_test(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " observations");
  }
  const std::size_t n = a.size();
  if (n < 2) throw Error(ErrorCode::kLengthMismatch, "paired t-test needs at least 2 pairs");

  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  bool all_equal = true;
  const int first = a[0] - b[0];
  for (std::size_t i = 0; i < n; ++i) {
    const int d = a[i] - b[i];
    all_equal = all_equal && d == first;
    ss += (d - mean) * (d - mean);
  }

  TTestResult res;
  res.df = static_cast<int>(n) - 1;
  if (all_equal) {
    res.zero_variance = true;
    if (first == 0) {
      res.t_stat = 0.0;
      res.p_value = 1.0;
    } else {
      res.t_stat = first > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      res.p_value = 0.0;
    }
    return res;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  res.t_stat = mean / (sd / std::sqrt(static_cast<double>(n)));
  res.p_value = student_t_two_sided_p(res.t_stat, res.df);
  return res;
}

}  // namespace glossrank
