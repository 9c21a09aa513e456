#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "glossrank/scoring.hpp"
#include "glossrank/sense_inventory.hpp"

namespace glossrank {

struct VwsdInstance {
  std::string id;
  std::string target;
  std::optional<PartOfSpeech> pos;
  std::string context;
  std::vector<std::string> candidates;
  std::optional<std::string> gold;

  /// Throws Error(kMalformedLine) / Error(kGoldNotAmongCandidates).
  void validate() const;
};

/// Dataset TSV: id, target, context, then one or more candidate image keys.
/// The optional gold file carries one image key per dataset line.
std::vector<VwsdInstance> load_dataset(const std::filesystem::path& data_path,
                                       const std::optional<std::filesystem::path>& gold_path = std::nullopt);
std::vector<VwsdInstance> parse_dataset(std::istream& data, std::istream* gold,
                                        std::string_view source_name = "<stream>");

/// Inverse of parse_dataset. Instances without gold are written as blank gold lines.
void write_dataset(std::ostream& data, std::ostream* gold, std::span<const VwsdInstance> instances);

/// Percentage of results whose gold is ranked first. Throws Error(kMissingGold)
/// if any result has no gold_rank, Error(kEmptyResults) for no results.
double hits_at_1(std::span<const RankResult> results);
double hits_at_1_from_ranks(std::span<const int> gold_ranks);

/// 100 * mean(1 / gold_rank).
double mrr(std::span<const RankResult> results);
double mrr_from_ranks(std::span<const int> gold_ranks);

/// Two-sided paired Student t-test on per-instance differences a - b.
struct TTestResult {
  double t_stat = 0.0;
  int df = 0;
  double p_value = 1.0;
  /// All differences equal. With a zero mean this is "no difference"
  /// (t = 0, p = 1); otherwise t = +-inf, p = 0.
  bool zero_variance = false;

  bool operator==(const TTestResult&) const = default;
};

/// Throws Error(kLengthMismatch) for unequal lengths or n < 2.
TTestResult paired_t_test(std::span<const int> a, std::span<const int> b);

/// Two-sided tail probability of Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, int df);

/// Per-instance outcome of one system on one dataset.
struct InstanceRecord {
  std::string id;
  std::string target;
  int gold_rank = 0;
  bool correct = false;
  std::size_t num_definitions = 0;        // |D^t| actually used for ranking
  std::optional<std::size_t> kb_senses;   // inventory sense count, when an inventory is loaded
  std::string scoring;                    // baseline | marginal | pipeline, as applied
  bool fallback = false;                  // no definitions -> baseline
  std::string prediction;

  bool operator==(const InstanceRecord&) const = default;
};

struct MetricSlice {
  std::string label;
  std::size_t n = 0;
  double hits_at_1 = 0.0;
  double mrr = 0.0;

  bool operator==(const MetricSlice&) const = default;
};

/// Empty records produce an n = 0 slice with zero metrics.
MetricSlice slice_metrics(std::string label, std::span<const InstanceRecord> records);

/// Slices for oov (|D|=0), trivial (|D|=1) and ambiguous (|D|>1) by kb_senses.
/// Unpopulated classes are omitted; records without kb_senses are skipped.
std::vector<MetricSlice> ambiguity_breakdown(std::span<const InstanceRecord> records);

/// Same partition computed from rank results joined to their instances.
std::vector<MetricSlice> ambiguity_breakdown(std::span<const VwsdInstance> instances,
                                             std::span<const RankResult> results,
                                             const SenseInventory& inventory);

struct PairedComparison {
  std::string bucket;  // "2".."10", ">10", "total"
  std::size_t n = 0;
  std::size_t corrected = 0;    // base wrong, new right
  std::size_t incorrected = 0;  // base right, new wrong
  /// corrected / incorrected; +inf if only corrections; nullopt for 0/0.
  std::optional<double> corrected_ratio;
  std::optional<TTestResult> ttest;  // nullopt when the bucket has < 2 instances

  bool operator==(const PairedComparison&) const = default;
};

/// Two decimals, "inf" for corrections only, "n/a" for 0/0.
std::string format_ratio(const std::optional<double>& ratio);
double round2(double v);

/// Flip counts per |D| bucket (2..10, >10) over ambiguous instances plus a
/// total row. Records are matched by id; kb_senses comes from new_records.
/// Throws Error(kInstanceSetMismatch).
std::vector<PairedComparison> corrected_ratio(std::span<const InstanceRecord> base_records,
                                              std::span<const InstanceRecord> new_records);

PairedComparison compare_counts(std::string bucket, std::size_t corrected, std::size_t incorrected);

}  // namespace glossrank
