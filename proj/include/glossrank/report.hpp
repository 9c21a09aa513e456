#pragma once
// Evaluation report document (report_version 1).
//
// JSON layout:
//   {
//     "report_version": 1,
//     "system":     <system>,
//     "reference":  <system>        (only with a comparison)
//     "comparison": {
//        "delta_hits_at_1", "delta_mrr",
//        "ttest": {"t_stat", "df", "p_value", "zero_variance"},
//        "buckets": [{"bucket", "n", "corrected", "incorrected",
//                     "corrected_ratio" (number | "inf" | null),
//                     "ttest" (object | null)}]
//     }
//   }
//   <system> = {"label", "definition_mode", "scoring", "c2d_scale", "d2i_scale",
//               "n", "hits_at_1", "mrr", "fallback_count",
//               "per_class": [{"label", "n", "hits_at_1", "mrr"}],
//               "instances": [{"id", "target", "gold_rank", "correct",
//                              "num_definitions", "kb_senses" (int | null),
//                              "scoring", "fallback", "prediction"}]}
//
// A non-finite t statistic is written as the string "inf" or "-inf".

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "glossrank/eval.hpp"

namespace glossrank {

struct EvalReport {
  std::string label;
  std::string definition_mode;
  std::string scoring;
  double c2d_scale = 1.0;
  double d2i_scale = 1.0;
  std::size_t n = 0;
  double hits_at_1 = 0.0;
  double mrr = 0.0;
  std::size_t fallback_count = 0;
  std::vector<MetricSlice> per_class;
  std::vector<InstanceRecord> instances;

  bool operator==(const EvalReport&) const = default;
};

/// Fills n, metrics, fallback count and per-class slices from the records.
/// Throws Error(kEmptyResults) for an empty record list.
void finalize(EvalReport& report);

struct ComparisonSection {
  double delta_hits_at_1 = 0.0;
  double delta_mrr = 0.0;
  TTestResult ttest;
  std::vector<PairedComparison> buckets;

  bool operator==(const ComparisonSection&) const = default;
};

/// Δ and the paired t-test are system − reference.
ComparisonSection compare(const EvalReport& reference, const EvalReport& system);

struct ReportDocument {
  static constexpr int kVersion = 1;
  int report_version = kVersion;
  EvalReport system;
  std::optional<EvalReport> reference;
  std::optional<ComparisonSection> comparison;

  bool operator==(const ReportDocument&) const = default;
};

enum class ReportFormat { kJson, kText };

std::string to_json_string(const ReportDocument& doc);
ReportDocument report_from_json_string(const std::string& s);

/// Aligned plain-text summary (metrics at 2 decimals).
std::string render_summary(const ReportDocument& doc);

/// Throws Error(kEmptyResults) for a report with no instances, Error(kIOError).
void emit_report(const ReportDocument& doc, const std::filesystem::path& path, ReportFormat format);
ReportDocument load_report(const std::filesystem::path& path);

}  // namespace glossrank
