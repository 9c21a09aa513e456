#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <unordered_map>

#include "glossrank/error.hpp"
#include "glossrank/eval.hpp"

namespace glossrank {

MetricSlice slice_metrics(std::string label, std::span<const InstanceRecord> records) {
  MetricSlice s{std::move(label), records.size(), 0.0, 0.0};
  if (records.empty()) return s;
  std::vector<int> ranks;
  ranks.reserve(records.size());
  for (const auto& r : records) ranks.push_back(r.gold_rank);
  s.hits_at_1 = hits_at_1_from_ranks(ranks);
  s.mrr = mrr_from_ranks(ranks);
  return s;
}

std::vector<MetricSlice> ambiguity_breakdown(std::span<const InstanceRecord> records) {
  std::map<AmbiguityLevel, std::vector<InstanceRecord>> groups;
  for (const auto& r : records) {
    if (r.kb_senses) groups[classify_count(*r.kb_senses).level].push_back(r);
  }
  std::vector<MetricSlice> out;
  for (const auto& [level, group] : groups) out.push_back(slice_metrics(std::string(to_string(level)), group));
  return out;
}

std::vector<MetricSlice> ambiguity_breakdown(std::span<const VwsdInstance> instances,
                                             std::span<const RankResult> results,
                                             const SenseInventory& inventory) {
  std::unordered_map<std::string, const VwsdInstance*> by_id;
  for (const auto& inst : instances) by_id.emplace(inst.id, &inst);
  std::vector<InstanceRecord> records;
  records.reserve(results.size());
  for (const auto& r : results) {
    const auto it = by_id.find(r.instance_id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kInstanceSetMismatch, "result '" + r.instance_id + "' has no instance");
    }
    if (!r.gold_rank) throw Error(ErrorCode::kMissingGold, "result '" + r.instance_id + "' has no gold rank");
    InstanceRecord rec;
    rec.id = r.instance_id;
    rec.target = it->second->target;
    rec.gold_rank = *r.gold_rank;
    rec.correct = *r.gold_rank == 1;
    rec.kb_senses = inventory.count(it->second->target);
    records.push_back(std::move(rec));
  }
  return ambiguity_breakdown(records);
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

std::string format_ratio(const std::optional<double>& ratio) {
  if (!ratio) return "n/a";
  if (std::isinf(*ratio)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *ratio);
  return buf;
}

PairedComparison compare_counts(std::string bucket, std::size_t corrected, std::size_t incorrected) {
  PairedComparison pc;
  pc.bucket = std::move(bucket);
  pc.corrected = corrected;
  pc.incorrected = incorrected;
  if (incorrected > 0) {
    pc.corrected_ratio = static_cast<double>(corrected) / static_cast<double>(incorrected);
  } else if (corrected > 0) {
    pc.corrected_ratio = std::numeric_limits<double>::infinity();
  }
  return pc;
}

std::vector<PairedComparison> corrected_ratio(std::span<const InstanceRecord> base_records,
                                              std::span<const InstanceRecord> new_records) {
  if (base_records.size() != new_records.size()) {
    throw Error(ErrorCode::kInstanceSetMismatch, std::to_string(base_records.size()) + " vs " +
                                                     std::to_string(new_records.size()) + " instances");
  }
  std::unordered_map<std::string, const InstanceRecord*> base_by_id;
  for (const auto& r : base_records) base_by_id.emplace(r.id, &r);

  constexpr std::size_t kBuckets = 11;  // 2..10, >10, total
  struct Acc {
    std::size_t corrected = 0, incorrected = 0;
    std::vector<int> base_correct, new_correct;
  };
  std::vector<Acc> acc(kBuckets);

  for (const auto& nr : new_records) {
    const auto it = base_by_id.find(nr.id);
    if (it == base_by_id.end()) {
      throw Error(ErrorCode::kInstanceSetMismatch, "instance '" + nr.id + "' missing from the base system");
    }
    const InstanceRecord& br = *it->second;
    const auto senses = nr.kb_senses ? nr.kb_senses : br.kb_senses;
    if (!senses || *senses < 2) continue;
    const std::size_t bucket = *senses <= 10 ? *senses - 2 : 9;
    for (std::size_t b : {bucket, kBuckets - 1}) {
      Acc& a = acc[b];
      a.corrected += (!br.correct && nr.correct) ? 1 : 0;
      a.incorrected += (br.correct && !nr.correct) ? 1 : 0;
      a.base_correct.push_back(br.correct ? 1 : 0);
      a.new_correct.push_back(nr.correct ? 1 : 0);
    }
  }

  std::vector<PairedComparison> out;
  out.reserve(kBuckets);
  for (std::size_t b = 0; b < kBuckets; ++b) {
    std::string label = b < 9 ? std::to_string(b + 2) : (b == 9 ? ">10" : "total");
    PairedComparison pc = compare_counts(std::move(label), acc[b].corrected, acc[b].incorrected);
    pc.n = acc[b].new_correct.size();
    if (pc.n >= 2) pc.ttest = paired_t_test(acc[b].new_correct, acc[b].base_correct);
    out.push_back(std::move(pc));
  }
  return out;
}

}  // namespace glossrank
