#include "glossrank/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "glossrank/error.hpp"

namespace glossrank {

using nlohmann::json;

void finalize(EvalReport& report) {
  if (report.instances.empty()) throw Error(ErrorCode::kEmptyResults, "report '" + report.label + "' has no instances");
  const MetricSlice all = slice_metrics("all", report.instances);
  report.n = all.n;
  report.hits_at_1 = all.hits_at_1;
  report.mrr = all.mrr;
  report.fallback_count = 0;
  for (const auto& r : report.instances) report.fallback_count += r.fallback ? 1 : 0;
  report.per_class = ambiguity_breakdown(report.instances);
}

ComparisonSection compare(const EvalReport& reference, const EvalReport& system) {
  if (reference.instances.size() != system.instances.size()) {
    throw Error(ErrorCode::kInstanceSetMismatch, "compared systems ran on different instance sets");
  }
  std::unordered_map<std::string, const InstanceRecord*> ref_by_id;
  for (const auto& r : reference.instances) ref_by_id.emplace(r.id, &r);
  std::vector<int> sys_correct, ref_correct;
  for (const auto& r : system.instances) {
    const auto it = ref_by_id.find(r.id);
    if (it == ref_by_id.end()) throw Error(ErrorCode::kInstanceSetMismatch, "instance '" + r.id + "' missing");
    sys_correct.push_back(r.correct ? 1 : 0);
    ref_correct.push_back(it->second->correct ? 1 : 0);
  }
  ComparisonSection c;
  c.delta_hits_at_1 = system.hits_at_1 - reference.hits_at_1;
  c.delta_mrr = system.mrr - reference.mrr;
  c.ttest = paired_t_test(sys_correct, ref_correct);
  c.buckets = corrected_ratio(reference.instances, system.instances);
  return c;
}

namespace {

json real_or_string(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

double real_from(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j.get<double>();
}

json ttest_json(const TTestResult& t) {
  return {{"t_stat", real_or_string(t.t_stat)},
          {"df", t.df},
          {"p_value", real_or_string(t.p_value)},
          {"zero_variance", t.zero_variance}};
}

TTestResult ttest_from(const json& j) {
  return {real_from(j.at("t_stat")), j.at("df").get<int>(), real_from(j.at("p_value")),
          j.at("zero_variance").get<bool>()};
}

json system_json(const EvalReport& r) {
  json classes = json::array();
  for (const auto& s : r.per_class) {
    classes.push_back({{"label", s.label}, {"n", s.n}, {"hits_at_1", s.hits_at_1}, {"mrr", s.mrr}});
  }
  json instances = json::array();
  for (const auto& i : r.instances) {
    instances.push_back({{"id", i.id},
                         {"target", i.target},
                         {"gold_rank", i.gold_rank},
                         {"correct", i.correct},
                         {"num_definitions", i.num_definitions},
                         {"kb_senses", i.kb_senses ? json(*i.kb_senses) : json(nullptr)},
                         {"scoring", i.scoring},
                         {"fallback", i.fallback},
                         {"prediction", i.prediction}});
  }
  return {{"label", r.label},
          {"definition_mode", r.definition_mode},
          {"scoring", r.scoring},
          {"c2d_scale", r.c2d_scale},
          {"d2i_scale", r.d2i_scale},
          {"n", r.n},
          {"hits_at_1", r.hits_at_1},
          {"mrr", r.mrr},
          {"fallback_count", r.fallback_count},
          {"per_class", classes},
          {"instances", instances}};
}

EvalReport system_from(const json& j) {
  EvalReport r;
  r.label = j.at("label").get<std::string>();
  r.definition_mode = j.at("definition_mode").get<std::string>();
  r.scoring = j.at("scoring").get<std::string>();
  r.c2d_scale = j.at("c2d_scale").get<double>();
  r.d2i_scale = j.at("d2i_scale").get<double>();
  r.n = j.at("n").get<std::size_t>();
  r.hits_at_1 = j.at("hits_at_1").get<double>();
  r.mrr = j.at("mrr").get<double>();
  r.fallback_count = j.at("fallback_count").get<std::size_t>();
  for (const auto& s : j.at("per_class")) {
    r.per_class.push_back({s.at("label").get<std::string>(), s.at("n").get<std::size_t>(),
                           s.at("hits_at_1").get<double>(), s.at("mrr").get<double>()});
  }
  for (const auto& i : j.at("instances")) {
    InstanceRecord rec;
    rec.id = i.at("id").get<std::string>();
    rec.target = i.at("target").get<std::string>();
    rec.gold_rank = i.at("gold_rank").get<int>();
    rec.correct = i.at("correct").get<bool>();
    rec.num_definitions = i.at("num_definitions").get<std::size_t>();
    if (!i.at("kb_senses").is_null()) rec.kb_senses = i.at("kb_senses").get<std::size_t>();
    rec.scoring = i.at("scoring").get<std::string>();
    rec.fallback = i.at("fallback").get<bool>();
    rec.prediction = i.at("prediction").get<std::string>();
    r.instances.push_back(std::move(rec));
  }
  return r;
}

json comparison_json(const ComparisonSection& c) {
  json buckets = json::array();
  for (const auto& b : c.buckets) {
    json ratio = nullptr;
    if (b.corrected_ratio) ratio = real_or_string(*b.corrected_ratio);
    buckets.push_back({{"bucket", b.bucket},
                       {"n", b.n},
                       {"corrected", b.corrected},
                       {"incorrected", b.incorrected},
                       {"corrected_ratio", ratio},
                       {"ttest", b.ttest ? ttest_json(*b.ttest) : json(nullptr)}});
  }
  return {{"delta_hits_at_1", c.delta_hits_at_1},
          {"delta_mrr", c.delta_mrr},
          {"ttest", ttest_json(c.ttest)},
          {"buckets", buckets}};
}

ComparisonSection comparison_from(const json& j) {
  ComparisonSection c;
  c.delta_hits_at_1 = j.at("delta_hits_at_1").get<double>();
  c.delta_mrr = j.at("delta_mrr").get<double>();
  c.ttest = ttest_from(j.at("ttest"));
  for (const auto& b : j.at("buckets")) {
    PairedComparison pc;
    pc.bucket = b.at("bucket").get<std::string>();
    pc.n = b.at("n").get<std::size_t>();
    pc.corrected = b.at("corrected").get<std::size_t>();
    pc.incorrected = b.at("incorrected").get<std::size_t>();
    if (!b.at("corrected_ratio").is_null()) pc.corrected_ratio = real_from(b.at("corrected_ratio"));
    if (!b.at("ttest").is_null()) pc.ttest = ttest_from(b.at("ttest"));
    c.buckets.push_back(std::move(pc));
  }
  return c;
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string signed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.2f", v);
  return buf;
}

std::string pvalue(double p) {
  char buf[32];
  if (p != 0.0 && p < 1e-4) {
    std::snprintf(buf, sizeof buf, "%.3e", p);
  } else {
    std::snprintf(buf, sizeof buf, "%.4f", p);
  }
  return buf;
}

std::string pad(std::string s, std::size_t width, bool right = false) {
  const std::size_t visible = s.size();
  if (visible >= width) return s;
  const std::string fill(width - visible, ' ');
  return right ? fill + s : s + fill;
}

void system_block(std::ostringstream& os, const char* heading, const EvalReport& r) {
  os << heading << ": " << r.label << "  (definitions=" << r.definition_mode << ", scoring=" << r.scoring
     << ", c2d_scale=" << r.c2d_scale << ", d2i_scale=" << r.d2i_scale << ")\n";
  os << "  " << pad("slice", 12) << pad("n", 8, true) << pad("Hits@1", 10, true) << pad("MRR", 10, true) << '\n';
  os << "  " << pad("all", 12) << pad(std::to_string(r.n), 8, true) << pad(fixed2(r.hits_at_1), 10, true)
     << pad(fixed2(r.mrr), 10, true) << '\n';
  for (const auto& s : r.per_class) {
    os << "  " << pad(s.label, 12) << pad(std::to_string(s.n), 8, true) << pad(fixed2(s.hits_at_1), 10, true)
       << pad(fixed2(s.mrr), 10, true) << '\n';
  }
  os << "  baseline fallbacks: " << r.fallback_count << '\n';
}

}  // namespace

std::string to_json_string(const ReportDocument& doc) {
  json j = {{"report_version", doc.report_version}, {"system", system_json(doc.system)}};
  if (doc.reference) j["reference"] = system_json(*doc.reference);
  if (doc.comparison) j["comparison"] = comparison_json(*doc.comparison);
  return j.dump(2) + "\n";
}

ReportDocument report_from_json_string(const std::string& s) {
  try {
    const json j = json::parse(s);
    ReportDocument doc;
    doc.report_version = j.at("report_version").get<int>();
    if (doc.report_version != ReportDocument::kVersion) {
      throw Error(ErrorCode::kIOError, "unsupported report_version " + std::to_string(doc.report_version));
    }
    doc.system = system_from(j.at("system"));
    if (j.contains("reference")) doc.reference = system_from(j.at("reference"));
    if (j.contains("comparison")) doc.comparison = comparison_from(j.at("comparison"));
    return doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIOError, std::string("malformed report: ") + e.what());
  }
}

std::string render_summary(const ReportDocument& doc) {
  std::ostringstream os;
  os << "glossrank evaluation report (report_version " << doc.report_version << ")\n\n";
  system_block(os, "system", doc.system);
  if (doc.reference) {
    os << '\n';
    system_block(os, "reference", *doc.reference);
  }
  if (doc.comparison) {
    const auto& c = *doc.comparison;
    os << "\ncomparison: " << doc.system.label << " vs " << (doc.reference ? doc.reference->label : "?") << '\n';
    os << "  delta Hits@1 " << signed2(c.delta_hits_at_1) << "  delta MRR " << signed2(c.delta_mrr) << '\n';
    os << "  paired t-test t=" << (std::isinf(c.ttest.t_stat) ? (c.ttest.t_stat > 0 ? "inf" : "-inf")
                                                               : fixed2(c.ttest.t_stat))
       << " df=" << c.ttest.df << " p=" << pvalue(c.ttest.p_value)
       << (c.ttest.zero_variance ? "  [zero variance: no difference]" : "") << '\n';
    os << "\n  " << pad("|D|", 8) << pad("n", 6, true) << pad("corrected", 12, true) << pad("incorrected", 14, true)
       << pad("ratio", 9, true) << '\n';
    for (const auto& b : c.buckets) {
      os << "  " << pad(b.bucket, 8) << pad(std::to_string(b.n), 6, true) << pad(std::to_string(b.corrected), 12, true)
         << pad(std::to_string(b.incorrected), 14, true) << pad(format_ratio(b.corrected_ratio), 9, true) << '\n';
    }
  }
  return os.str();
}

void emit_report(const ReportDocument& doc, const std::filesystem::path& path, ReportFormat format) {
  if (doc.system.instances.empty() || (doc.reference && doc.reference->instances.empty())) {
    throw Error(ErrorCode::kEmptyResults, "refusing to write an empty report");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIOError, "cannot write report " + path.string());
  out << (format == ReportFormat::kJson ? to_json_string(doc) : render_summary(doc));
  if (!out) throw Error(ErrorCode::kIOError, "write failed for " + path.string());
}

ReportDocument load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIOError, "cannot open report " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return report_from_json_string(ss.str());
}

}  // namespace glossrank
